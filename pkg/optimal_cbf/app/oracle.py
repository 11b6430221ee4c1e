"""
Brute-force ground truth for the analytic constructions.

Rollouts use explicit Euler on the barrier's own dynamics. Batches of states are integrated
together as ``(m, N)`` arrays; a trajectory leaves the active set once its barrier rate turns
non-positive.
"""

from dataclasses import dataclass, field
from gettext import gettext as _
import logging
import math
from typing import List, Optional

import numpy as np

from optimal_cbf.app import settings
from optimal_cbf.app.exceptions import HorizonError, ParameterError
from optimal_cbf.app.models import (
    ControlBounds,
    difference_quotients,
    eval_barrier,
    extremal_rate,
    relative_error,
)
from optimal_cbf.app.second_order import SafeSetLabel, boundary_residual, classify_c2


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RolloutConfig:
    """
    Settings shared by every rollout.

    Attributes:
        u_max (float): Control bound applied by the braking primitive.
        dt (float): Euler step [s].
        horizon (float): Longest rollout [s].
        violation_threshold (float): Stop as soon as ``b`` exceeds this value; ``None``
            follows every rollout until ``b' <= 0``.
    """

    u_max: float
    dt: float = settings.ROLLOUT_DT
    horizon: float = settings.ROLLOUT_HORIZON
    violation_threshold: Optional[float] = None

    def __post_init__(self):
        ControlBounds(self.u_max)
        if not (self.dt > 0 and self.horizon > 0):
            raise ParameterError(_("Rollout dt and horizon must be positive."))

    @property
    def max_steps(self):
        return int(math.ceil(self.horizon / self.dt))


@dataclass(frozen=True)
class GridSpec:
    """
    A rectangular grid in barrier coordinates ``(b, b')``.

    Attributes:
        b_range (tuple): ``(low, high)`` barrier values, ``high <= 0``.
        bdot_range (tuple): ``(low, high)`` barrier rates.
        counts (tuple): Points per axis, each at least 2.
    """

    b_range: tuple
    bdot_range: tuple
    counts: tuple = (101, 101)

    def __post_init__(self):
        for low, high in (self.b_range, self.bdot_range):
            if not low < high:
                raise ParameterError(_("Grid ranges must have low < high."))
        if min(self.counts) < 2:
            raise ParameterError(_("Grid counts must be at least 2."))
        if self.b_range[1] > 0:
            raise ParameterError(_("The grid must lie within b <= 0."))

    def axes(self):
        return (
            np.linspace(self.b_range[0], self.b_range[1], self.counts[0]),
            np.linspace(self.bdot_range[0], self.bdot_range[1], self.counts[1]),
        )


@dataclass(frozen=True)
class GridCell:
    """One labelled grid point."""

    b: float
    bdot: float
    rollout_safe: bool
    label: str
    residual: float
    peak: float
    error: Optional[str] = None

    @property
    def agrees(self):
        return self.error is None and self.rollout_safe == SafeSetLabel(self.label).is_safe


@dataclass
class GridReport:
    """
    Result of :func:`grid_safe_set`.

    Attributes:
        cells (list): Every :class:`GridCell`, b-major.
        tolerance (float): Peak below which a rollout counts as safe.
    """

    cells: List[GridCell]
    tolerance: float

    @property
    def disagreements(self):
        return [cell for cell in self.cells if not cell.agrees]

    @property
    def agreement(self):
        return 1.0 - len(self.disagreements) / len(self.cells)

    @property
    def errors(self):
        return [cell for cell in self.cells if cell.error is not None]


@dataclass
class MinimalityReport:
    """
    Result of :func:`sample_profile_minimality`.

    Attributes:
        holds (bool): The braking peak is below every profile's peak within ``tolerance``.
        braking_peak (float): Peak ``b`` under full braking.
        profile_peaks (list): Peak ``b`` per profile, cut off once it reaches the braking peak.
        tolerance (float): Allowed excess of the braking peak.
        seed (int): Seed of the random profiles, ``None`` for supplied profiles.
    """

    holds: bool
    braking_peak: float
    profile_peaks: List[float] = field(default_factory=list)
    tolerance: float = 0.0
    seed: Optional[int] = None

    @property
    def worst_excess(self):
        if not self.profile_peaks:
            return 0.0
        return self.braking_peak - min(self.profile_peaks)


@dataclass(frozen=True)
class FiniteDifferenceReport:
    """Numerical against declared derivatives at one state under one control."""

    first_difference: float
    second_difference: float
    bdot: float
    bddot: Optional[float]
    first_error: float
    second_error: Optional[float]


def _braking_controls(spec, x, t, u_max):
    ctrl = np.broadcast_to(np.asarray(spec.bddot_ctrl(x, t), dtype=float), x.shape[1:])
    return (-np.sign(ctrl) * u_max)[np.newaxis, :]


def _rollout(spec, states, t0, cfg, controls=None, stop_at=None):
    """
    Integrate a batch of states until each one's barrier rate is non-positive.

    Args:
        controls (callable): ``(step, indices, x, t) -> (1, len(indices))`` controls; full
            braking when omitted.
        stop_at (numpy.ndarray): Per-trajectory peak at which to stop early.

    Returns:
        tuple: ``(peaks, terminal_bdot, exhausted)`` arrays of length N.
    """
    x = np.array(states, dtype=float)
    n = x.shape[1]
    t = float(t0)
    peaks = np.asarray(spec.value(x, t), dtype=float).copy()
    terminal = np.asarray(spec.bdot_drift(x, t), dtype=float).copy()
    exhausted = np.zeros(n, dtype=bool)
    active = np.arange(n)
    threshold = cfg.violation_threshold

    for step in range(cfg.max_steps + 1):
        xa = x[:, active]
        bdot = np.asarray(spec.bdot_drift(xa, t), dtype=float)
        terminal[active] = bdot
        done = bdot <= 0
        if threshold is not None:
            done |= np.asarray(spec.value(xa, t)) > threshold
        if stop_at is not None:
            done |= peaks[active] >= stop_at[active]
        active = active[~done]
        if not active.size:
            break
        if step == cfg.max_steps:
            exhausted[active] = True
            break
        xa = x[:, active]
        if controls is None:
            u = _braking_controls(spec, xa, t, cfg.u_max)
        else:
            u = controls(step, active, xa, t)
        x[:, active] = spec.dynamics.step(xa, u, cfg.dt)
        t = t0 + (step + 1) * cfg.dt
        peaks[active] = np.maximum(peaks[active], spec.value(x[:, active], t))
    return peaks, terminal, exhausted


def full_braking_rollout(spec, state, t0, cfg):
    """
    Roll out full braking from ``state`` until ``b' <= 0``.

    Args:
        spec (BarrierSpec): Second-order barrier with a scalar control.
        state (array-like): Start state.
        t0 (float): Start time.
        cfg (RolloutConfig): Step, horizon and control bound.

    Returns:
        tuple: ``(max_b, terminal_bdot)``.

    Raises:
        HorizonError: If ``b'`` is still positive when the horizon runs out.
    """
    states = np.asarray(state, dtype=float).reshape(-1, 1)
    peaks, terminal, exhausted = _rollout(spec, states, t0, cfg)
    if exhausted[0]:
        raise HorizonError(
            _("b' = {bdot:.6g} still positive after {horizon} s").format(
                bdot=terminal[0], horizon=cfg.horizon
            )
        )
    return float(peaks[0]), float(terminal[0])


def grid_safe_set(spec, grid, cfg, t0=0.0, tolerance=settings.ROLLOUT_TOL):
    """
    Label a grid of barrier coordinates by rollout and compare with :func:`classify_c2`.

    A cell is safe by rollout when its full-braking peak is at most ``tolerance``. Cells
    whose rollout exhausts the horizon are recorded with an error and count as
    disagreements.

    Args:
        spec (BarrierSpec): Second-order barrier with a ``state_at`` lift.
        grid (GridSpec): The grid.
        cfg (RolloutConfig): Rollout settings.
        t0 (float): Time at which every cell starts.
        tolerance (float): Rollout safety tolerance.

    Returns:
        GridReport: Per-cell labels and agreement statistics.
    """
    if spec.state_at is None:
        raise ParameterError(_("Barrier '{name}' has no state lift.").format(name=spec.name))
    b_axis, bdot_axis = grid.axes()
    b_mesh, bdot_mesh = np.meshgrid(b_axis, bdot_axis, indexing="ij")
    b_flat, bdot_flat = b_mesh.ravel(), bdot_mesh.ravel()
    states = np.asarray(spec.state_at(b_flat, bdot_flat, t0), dtype=float)

    log.info(
        _("Rolling out {n} grid cells at dt={dt}").format(n=b_flat.size, dt=cfg.dt)
    )
    peaks, _terminal, exhausted = _rollout(spec, states, t0, cfg)

    cells = []
    for i in range(b_flat.size):
        evaluation = eval_barrier(spec, states[:, i], t0)
        cells.append(
            GridCell(
                b=float(b_flat[i]),
                bdot=float(bdot_flat[i]),
                rollout_safe=bool(peaks[i] <= tolerance) and not exhausted[i],
                label=classify_c2(evaluation, spec.envelope).value,
                residual=boundary_residual(evaluation, spec.envelope),
                peak=float(peaks[i]),
                error="horizon" if exhausted[i] else None,
            )
        )
    report = GridReport(cells=cells, tolerance=tolerance)
    log.info(
        _("Grid agreement {agree:.4%}, {n} disagreements, {e} horizon errors").format(
            agree=report.agreement, n=len(report.disagreements), e=len(report.errors)
        )
    )
    return report


def sample_profile_minimality(
    spec, state, t0, n_profiles, cfg, seed=None, profiles=None, segments=None
):
    """
    Check that no admissible profile keeps ``b`` lower than full braking does.

    Each profile is piecewise constant over the time full braking needs to stop, followed by
    full braking until ``b' <= 0``. A profile is dropped as soon as its peak reaches the
    braking peak.

    Args:
        spec (BarrierSpec): Second-order barrier with a scalar control.
        state (array-like): Start state with ``b' > 0``.
        t0 (float): Start time.
        n_profiles (int): Number of random profiles.
        cfg (RolloutConfig): Rollout settings.
        seed (int): Random seed, defaults to ``settings.DEFAULT_SEED``.
        profiles (array-like): ``(n_profiles, segments)`` values to use instead of random
            ones.
        segments (int): Segments per profile, defaults to ``settings.PROFILE_SEGMENTS``.

    Returns:
        MinimalityReport: The comparison.
    """
    evaluation = eval_barrier(spec, state, t0)
    if evaluation.bdot_drift <= 0:
        raise ParameterError(_("Minimality sampling needs b' > 0."))
    bounds = ControlBounds(cfg.u_max)
    braking_peak, _bdot = full_braking_rollout(spec, state, t0, cfg)
    tolerance = settings.MINIMALITY_TOL_STEPS * cfg.dt

    if profiles is None:
        seed = settings.DEFAULT_SEED if seed is None else seed
        rng = np.random.default_rng(seed)
        segments = segments or settings.PROFILE_SEGMENTS
        profiles = rng.uniform(-cfg.u_max, cfg.u_max, size=(n_profiles, segments))
    else:
        seed = None
        profiles = np.atleast_2d(np.asarray(profiles, dtype=float))
    if not len(profiles):
        return MinimalityReport(True, braking_peak, [], tolerance, seed)
    if np.any(np.abs(profiles) > cfg.u_max):
        raise ParameterError(_("Profile values must lie within [-u_max, u_max]."))

    stop_time = evaluation.bdot_drift / -extremal_rate(evaluation, bounds, "min", 2)
    steps_per_segment = max(int(math.ceil(stop_time / profiles.shape[1] / cfg.dt)), 1)
    last_step = steps_per_segment * profiles.shape[1]

    def controls(step, indices, x, t):
        if step >= last_step:
            return _braking_controls(spec, x, t, cfg.u_max)
        return profiles[indices, step // steps_per_segment][np.newaxis, :]

    count = len(profiles)
    states = np.repeat(np.asarray(state, dtype=float).reshape(-1, 1), count, axis=1)
    peaks, _terminal, _exhausted = _rollout(
        spec, states, t0, cfg, controls=controls, stop_at=np.full(count, braking_peak)
    )
    holds = bool(np.all(braking_peak <= peaks + tolerance))
    if not holds:
        log.warning(
            _("A sampled profile peaked {gap:.3g} below full braking").format(
                gap=braking_peak - peaks.min()
            )
        )
    return MinimalityReport(holds, braking_peak, peaks.tolist(), tolerance, seed)


def finite_difference_check(spec, state, t, u, h=settings.FD_STEP):
    """
    Compare difference quotients along the true flow with the declared decomposition.

    Errors are relative, ``|numeric - declared| / max(|declared|, 1)``.
    """
    evaluation = eval_barrier(spec, state, t)
    first, second = difference_quotients(spec, state, t, u, h)
    bdot = evaluation.bdot(u)
    bddot = evaluation.bddot(u) if evaluation.order == 2 else None
    return FiniteDifferenceReport(
        first_difference=first,
        second_difference=second,
        bdot=bdot,
        bddot=bddot,
        first_error=relative_error(first, bdot),
        second_error=None if bddot is None else relative_error(second, bddot),
    )
