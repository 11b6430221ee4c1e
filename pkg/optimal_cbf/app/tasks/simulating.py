from dataclasses import asdict, dataclass, replace
from enum import Enum
from gettext import gettext as _
import logging
import math
from typing import List, Optional

import numpy as np
import pandas as pd

from optimal_cbf.app import settings
from optimal_cbf.app.exceptions import ConfigError, ParameterError
from optimal_cbf.app.models import (
    ControlBounds,
    ExogenousSignal,
    LeadKind,
    acc_barrier,
    eval_barrier,
)
from optimal_cbf.app.safety_filter import QpSetup, solve_acc_qp
from optimal_cbf.app.second_order import (
    OptimalCbfConfig,
    classify_c2,
    in_boundary_branch,
    reduced_constraint,
)


log = logging.getLogger(__name__)


class ControllerKind(str, Enum):
    """Which barrier filters the nominal speed-tracking control."""

    OPTIMAL = "optimal"
    LINEAR = "linear"
    NONE = "none"


LOG_COLUMNS = (
    "t",
    "p",
    "v",
    "u",
    "delta",
    "delta_dot",
    "b",
    "bdot",
    "cbf_upper_bound",
    "cbf_active",
    "infeasible",
)

PHYSICAL_KEYS = (
    "p0",
    "v0",
    "v_star",
    "gamma",
    "u_max",
    "dt",
    "T_end",
    "lead_kind",
    "delta0",
    "delta_dot0",
    "delta_ddot",
)


@dataclass(frozen=True)
class ScenarioConfig:
    """
    One adaptive cruise control scenario.

    Attributes:
        p0 (float): Initial position [m].
        v0 (float): Initial speed [m/s].
        v_star (float): Target speed [m/s].
        gamma (float): Minimum gap [m].
        u_max (float): Acceleration bound [m/s^2].
        c1 (float): Slope of the reduced optimal CBF.
        cA (float): Position gain of the linear CBF.
        cB (float): Speed gain of the linear CBF.
        dt (float): Control period and Euler step [s].
        T_end (float): Simulated duration [s].
        lead_kind (LeadKind): Lead vehicle model, also embedded in the barrier.
        delta0 (float): Initial lead position [m].
        delta_dot0 (float): Initial lead speed [m/s].
        delta_ddot (float): Lead acceleration [m/s^2].
        controller (ControllerKind): Filter applied to the nominal control.
    """

    p0: float
    v0: float
    v_star: float
    gamma: float
    u_max: float
    delta0: float
    delta_dot0: float
    c1: float = settings.DEFAULT_C1
    cA: Optional[float] = None
    cB: Optional[float] = None
    dt: float = settings.DEFAULT_DT
    T_end: float = settings.DEFAULT_T_END
    lead_kind: LeadKind = LeadKind.CONSTANT_SPEED
    delta_ddot: float = 0.0
    controller: ControllerKind = ControllerKind.OPTIMAL

    def __post_init__(self):
        try:
            object.__setattr__(self, "lead_kind", LeadKind(self.lead_kind))
            object.__setattr__(self, "controller", ControllerKind(self.controller))
        except ValueError as exc:
            raise ConfigError(str(exc))
        if self.lead_kind is LeadKind.TABULATED_PROFILE:
            raise ConfigError(
                _("Tabulated lead profiles are built with ExogenousSignal.from_table."),
                key="lead_kind",
            )
        for key in ("dt", "T_end", "gamma", "u_max", "c1"):
            value = getattr(self, key)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(
                    _("{key} must be positive, got {value}").format(key=key, value=value), key=key
                )
        if self.controller is ControllerKind.LINEAR:
            self.require_linear_gains()
        try:
            self.signal
        except ParameterError as exc:
            raise ConfigError(str(exc), key="delta_ddot")

    def require_linear_gains(self):
        """Raise ConfigError unless cA and cB are set and positive."""
        for key in ("cA", "cB"):
            value = getattr(self, key)
            if value is None:
                raise ConfigError(_("Missing key '{key}'").format(key=key), key=key)
            if not value > 0:
                raise ConfigError(
                    _("{key} must be positive, got {value}").format(key=key, value=value), key=key
                )

    @property
    def signal(self):
        return ExogenousSignal(
            kind=self.lead_kind,
            delta0=self.delta0,
            delta_dot0=self.delta_dot0,
            delta_ddot=self.delta_ddot,
        )

    @property
    def bounds(self):
        return ControlBounds(self.u_max)

    @property
    def barrier(self):
        return acc_barrier(self.signal, self.gamma, self.u_max)

    @property
    def steps(self):
        return int(round(self.T_end / self.dt))

    def physics(self):
        """Everything except the controller and its gains."""
        return {key: getattr(self, key) for key in PHYSICAL_KEYS}

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        data = asdict(self)
        data["lead_kind"] = self.lead_kind.value
        data["controller"] = self.controller.value
        return data


STEADY = ScenarioConfig(
    p0=0.0,
    v0=10.0,
    v_star=10.0,
    gamma=10.0,
    u_max=5.0,
    c1=3.0,
    cA=100.0,
    cB=1.0,
    dt=1e-3,
    T_end=30.0,
    delta0=1.0,
    delta_dot0=10.0,
)

CLOSING = STEADY.replace(delta0=40.0, delta_dot0=1.0, cA=0.5, cB=4.0)

LEAD_BRAKING = CLOSING.replace(
    lead_kind=LeadKind.WORST_CASE_BRAKING, delta0=60.0, delta_dot0=8.0, delta_ddot=-2.0
)

PRESETS = {"steady": STEADY, "closing": CLOSING, "lead-braking": LEAD_BRAKING}


CONFIG_KEYS = (
    "p0",
    "v0",
    "v_star",
    "gamma",
    "u_max",
    "c1",
    "cA",
    "cB",
    "dt",
    "T_end",
    "lead_kind",
    "delta0",
    "delta_dot0",
    "delta_ddot",
    "controller",
)
REQUIRED_KEYS = ("p0", "v0", "v_star", "gamma", "u_max", "delta0", "delta_dot0")


@dataclass(frozen=True)
class Metrics:
    """
    Summary of one run.

    Attributes:
        max_b (float): Largest barrier value.
        terminal_b (float): Barrier value in the last row.
        terminal_bdot (float): Barrier rate in the last row.
        braking_onset (float): First time with ``u < settings.BRAKING_ONSET``, or None.
        violations (int): Rows with ``b > settings.VIOLATION_TOL``.
        infeasible_steps (int): Rows where the QP interval was empty.
        min_u (float): Smallest applied control.
        outside_c2_steps (int): Rows where the optimal controller found the state outside C2.
        aborted (bool): The run stopped on a non-finite state.
    """

    max_b: float
    terminal_b: float
    terminal_bdot: float
    braking_onset: Optional[float]
    violations: int
    infeasible_steps: int
    min_u: float
    outside_c2_steps: int = 0
    aborted: bool = False


@dataclass
class TrajectoryLog:
    """
    Per-step record of one run; one row per control decision, columns as ``LOG_COLUMNS``.

    Attributes:
        frame (pandas.DataFrame): The rows.
        controller (ControllerKind): Controller that produced the run.
    """

    frame: pd.DataFrame
    controller: ControllerKind

    def __len__(self):
        return len(self.frame)

    def column(self, name):
        return self.frame[name].to_numpy()

    def bound_curve(self):
        """Return ``(b, cbf_upper_bound)`` arrays."""
        return self.column("b"), self.column("cbf_upper_bound")


def step(state, u, dt):
    """Advance ``(p, v)`` by one explicit Euler step."""
    p, v = state
    return np.array([p + v * dt, v + u * dt])


def _optimal_config(cfg, spec):
    return OptimalCbfConfig(envelope=spec.envelope, c1=cfg.c1)


def _bound(cfg, spec, optimal, state, t):
    """Return the CBF upper bound and whether the state was outside C2."""
    if cfg.controller is ControllerKind.NONE:
        return math.inf, False

    evaluation = eval_barrier(spec, state, t)
    bdot = evaluation.bdot_drift
    if cfg.controller is ControllerKind.LINEAR:
        if bdot <= 0:
            return math.inf, False
        return -cfg.cB * bdot - cfg.cA * cfg.cB * evaluation.b, False

    label = classify_c2(evaluation, spec.envelope, optimal.classify_tol)
    if not label.is_safe:
        log.debug(
            _("t={t:.6g}: state is {label} (b={b:.6g}, b'={bdot:.6g}); braking").format(
                t=t, label=label.value, b=evaluation.b, bdot=bdot
            )
        )
        return -cfg.u_max, True
    if in_boundary_branch(evaluation, optimal, label):
        return -cfg.u_max, False
    if bdot <= 0:
        return math.inf, False
    constraint = reduced_constraint(evaluation, optimal)
    return constraint.offset / float(constraint.normal[0]), False


def controller_bound(cfg, state, t):
    """
    Return the upper bound the configured controller places on ``u`` at ``(state, t)``.

    The optimal controller brakes fully outside C2, on its boundary and in the singular band;
    both CBFs are omitted while ``b' <= 0``; ``none`` never bounds.
    """
    spec = cfg.barrier
    bound, _outside = _bound(cfg, spec, _optimal_config(cfg, spec), np.asarray(state), t)
    return bound


def run_scenario(cfg):
    """
    Simulate one scenario.

    Args:
        cfg (ScenarioConfig): The scenario.

    Returns:
        tuple: ``(TrajectoryLog, Metrics)``.
    """
    spec = cfg.barrier
    signal = spec.signal
    optimal = _optimal_config(cfg, spec)
    n = cfg.steps
    log.info(
        _("Running scenario: controller={kind}, dt={dt}, T_end={t_end}").format(
            kind=cfg.controller.value, dt=cfg.dt, t_end=cfg.T_end
        )
    )

    data = {name: np.zeros(n + 1) for name in LOG_COLUMNS}
    data["cbf_active"] = np.zeros(n + 1, dtype=bool)
    data["infeasible"] = np.zeros(n + 1, dtype=bool)
    state = np.array([cfg.p0, cfg.v0], dtype=float)
    outside = 0
    aborted = False
    rows = n + 1

    for k in range(n + 1):
        t = k * cfg.dt
        if not np.all(np.isfinite(state)):
            log.error(_("Non-finite state {state} at t={t:.6g}; aborting").format(state=state, t=t))
            aborted = True
            rows = k
            break
        bound, was_outside = _bound(cfg, spec, optimal, state, t)
        outside += was_outside
        result = solve_acc_qp(
            QpSetup(
                v=state[1],
                v_star=cfg.v_star,
                dt=cfg.dt,
                lower=-cfg.u_max,
                upper=min(bound, cfg.u_max),
                u_max=cfg.u_max,
            )
        )
        if result.infeasible:
            log.debug(_("t={t:.6g}: infeasible QP, applying maximal braking").format(t=t))

        delta = float(signal.position(t))
        delta_dot = float(signal.speed(t))
        row = {
            "t": t,
            "p": state[0],
            "v": state[1],
            "u": result.u_applied,
            "delta": delta,
            "delta_dot": delta_dot,
            "b": state[0] - delta - cfg.gamma,
            "bdot": state[1] - delta_dot,
            "cbf_upper_bound": bound,
            "cbf_active": result.cbf_active,
            "infeasible": result.infeasible,
        }
        for name, value in row.items():
            data[name][k] = value
        if k < n:
            state = step(state, result.u_applied, cfg.dt)

    frame = pd.DataFrame({name: data[name][:rows] for name in LOG_COLUMNS})
    trajectory = TrajectoryLog(frame=frame, controller=cfg.controller)
    metrics = summarize(trajectory, outside_c2_steps=outside, aborted=aborted)
    if metrics.violations:
        log.warning(
            _("{n} steps violated b <= {tol} (max b = {max_b:.6g})").format(
                n=metrics.violations, tol=settings.VIOLATION_TOL, max_b=metrics.max_b
            )
        )
    if metrics.outside_c2_steps:
        log.warning(
            _("{n} steps found the state outside C2 and braked fully").format(
                n=metrics.outside_c2_steps
            )
        )
    log.info(
        _("Scenario finished: max_b={max_b:.6g}, onset={onset}").format(
            max_b=metrics.max_b, onset=metrics.braking_onset
        )
    )
    return trajectory, metrics


def summarize(trajectory, outside_c2_steps=0, aborted=False):
    """Compute :class:`Metrics` from a trajectory log."""
    b = trajectory.column("b")
    u = trajectory.column("u")
    braking = np.flatnonzero(u < settings.BRAKING_ONSET)
    if not len(b):
        return Metrics(math.nan, math.nan, math.nan, None, 0, 0, math.nan, outside_c2_steps, True)
    return Metrics(
        max_b=float(b.max()),
        terminal_b=float(b[-1]),
        terminal_bdot=float(trajectory.column("bdot")[-1]),
        braking_onset=float(trajectory.column("t")[braking[0]]) if len(braking) else None,
        violations=int(np.count_nonzero(b > settings.VIOLATION_TOL)),
        infeasible_steps=int(np.count_nonzero(trajectory.column("infeasible"))),
        min_u=float(u.min()),
        outside_c2_steps=int(outside_c2_steps),
        aborted=aborted,
    )


@dataclass
class Comparison:
    """
    Two runs of the same physical scenario under different controllers.

    Attributes:
        logs (tuple): ``(log_a, log_b)``.
        metrics (tuple): ``(metrics_a, metrics_b)``.
        onset_delta (float): ``onset_b - onset_a``; None unless both runs brake.
    """

    logs: tuple
    metrics: tuple
    onset_delta: Optional[float]

    def bound_curves(self):
        """Return ``{controller: (b, bound)}`` for plotting."""
        return {log_.controller.value: log_.bound_curve() for log_ in self.logs}


def compare_scenarios(cfg_a, cfg_b):
    """
    Run two configs that share their physics and compare them.

    Raises:
        ConfigError: If the configs differ in anything but controller, c1, cA and cB.
    """
    physics_a, physics_b = cfg_a.physics(), cfg_b.physics()
    mismatched = [key for key in PHYSICAL_KEYS if physics_a[key] != physics_b[key]]
    if mismatched:
        raise ConfigError(
            _("Compared scenarios differ in {keys}").format(keys=", ".join(mismatched)),
            key=mismatched[0],
        )
    log_a, metrics_a = run_scenario(cfg_a)
    log_b, metrics_b = run_scenario(cfg_b)
    onset_delta = None
    if metrics_a.braking_onset is not None and metrics_b.braking_onset is not None:
        onset_delta = metrics_b.braking_onset - metrics_a.braking_onset
    return Comparison(logs=(log_a, log_b), metrics=(metrics_a, metrics_b), onset_delta=onset_delta)


@dataclass(frozen=True)
class SlopeResult:
    c1: float
    braking_onset: Optional[float]
    max_b: float


def sweep_slope(cfg, slopes):
    """Run the optimal controller once per slope in ``slopes``."""
    results: List[SlopeResult] = []
    for c1 in slopes:
        _trajectory, metrics = run_scenario(
            cfg.replace(c1=c1, controller=ControllerKind.OPTIMAL)
        )
        results.append(SlopeResult(c1=c1, braking_onset=metrics.braking_onset, max_b=metrics.max_b))
    return results
