"""
Dynamics, constraints, control bounds and exogenous signals.

Evaluators are vectorized. A state is an array of shape ``(m,)`` or ``(m, N)`` and every
barrier evaluator broadcasts over the trailing axis, so the oracle can integrate whole grids
of states in one pass.
"""

from dataclasses import dataclass, field
from enum import Enum
from gettext import gettext as _
import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from optimal_cbf.app import settings
from optimal_cbf.app.exceptions import EvaluationError, ParameterError


log = logging.getLogger(__name__)


def state_vector(entries):
    """
    Return ``entries`` as a finite one-dimensional float array.

    Raises:
        EvaluationError: If any entry is not finite.
    """
    x = np.asarray(entries, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise EvaluationError("state", entries)
    return x


def control_vector(entries):
    """Return ``entries`` as a finite one-dimensional float array."""
    u = np.atleast_1d(np.asarray(entries, dtype=float))
    if u.ndim != 1 or not np.all(np.isfinite(u)):
        raise EvaluationError("control", entries)
    return u


@dataclass(frozen=True)
class ControlBounds:
    """
    The admissible control set ``{u : ||u|| <= u_max}``.

    Attributes:
        u_max (float): Norm bound on the control, strictly positive.
    """

    u_max: float

    def __post_init__(self):
        if not (np.isfinite(self.u_max) and self.u_max > 0):
            raise ParameterError(_("u_max must be positive, got {u_max}").format(u_max=self.u_max))

    def contains(self, u):
        """Return True if ``u`` is admissible."""
        return bool(np.linalg.norm(np.atleast_1d(u)) <= self.u_max)


@dataclass(frozen=True)
class ControlAffineDynamics:
    """
    Control-affine dynamics ``x' = f(x) + g(x) u``.

    Attributes:
        drift (callable): ``f(x)``, returns an array shaped like ``x``.
        input_map (callable): ``g(x)``, returns an array of shape ``(m, n) + x.shape[1:]``.
    """

    drift: Callable
    input_map: Callable

    def rate(self, x, u):
        """Return the state rate at ``x`` under control ``u`` (shape ``(n,)`` or ``(n, N)``)."""
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        return self.drift(x) + np.einsum("ij...,j...->i...", self.input_map(x), u)

    def step(self, x, u, dt):
        """Advance ``x`` by one explicit Euler step of length ``dt`` holding ``u``."""
        x = np.asarray(x, dtype=float)
        return x + self.rate(x, u) * dt

    def flow(self, x, u, times):
        """
        Integrate the flow from ``x`` holding ``u`` and sample it at ``times``.

        Args:
            x (numpy.ndarray): Initial state, shape ``(m,)``.
            u (numpy.ndarray): Constant control, shape ``(n,)``.
            times (sequence): Increasing positive sample times relative to the start.

        Returns:
            numpy.ndarray: States of shape ``(m, len(times))``.
        """
        times = np.asarray(times, dtype=float)
        solution = solve_ivp(
            lambda _t, y: self.rate(y, u),
            (0.0, float(times[-1])),
            np.asarray(x, dtype=float),
            method="DOP853",
            t_eval=times,
            rtol=1e-13,
            atol=1e-13,
        )
        if not solution.success:
            raise EvaluationError("flow", solution.message)
        return solution.y


def double_integrator():
    """Return the longitudinal vehicle dynamics ``p' = v, v' = u``."""

    def drift(x):
        return np.stack([x[1], np.zeros_like(x[1])])

    def input_map(x):
        g = np.zeros((2, 1) + np.shape(x)[1:])
        g[1, 0] = 1.0
        return g

    return ControlAffineDynamics(drift=drift, input_map=input_map)


def single_integrator():
    """Return the scalar integrator ``x' = u``."""

    def drift(x):
        return np.zeros_like(x)

    def input_map(x):
        return np.ones((1, 1) + np.shape(x)[1:])

    return ControlAffineDynamics(drift=drift, input_map=input_map)


class LeadKind(str, Enum):
    """Models of the lead vehicle's motion that a barrier may embed."""

    CONSTANT_SPEED = "constant-speed"
    CONSTANT_ACCELERATION = "constant-acceleration"
    WORST_CASE_BRAKING = "worst-case-braking"
    TABULATED_PROFILE = "tabulated-profile"


@dataclass(frozen=True)
class ExogenousSignal:
    """
    Position, speed and acceleration of the lead vehicle as functions of time.

    ``worst-case-braking`` decelerates at ``delta_ddot`` until the lead stops, then holds.
    ``tabulated-profile`` interpolates ``samples`` (speeds taken every ``sample_period``
    seconds) linearly and integrates the position exactly; past the last sample the speed
    holds.

    Attributes:
        kind (LeadKind): Which motion model the signal follows.
        delta0 (float): Position at t = 0 [m].
        delta_dot0 (float): Speed at t = 0 [m/s]. Tabulated signals take ``samples[0]``.
        delta_ddot (float): Constant acceleration [m/s^2]; zero for constant speed.
        samples (tuple): Speed samples for tabulated profiles.
        sample_period (float): Spacing of ``samples`` [s].
    """

    kind: LeadKind
    delta0: float = 0.0
    delta_dot0: float = 0.0
    delta_ddot: float = 0.0
    samples: Optional[Tuple[float, ...]] = None
    sample_period: Optional[float] = None
    _knots: np.ndarray = field(init=False, repr=False, compare=False, default=None)
    _positions: np.ndarray = field(init=False, repr=False, compare=False, default=None)
    _slopes: np.ndarray = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", LeadKind(self.kind))
        except ValueError:
            raise ParameterError(_("Unknown lead kind '{kind}'").format(kind=self.kind))
        for name in ("delta0", "delta_dot0", "delta_ddot"):
            if not np.isfinite(getattr(self, name)):
                raise ParameterError(_("{name} must be finite").format(name=name))

        if self.kind is LeadKind.CONSTANT_SPEED and self.delta_ddot != 0:
            raise ParameterError(_("A constant-speed lead must have delta_ddot = 0."))
        if self.kind is LeadKind.WORST_CASE_BRAKING and (
            self.delta_ddot > 0 or self.delta_dot0 < 0
        ):
            raise ParameterError(
                _("A braking lead needs delta_ddot <= 0 and delta_dot0 >= 0.")
            )
        if self.kind is LeadKind.TABULATED_PROFILE:
            self._tabulate()

    def _tabulate(self):
        if self.samples is None or len(self.samples) < 2:
            raise ParameterError(_("A tabulated profile needs at least two speed samples."))
        if not self.sample_period or self.sample_period <= 0:
            raise ParameterError(_("A tabulated profile needs a positive sample period."))
        speeds = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(speeds)):
            raise ParameterError(_("Tabulated speed samples must be finite."))
        period = float(self.sample_period)
        object.__setattr__(self, "samples", tuple(speeds.tolist()))
        object.__setattr__(self, "delta_dot0", float(speeds[0]))
        object.__setattr__(self, "_knots", np.arange(len(speeds)) * period)
        object.__setattr__(
            self, "_positions", self.delta0 + cumulative_trapezoid(speeds, dx=period, initial=0.0)
        )
        object.__setattr__(self, "_slopes", np.diff(speeds) / period)

    @classmethod
    def from_table(cls, delta0, samples, sample_period):
        """Build a tabulated-profile signal from speed samples."""
        return cls(
            kind=LeadKind.TABULATED_PROFILE,
            delta0=delta0,
            samples=tuple(samples),
            sample_period=sample_period,
        )

    @property
    def stop_time(self):
        """Time at which a braking lead comes to rest (infinite for the other kinds)."""
        if self.kind is LeadKind.WORST_CASE_BRAKING and self.delta_ddot < 0:
            return self.delta_dot0 / -self.delta_ddot
        return np.inf

    @property
    def ddot_lower(self):
        """The infimum of the lead's acceleration over t >= 0."""
        if self.kind is LeadKind.CONSTANT_SPEED:
            return 0.0
        if self.kind is LeadKind.CONSTANT_ACCELERATION:
            return float(self.delta_ddot)
        if self.kind is LeadKind.WORST_CASE_BRAKING:
            return float(self.delta_ddot) if self.stop_time > 0 else 0.0
        return float(min(self._slopes.min(), 0.0))

    def _segment(self, t):
        last = self._knots[-1]
        period = float(self.sample_period)
        k = np.clip(np.floor(t / period).astype(int), 0, len(self._slopes) - 1)
        return k, t - self._knots[k], t < last

    def position(self, t):
        """Return the lead position at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        if self.kind is LeadKind.CONSTANT_SPEED:
            return self.delta0 + self.delta_dot0 * t
        if self.kind is LeadKind.CONSTANT_ACCELERATION:
            return self.delta0 + self.delta_dot0 * t + 0.5 * self.delta_ddot * t**2
        if self.kind is LeadKind.WORST_CASE_BRAKING:
            tau = np.minimum(t, self.stop_time)
            return self.delta0 + self.delta_dot0 * tau + 0.5 * self.delta_ddot * tau**2
        k, tau, inside = self._segment(t)
        speeds = np.asarray(self.samples)
        within = self._positions[k] + speeds[k] * tau + 0.5 * self._slopes[k] * tau**2
        beyond = self._positions[-1] + speeds[-1] * (t - self._knots[-1])
        return np.where(inside, within, beyond)

    def speed(self, t):
        """Return the lead speed at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        if self.kind is LeadKind.CONSTANT_SPEED:
            return self.delta_dot0 + 0.0 * t
        if self.kind is LeadKind.CONSTANT_ACCELERATION:
            return self.delta_dot0 + self.delta_ddot * t
        if self.kind is LeadKind.WORST_CASE_BRAKING:
            return self.delta_dot0 + self.delta_ddot * np.minimum(t, self.stop_time)
        return np.interp(t, self._knots, np.asarray(self.samples))

    def acceleration(self, t):
        """Return the lead acceleration at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        if self.kind is LeadKind.CONSTANT_SPEED:
            return 0.0 * t
        if self.kind is LeadKind.CONSTANT_ACCELERATION:
            return self.delta_ddot + 0.0 * t
        if self.kind is LeadKind.WORST_CASE_BRAKING:
            return np.where(t < self.stop_time, self.delta_ddot, 0.0)
        k, _tau, inside = self._segment(t)
        return np.where(inside, self._slopes[k], 0.0)


@dataclass(frozen=True)
class EnvelopeFunction:
    """
    Lower bound of the barrier's second derivative along the braking primitive, as a
    function of the barrier value.

    Attributes:
        evaluator (callable): ``b -> lower bound of b''``, vectorized over ``b``.
        constant_value (float): Set when the envelope does not depend on ``b``; enables the
            closed-form line integral.
    """

    evaluator: Callable
    constant_value: Optional[float] = None

    @classmethod
    def constant(cls, value):
        """Return an envelope that is ``value`` everywhere."""
        value = float(value)
        return cls(evaluator=lambda b: np.full(np.shape(b), value), constant_value=value)

    def __call__(self, b):
        return self.evaluator(b)


@dataclass(frozen=True)
class BarrierSpec:
    """
    A constraint ``b(x, t) <= 0`` together with its derivative decomposition.

    For ``order == 1`` the control enters the first derivative, ``b' = bdot_drift +
    bdot_ctrl . u``. For ``order == 2`` the control coefficient of ``b'`` is zero and
    ``b'' = bddot_drift + bddot_ctrl * u``. Every derivative term includes the explicit time
    dependence contributed by ``signal``.

    Attributes:
        order (int): Relative degree, 1 or 2.
        value (callable): ``b(x, t)``.
        bdot_drift (callable): Control-free part of ``b'`` including the partial in t.
        bdot_ctrl (callable): Control coefficient row of ``b'``, shape ``(n,) + x.shape[1:]``.
        dynamics (ControlAffineDynamics): The system the barrier is evaluated along.
        envelope (EnvelopeFunction): Lower bound of ``b''`` as a function of ``b``.
        margin (float): The margin ``eps`` with ``min b^(r) <= -eps**2``.
        bddot_drift (callable): Control-free part of ``b''``, required for order 2.
        bddot_ctrl (callable): Scalar control coefficient of ``b''``, required for order 2.
        signal (ExogenousSignal): The exogenous model embedded in the barrier, if any.
        state_at (callable): ``(b, bdot, t) -> x``, a state realizing the given barrier
            value and rate; used to grid in barrier coordinates.
        name (str): Label used in logs and reports.
    """

    order: int
    value: Callable
    bdot_drift: Callable
    bdot_ctrl: Callable
    dynamics: ControlAffineDynamics
    envelope: Optional[EnvelopeFunction] = None
    margin: float = settings.DEFAULT_MARGIN
    bddot_drift: Optional[Callable] = None
    bddot_ctrl: Optional[Callable] = None
    signal: Optional[ExogenousSignal] = None
    state_at: Optional[Callable] = None
    name: str = "barrier"

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ParameterError(_("Barrier order must be 1 or 2, got {r}").format(r=self.order))
        if not self.margin > 0:
            raise ParameterError(_("The margin eps must be positive."))
        if self.order == 2 and None in (self.bddot_drift, self.bddot_ctrl, self.envelope):
            raise ParameterError(
                _("A second-order barrier needs bddot_drift, bddot_ctrl and an envelope.")
            )


@dataclass(frozen=True)
class BarrierEvaluation:
    """
    A barrier and its derivative decomposition evaluated at one state and time.

    Attributes:
        order (int): Relative degree of the barrier that produced this snapshot.
        b (float): Barrier value.
        bdot_drift (float): Control-free part of ``b'``; for order 2 this is ``b'`` itself.
        bdot_ctrl (numpy.ndarray): Control coefficient row of ``b'``; zero for order 2.
        bddot_drift (float): Control-free part of ``b''`` (order 2 only).
        bddot_ctrl (float): Control coefficient of ``b''`` (order 2 only).
    """

    order: int
    b: float
    bdot_drift: float
    bdot_ctrl: np.ndarray
    bddot_drift: Optional[float] = None
    bddot_ctrl: Optional[float] = None

    @classmethod
    def first_order(cls, b, lf_b, lg_b):
        """Build a first-order snapshot from ``b``, ``Lf b`` and ``Lg b``."""
        return cls(order=1, b=float(b), bdot_drift=float(lf_b), bdot_ctrl=control_vector(lg_b))

    @classmethod
    def second_order(cls, b, bdot, bddot_drift=0.0, bddot_ctrl=1.0):
        """Build a second-order snapshot for a scalar control."""
        return cls(
            order=2,
            b=float(b),
            bdot_drift=float(bdot),
            bdot_ctrl=np.zeros(1),
            bddot_drift=float(bddot_drift),
            bddot_ctrl=float(bddot_ctrl),
        )

    def bdot(self, u):
        """Reconstruct ``b'`` under control ``u``."""
        return self.bdot_drift + float(np.dot(self.bdot_ctrl, np.atleast_1d(u)))

    def bddot(self, u):
        """Reconstruct ``b''`` under the scalar control ``u``."""
        if self.order != 2:
            raise ParameterError(_("b'' is only decomposed for second-order barriers."))
        return self.bddot_drift + self.bddot_ctrl * float(np.squeeze(u))


def eval_barrier(spec, x, t):
    """
    Evaluate every term of the barrier decomposition at ``(x, t)``.

    Args:
        spec (BarrierSpec): The barrier.
        x (array-like): State of length m.
        t (float): Time, non-negative.

    Returns:
        BarrierEvaluation: The snapshot.

    Raises:
        ParameterError: If ``t`` is negative, or a second-order barrier reports a nonzero
            control coefficient in ``b'``.
        EvaluationError: If any evaluator returns a non-finite value; names the field.
    """
    x = state_vector(x)
    if not (np.isfinite(t) and t >= 0):
        raise ParameterError(_("Time must be finite and non-negative, got {t}").format(t=t))

    terms = {
        "b": spec.value(x, t),
        "bdot_drift": spec.bdot_drift(x, t),
        "bdot_ctrl": spec.bdot_ctrl(x, t),
    }
    if spec.order == 2:
        terms["bddot_drift"] = spec.bddot_drift(x, t)
        terms["bddot_ctrl"] = spec.bddot_ctrl(x, t)
    for name, term in terms.items():
        if not np.all(np.isfinite(term)):
            raise EvaluationError(name, term)

    bdot_ctrl = np.atleast_1d(np.asarray(terms["bdot_ctrl"], dtype=float))
    if spec.order == 2 and np.any(bdot_ctrl != 0):
        raise ParameterError(
            _("Barrier '{name}' is declared second order but u appears in b'.").format(
                name=spec.name
            )
        )
    return BarrierEvaluation(
        order=spec.order,
        b=float(terms["b"]),
        bdot_drift=float(terms["bdot_drift"]),
        bdot_ctrl=bdot_ctrl,
        bddot_drift=float(terms["bddot_drift"]) if spec.order == 2 else None,
        bddot_ctrl=float(terms["bddot_ctrl"]) if spec.order == 2 else None,
    )


def extremal_rate(evaluation, bounds, which, order):
    """
    Return the smallest or largest admissible ``b'`` (order 1) or ``b''`` (order 2).

    Args:
        evaluation (BarrierEvaluation): The snapshot.
        bounds (ControlBounds): The admissible controls.
        which (str): ``"min"`` or ``"max"``.
        order (int): Which derivative to extremize; must match the snapshot's order.
    """
    if order != evaluation.order:
        raise ParameterError(
            _("Requested order {order} for a barrier of order {r}").format(
                order=order, r=evaluation.order
            )
        )
    if which not in ("min", "max"):
        raise ParameterError(_("which must be 'min' or 'max', got {w}").format(w=which))

    if order == 1:
        drift = evaluation.bdot_drift
        reach = float(np.linalg.norm(evaluation.bdot_ctrl)) * bounds.u_max
    else:
        drift = evaluation.bddot_drift
        reach = abs(evaluation.bddot_ctrl) * bounds.u_max
    return drift - reach if which == "min" else drift + reach


def difference_quotients(spec, x, t, u, h, h2=None):
    """
    Differentiate the barrier numerically along the flow under a constant control.

    Args:
        spec (BarrierSpec): The barrier.
        x (array-like): Start state.
        t (float): Start time.
        u (array-like): Control held over the flow.
        h (float): Step of the forward first difference.
        h2 (float): Step of the forward second difference; defaults to
            ``settings.FD_SECOND_STEP``.

    Returns:
        tuple: ``(first, second)`` difference quotients approximating ``b'`` and ``b''``.
    """
    if not h > 0:
        raise ParameterError(_("The difference step must be positive."))
    h2 = settings.FD_SECOND_STEP if h2 is None else h2
    x = state_vector(x)
    u = control_vector(u)

    b0 = float(spec.value(x, t))
    near = spec.dynamics.flow(x, u, (h,))
    first = (float(spec.value(near[:, 0], t + h)) - b0) / h

    far = spec.dynamics.flow(x, u, (h2, 2 * h2))
    b1 = float(spec.value(far[:, 0], t + h2))
    b2 = float(spec.value(far[:, 1], t + 2 * h2))
    second = (b2 - 2 * b1 + b0) / h2**2
    return first, second


def relative_error(approx, exact):
    """Return ``|approx - exact| / max(|exact|, 1)``."""
    return abs(approx - exact) / max(abs(exact), 1.0)


@dataclass(frozen=True)
class AssumptionFinding:
    """
    One sample that fails an assumption check.

    Attributes:
        index (int): Position of the sample in the input list.
        t (float): Sample time.
        reason (str): ``"control-authority"`` or ``"decomposition"``.
        detail (str): Human-readable description.
    """

    index: int
    t: float
    reason: str
    detail: str


@dataclass
class AssumptionReport:
    """
    Findings of :func:`validate_assumptions`.

    Attributes:
        authority_violations (list): Samples with too little control authority.
        decomposition_errors (list): Samples where numerical derivatives disagree with the
            declared decomposition.
        samples (int): Number of samples checked.
    """

    authority_violations: List[AssumptionFinding] = field(default_factory=list)
    decomposition_errors: List[AssumptionFinding] = field(default_factory=list)
    samples: int = 0

    @property
    def ok(self):
        return not (self.authority_violations or self.decomposition_errors)


def validate_assumptions(spec, bounds, sample_states, h=None, rtol=None):
    """
    Check control authority and the derivative decomposition on sampled states.

    A sample violates control authority when the smallest admissible ``b^(r)`` exceeds
    ``-eps**2`` or the largest is negative. A sample has a decomposition error when the
    numerical derivatives along the flow, under zero and under full control, disagree with
    the declared terms beyond ``rtol`` (``settings.FD_SECOND_RTOL`` for ``b''``).

    Args:
        spec (BarrierSpec): The barrier.
        bounds (ControlBounds): The admissible controls.
        sample_states (Sequence): ``(state, time)`` pairs.
        h (float): First-difference step, defaults to ``settings.FD_STEP``.
        rtol (float): Tolerance on ``b'``, defaults to ``settings.FD_RTOL``.

    Returns:
        AssumptionReport: Every finding; this function does not raise for findings.
    """
    if not sample_states:
        raise ParameterError(_("validate_assumptions needs at least one sample."))
    h = settings.FD_STEP if h is None else h
    rtol = settings.FD_RTOL if rtol is None else rtol

    report = AssumptionReport(samples=len(sample_states))
    threshold = -spec.margin**2
    for index, (x, t) in enumerate(sample_states):
        evaluation = eval_barrier(spec, x, t)
        low = extremal_rate(evaluation, bounds, "min", spec.order)
        high = extremal_rate(evaluation, bounds, "max", spec.order)
        if low > threshold or high < 0:
            report.authority_violations.append(
                AssumptionFinding(
                    index,
                    t,
                    "control-authority",
                    _("min={low:.6g} max={high:.6g} needs min <= {thr:.6g} and max >= 0").format(
                        low=low, high=high, thr=threshold
                    ),
                )
            )

        n = len(evaluation.bdot_ctrl)
        full = np.zeros(n)
        full[0] = bounds.u_max
        for u in (np.zeros(n), full):
            first, second = difference_quotients(spec, x, t, u, h)
            errors = [("b'", relative_error(first, evaluation.bdot(u)), rtol)]
            if spec.order == 2:
                errors.append(
                    ("b''", relative_error(second, evaluation.bddot(u)), settings.FD_SECOND_RTOL)
                )
            for label, error, tolerance in errors:
                if error > tolerance:
                    report.decomposition_errors.append(
                        AssumptionFinding(
                            index,
                            t,
                            "decomposition",
                            _("{label} relative error {err:.3g} at u={u}").format(
                                label=label, err=error, u=u.tolist()
                            ),
                        )
                    )

    if not report.ok:
        log.warning(
            _("Barrier '{name}': {a} authority violations, {d} decomposition errors").format(
                name=spec.name,
                a=len(report.authority_violations),
                d=len(report.decomposition_errors),
            )
        )
    return report


def acc_barrier(signal, gamma, u_max, margin=settings.DEFAULT_MARGIN):
    """
    Build the headway barrier ``b = p - delta(t) - gamma`` for the double integrator.

    The envelope embeds the lead model: ``-u_max - signal.ddot_lower``.

    Args:
        signal (ExogenousSignal): Lead vehicle model.
        gamma (float): Minimum gap [m], positive.
        u_max (float): Acceleration bound [m/s^2].
        margin (float): Control-authority margin ``eps``.
    """
    if not gamma > 0:
        raise ParameterError(_("gamma must be positive, got {gamma}").format(gamma=gamma))
    envelope = EnvelopeFunction.constant(-u_max - signal.ddot_lower)
    if envelope.constant_value > -(margin**2):
        log.warning(
            _("Envelope {env:.6g} leaves less braking authority than the margin allows").format(
                env=envelope.constant_value
            )
        )

    def value(x, t):
        return x[0] - signal.position(t) - gamma

    def bdot_drift(x, t):
        return x[1] - signal.speed(t)

    def bdot_ctrl(x, t):
        return np.zeros((1,) + np.shape(x)[1:])

    def bddot_drift(x, t):
        return np.zeros_like(x[0]) - signal.acceleration(t)

    def bddot_ctrl(x, t):
        return np.ones_like(x[0])

    def state_at(b, bdot, t):
        return np.stack(
            [np.asarray(b) + signal.position(t) + gamma, np.asarray(bdot) + signal.speed(t)]
        )

    return BarrierSpec(
        order=2,
        value=value,
        bdot_drift=bdot_drift,
        bdot_ctrl=bdot_ctrl,
        dynamics=double_integrator(),
        envelope=envelope,
        margin=margin,
        bddot_drift=bddot_drift,
        bddot_ctrl=bddot_ctrl,
        signal=signal,
        state_at=state_at,
        name="headway",
    )


def integrator_barrier(limit):
    """Build the first-order barrier ``b = x - limit`` for ``x' = u``."""

    def value(x, t):
        return x[0] - limit

    def bdot_drift(x, t):
        return np.zeros_like(x[0])

    def bdot_ctrl(x, t):
        return np.ones((1,) + np.shape(x)[1:])

    def state_at(b, bdot, t):
        return np.stack([np.asarray(b) + limit])

    return BarrierSpec(
        order=1,
        value=value,
        bdot_drift=bdot_drift,
        bdot_ctrl=bdot_ctrl,
        dynamics=single_integrator(),
        state_at=state_at,
        name="integrator",
    )


def sample_grid(spec, b_values, bdot_values, t=0.0):
    """Return ``(state, t)`` samples realizing every pair of barrier value and rate."""
    if spec.state_at is None:
        raise ParameterError(_("Barrier '{name}' cannot lift barrier coordinates.").format(
            name=spec.name
        ))
    samples: List[Tuple[np.ndarray, float]] = []
    for b in b_values:
        for bdot in bdot_values:
            samples.append((np.asarray(spec.state_at(b, bdot, t), dtype=float), t))
    return samples


__all__: Sequence[str] = (
    "AssumptionReport",
    "BarrierEvaluation",
    "BarrierSpec",
    "ControlAffineDynamics",
    "ControlBounds",
    "EnvelopeFunction",
    "ExogenousSignal",
    "LeadKind",
    "acc_barrier",
    "eval_barrier",
    "extremal_rate",
    "integrator_barrier",
    "validate_assumptions",
)
