from dataclasses import dataclass
from gettext import gettext as _
import logging
import time

import numpy as np

from optimal_cbf.app import settings
from optimal_cbf.app.first_order import (
    feasible_interval,
    linear_cbf,
    matching_slope,
    optimal_zbf,
)
from optimal_cbf.app.models import (
    BarrierEvaluation,
    ControlBounds,
    EnvelopeFunction,
    ExogenousSignal,
    LeadKind,
    acc_barrier,
    eval_barrier,
    integrator_barrier,
)
from optimal_cbf.app.oracle import (
    GridSpec,
    RolloutConfig,
    grid_safe_set,
    sample_profile_minimality,
)
from optimal_cbf.app.safety_filter import QpSetup, solve_acc_qp, solve_generic_scalar_qp
from optimal_cbf.app.second_order import (
    OptimalCbfConfig,
    alpha,
    reduced_constraint,
    switching_control,
)
from optimal_cbf.app.tasks.simulating import (
    CLOSING,
    STEADY,
    ControllerKind,
    run_scenario,
)


log = logging.getLogger(__name__)

U_MAX = 5.0
MINIMALITY_DT = 1e-3


@dataclass(frozen=True)
class CheckResult:
    """
    Outcome of one verification check.

    Attributes:
        name (str): Short identifier.
        passed (bool): Whether the check held.
        detail (str): The measured quantities.
        seconds (float): Wall time spent.
    """

    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _constant_envelope():
    return EnvelopeFunction.constant(-U_MAX)


def _stationary_lead_barrier():
    signal = ExogenousSignal(kind=LeadKind.CONSTANT_SPEED, delta0=0.0, delta_dot0=0.0)
    return acc_barrier(signal, gamma=10.0, u_max=U_MAX)


def check_class_k(rng):
    envelope = _constant_envelope()
    b = np.sort(rng.uniform(-100.0, 0.0, 1000))
    values = np.array([alpha(envelope, x) for x in b])
    monotone = bool(np.all(np.diff(values) < 0))
    unbounded = bool(np.all(values >= settings.DEFAULT_MARGIN * np.sqrt(2 * np.abs(b))))
    zero = alpha(envelope, 0.0) == 0.0
    return zero and monotone and unbounded, _("alpha(0)=0: {z}, monotone: {m}, bound: {u}").format(
        z=zero, m=monotone, u=unbounded
    )


def check_closed_form(rng):
    envelope = EnvelopeFunction(lambda b: np.full(np.shape(b), -U_MAX))
    b = -np.geomspace(1e-6, 100.0, 1000)
    numeric = np.array([alpha(envelope, x) for x in b])
    exact = np.sqrt(-2 * U_MAX * b)
    worst = float(np.max(np.abs(numeric - exact) / exact))
    return worst <= 1e-9, _("worst relative error {err:.3g}").format(err=worst)


def check_safe_set(rng):
    report = grid_safe_set(
        _stationary_lead_barrier(),
        GridSpec(b_range=(-50.0, 0.0), bdot_range=(0.0, 25.0), counts=(101, 101)),
        RolloutConfig(u_max=U_MAX),
    )
    confined = all(abs(cell.residual) <= 0.1 for cell in report.disagreements)
    return report.agreement >= 0.99 and confined, _(
        "agreement {agree:.4%}, {n} disagreements, confined to |M| <= 0.1: {c}"
    ).format(agree=report.agreement, n=len(report.disagreements), c=confined)


def check_minimality(rng, states=200, profiles=100):
    spec = _stationary_lead_barrier()
    cfg = RolloutConfig(u_max=U_MAX, dt=MINIMALITY_DT)
    failures = 0
    for _index in range(states):
        b = rng.uniform(-10.0, -0.5)
        bdot = rng.uniform(0.05, 0.95) * np.sqrt(-2 * U_MAX * b)
        state = spec.state_at(b, bdot, 0.0)
        seed = int(rng.integers(2**31))
        report = sample_profile_minimality(spec, state, 0.0, profiles, cfg, seed=seed)
        failures += not report.holds
    return failures == 0, _("{f} of {n} states violated minimality").format(f=failures, n=states)


def check_closing_regression(rng):
    _log_opt, optimal = run_scenario(CLOSING.replace(controller=ControllerKind.OPTIMAL))
    _log_lin, linear = run_scenario(CLOSING.replace(controller=ControllerKind.LINEAR))
    safe = optimal.max_b <= settings.VIOLATION_TOL and linear.max_b <= settings.VIOLATION_TOL
    settled = all(
        abs(m.terminal_bdot) <= 0.05 and abs(m.terminal_b) <= 0.5 for m in (optimal, linear)
    )
    earlier = (
        linear.braking_onset is not None
        and optimal.braking_onset is not None
        and linear.braking_onset < optimal.braking_onset
    )
    bang_bang = optimal.min_u <= -0.99 * CLOSING.u_max
    return safe and settled and earlier and bang_bang, _(
        "safe: {s}, settled: {t}, linear brakes first: {e}, full braking reached: {b}"
    ).format(s=safe, t=settled, e=earlier, b=bang_bang)


def check_steady(rng):
    trajectory, _metrics = run_scenario(STEADY)
    still = bool(np.all(trajectory.column("u") == 0.0))
    drift = float(np.max(np.abs(trajectory.column("b") + 11.0)))
    return still and drift <= 1e-6, _("u == 0: {s}, max |b + 11| = {d:.3g}").format(
        s=still, d=drift
    )


def check_qp_oracle(rng, instances=10_000):
    worst = 0.0
    for _index in range(instances):
        v, v_star = rng.uniform(0.0, 30.0, 2)
        dt = rng.uniform(1e-3, 0.1)
        lower = rng.uniform(-U_MAX, 0.0)
        upper = rng.uniform(lower, U_MAX)
        closed = solve_acc_qp(QpSetup(v, v_star, dt, lower, upper, U_MAX)).u_applied
        generic = solve_generic_scalar_qp(dt**2, 2 * dt * (v - v_star), lower, upper)
        worst = max(worst, abs(closed - generic))
    return worst <= 1e-12, _("worst difference {d:.3g}").format(d=worst)


def check_matching_slope(rng, eps=0.01):
    spec = integrator_barrier(5.0)
    bounds = ControlBounds(U_MAX)
    samples = [(np.array([x]), 0.0) for x in rng.uniform(-5.0, 5.0, 200)]
    samples.append((np.array([5.0 - eps]), 0.0))
    c1 = matching_slope(spec, bounds, eps, samples)
    matched = True
    for x, t in samples:
        evaluation = eval_barrier(spec, x, t)
        if evaluation.b > -eps:
            continue
        linear = feasible_interval([linear_cbf(evaluation, c1)], bounds)
        best = feasible_interval([optimal_zbf(evaluation, bounds)], bounds)
        matched &= abs(linear.lower - best.lower) <= 1e-12
        matched &= abs(linear.upper - best.upper) <= 1e-12
    edge = eval_barrier(spec, np.array([5.0]), 0.0)
    linear_edge = feasible_interval([linear_cbf(edge, c1)], bounds).upper
    best_edge = feasible_interval([optimal_zbf(edge, bounds)], bounds).upper
    touching = abs(linear_edge) <= 1e-12 and abs(best_edge) <= 1e-12
    detail = _("c1={c1:.6g}, intervals equal: {m}, boundary ends 0: {t}").format(
        c1=c1, m=matched, t=touching
    )
    return matched and touching, detail


def check_switching(rng, count=100):
    bounds = ControlBounds(U_MAX)
    cfg = OptimalCbfConfig(envelope=_constant_envelope())
    on_boundary = 0
    for b in rng.uniform(-50.0, -0.01, count):
        evaluation = BarrierEvaluation.second_order(b, np.sqrt(-2 * U_MAX * b))
        nominal = rng.uniform(-U_MAX, U_MAX)
        on_boundary += switching_control(evaluation, cfg, bounds, nominal) == -U_MAX

    clamped = 0
    for b in rng.uniform(-50.0, -1.0, count):
        bdot = rng.uniform(0.0, 1.0) * np.sqrt(-2 * U_MAX * b - 1.0)
        evaluation = BarrierEvaluation.second_order(b, bdot)
        nominal = rng.uniform(-2 * U_MAX, 2 * U_MAX)
        constraint = reduced_constraint(evaluation, cfg)
        interval = feasible_interval([constraint], bounds)
        clamped += switching_control(evaluation, cfg, bounds, nominal) == interval.clamp(nominal)
    return on_boundary == count and clamped == count, _(
        "full braking on boundary {b}/{n}, clamped nominal inside {c}/{n}"
    ).format(b=on_boundary, c=clamped, n=count)


CHECKS = (
    ("class-k", check_class_k),
    ("closed-form", check_closed_form),
    ("safe-set", check_safe_set),
    ("minimality", check_minimality),
    ("closing-regression", check_closing_regression),
    ("steady", check_steady),
    ("qp-oracle", check_qp_oracle),
    ("matching-slope", check_matching_slope),
    ("switching", check_switching),
)


def run_verification(seed=settings.DEFAULT_SEED, only=None):
    """
    Run the verification suite.

    Args:
        seed (int): Seed for every random sample in the suite.
        only (list): Names of the checks to run; all when omitted.

    Returns:
        list: One :class:`CheckResult` per check run.
    """
    results = []
    for name, check in CHECKS:
        if only and name not in only:
            continue
        rng = np.random.default_rng(seed)
        started = time.perf_counter()
        passed, detail = check(rng)
        result = CheckResult(name, bool(passed), detail, time.perf_counter() - started)
        log.log(
            logging.INFO if result.passed else logging.WARNING,
            _("{status} {name}: {detail} ({seconds:.2f} s)").format(
                status="PASS" if result.passed else "FAIL",
                name=name,
                detail=detail,
                seconds=result.seconds,
            ),
        )
        results.append(result)
    return results
