"""
Second-order constructions: the shortest line integral, the recursively feasible set C2,
the optimal square-root CBF and the switching controller built on it.

Sign convention: ``alpha(b) >= 0`` and a state with ``b' >= 0`` is safe when
``b' <= alpha(b)``.
"""

from dataclasses import dataclass
from enum import Enum
from gettext import gettext as _
import logging

import numpy as np
from scipy.integrate import quad

from optimal_cbf.app import settings
from optimal_cbf.app.exceptions import (
    DegenerateConstraintError,
    EnvelopeViolationError,
    ParameterError,
    SafetyViolationError,
    SingularityError,
)
from optimal_cbf.app.first_order import HalfSpaceConstraint, feasible_interval


log = logging.getLogger(__name__)


class SafeSetLabel(str, Enum):
    """Where a state lies relative to C1 (``b <= 0``) and C2 (recursively feasible)."""

    INTERIOR_C2 = "InteriorC2"
    BOUNDARY_C2 = "BoundaryC2"
    OUTSIDE_C2_WITHIN_C1 = "OutsideC2WithinC1"
    OUTSIDE_C1 = "OutsideC1"

    @property
    def is_safe(self):
        return self in (SafeSetLabel.INTERIOR_C2, SafeSetLabel.BOUNDARY_C2)


@dataclass(frozen=True)
class OptimalCbfConfig:
    """
    Parameters of the optimal second-order CBF.

    Attributes:
        envelope (EnvelopeFunction): Lower bound of ``b''`` along full braking.
        c1 (float): Slope of the reduced first-order constraint.
        b_floor (float): Half-width of the singular band below ``b = 0``.
        quad_tol (float): Relative tolerance of the line-integral quadrature.
        classify_tol (float): Band used by :func:`classify_c2`.
    """

    envelope: object
    c1: float = settings.DEFAULT_C1
    b_floor: float = settings.B_FLOOR
    quad_tol: float = settings.QUAD_RTOL
    classify_tol: float = settings.CLASSIFY_TOL

    def __post_init__(self):
        for name in ("c1", "b_floor", "quad_tol", "classify_tol"):
            if not getattr(self, name) > 0:
                raise ParameterError(_("{name} must be positive").format(name=name))


def shortest_line_integral(envelope, b, quad_tol=None):
    """
    Return ``I(b)``, the integral of the envelope from ``b`` up to 0.

    Constant envelopes are integrated in closed form. Otherwise the envelope is checked for
    positive values on ``[b, 0]`` and integrated with adaptive quadrature.

    Args:
        envelope (EnvelopeFunction): Lower bound of ``b''`` as a function of ``b``.
        b (float): Barrier value, ``b <= 0``.
        quad_tol (float): Relative tolerance, defaults to ``settings.QUAD_RTOL``.

    Returns:
        float: ``I(b) <= 0``.

    Raises:
        EnvelopeViolationError: If the envelope is positive somewhere on ``[b, 0]``.
    """
    b = float(b)
    if b > 0:
        raise ParameterError(_("The line integral needs b <= 0, got {b}").format(b=b))
    if b == 0:
        return 0.0

    if envelope.constant_value is not None:
        if envelope.constant_value > 0:
            raise EnvelopeViolationError(
                _("Envelope {env} is positive").format(env=envelope.constant_value)
            )
        return -envelope.constant_value * b

    sampled = np.asarray(envelope(np.linspace(b, 0.0, settings.ENVELOPE_CHECK_POINTS)))
    if np.any(sampled > 0):
        raise EnvelopeViolationError(
            _("Envelope reaches {peak:.6g} > 0 on [{b:.6g}, 0]").format(peak=sampled.max(), b=b)
        )
    value, _abserr = quad(
        lambda s: float(envelope(s)),
        b,
        0.0,
        epsrel=settings.QUAD_RTOL if quad_tol is None else quad_tol,
        epsabs=settings.QUAD_ATOL,
        limit=200,
    )
    return value


def alpha(envelope, b, quad_tol=None):
    """Return the class-K function ``sqrt(-2 I(b))``."""
    return float(np.sqrt(max(-2.0 * shortest_line_integral(envelope, b, quad_tol), 0.0)))


def alpha_slope(envelope, b, b_floor=settings.B_FLOOR, quad_tol=None):
    """
    Return ``d alpha / d b = envelope(b) / alpha(b)``, which is negative.

    Raises:
        SingularityError: If ``|b| < b_floor``; the boundary branch of
            :func:`switching_control` covers that band.
    """
    if abs(b) < b_floor:
        raise SingularityError(
            _("alpha' is singular at b = {b:.3g} (floor {floor:.3g})").format(b=b, floor=b_floor)
        )
    if b > 0:
        raise ParameterError(_("alpha' needs b < 0, got {b}").format(b=b))
    return float(envelope(b)) / alpha(envelope, b, quad_tol)


def boundary_residual(evaluation, envelope, quad_tol=None):
    """Return ``M = 2 I(b) + b'**2``; zero on the boundary of C2 where ``b' >= 0``."""
    b = min(evaluation.b, 0.0)
    return 2.0 * shortest_line_integral(envelope, b, quad_tol) + evaluation.bdot_drift**2


def classify_c2(evaluation, envelope, tol=settings.CLASSIFY_TOL):
    """
    Label a state against C1 and C2.

    A state moving away from the boundary (``b' < 0``) is labelled by ``b`` alone. A state
    approaching it is labelled by the residual ``M`` of :func:`boundary_residual`.

    Args:
        evaluation (BarrierEvaluation): Second-order snapshot.
        envelope (EnvelopeFunction): Lower bound of ``b''``.
        tol (float): Band around each boundary.

    Returns:
        SafeSetLabel: The label.
    """
    b, bdot = evaluation.b, evaluation.bdot_drift
    if b > tol:
        return SafeSetLabel.OUTSIDE_C1
    if bdot < 0:
        return SafeSetLabel.INTERIOR_C2 if b < -tol else SafeSetLabel.BOUNDARY_C2

    residual = boundary_residual(evaluation, envelope)
    if residual < -tol:
        return SafeSetLabel.INTERIOR_C2
    if abs(residual) <= tol:
        return SafeSetLabel.BOUNDARY_C2
    return SafeSetLabel.OUTSIDE_C2_WITHIN_C1


def _require_second_order(evaluation):
    if evaluation.order != 2:
        raise ParameterError(
            _("Expected a second-order barrier, got order {r}").format(r=evaluation.order)
        )
    if evaluation.bddot_ctrl == 0:
        raise DegenerateConstraintError(_("The control does not appear in b''."))


def reduced_constraint(evaluation, cfg):
    """
    Reduce ``b' <= alpha(b)`` to a half-space on the control.

    The constraint enforced is ``h' <= -c1 h`` with ``h = b' - alpha(b)``, which reads
    ``bddot_ctrl u <= -c1 (b' - alpha) + alpha' b' - bddot_drift``.

    Args:
        evaluation (BarrierEvaluation): Second-order snapshot, ``b <= -b_floor``.
        cfg (OptimalCbfConfig): Slope, singular band and quadrature tolerance.

    Raises:
        SingularityError: If ``|b| < b_floor``.
        DegenerateConstraintError: If ``bddot_ctrl == 0``.
    """
    _require_second_order(evaluation)
    b, bdot = evaluation.b, evaluation.bdot_drift
    slope = alpha_slope(cfg.envelope, b, cfg.b_floor, cfg.quad_tol)
    h = bdot - alpha(cfg.envelope, b, cfg.quad_tol)
    offset = -cfg.c1 * h + slope * bdot - evaluation.bddot_drift
    return HalfSpaceConstraint(np.array([evaluation.bddot_ctrl]), offset)


def braking_control(evaluation, bounds):
    """Return the admissible control minimizing ``b''``."""
    return -float(np.sign(evaluation.bddot_ctrl)) * bounds.u_max


def in_boundary_branch(evaluation, cfg, label):
    """True when the switching controller must apply full braking."""
    if label is SafeSetLabel.BOUNDARY_C2:
        return True
    return abs(evaluation.b) < cfg.b_floor and evaluation.bdot_drift > 0


def switching_control(evaluation, cfg, bounds, nominal_u):
    """
    Apply the switching policy to a scalar nominal control.

    On the boundary of C2, and inside the singular band while approaching it, the control is
    full braking. Elsewhere the nominal control is clamped into the interval the reduced
    constraint leaves inside the control bounds.

    Raises:
        SafetyViolationError: If the state lies outside C2.
    """
    _require_second_order(evaluation)
    label = classify_c2(evaluation, cfg.envelope, cfg.classify_tol)
    if not label.is_safe:
        raise SafetyViolationError(
            _("State b={b:.6g}, b'={bdot:.6g} is {label}").format(
                b=evaluation.b, bdot=evaluation.bdot_drift, label=label.value
            )
        )
    if in_boundary_branch(evaluation, cfg, label):
        return braking_control(evaluation, bounds)

    constraints = []
    if abs(evaluation.b) >= cfg.b_floor:
        constraints.append(reduced_constraint(evaluation, cfg))
    interval = feasible_interval(constraints, bounds)
    if interval.empty:
        log.warning(
            _("Reduced constraint leaves no admissible control at b={b:.6g}; braking").format(
                b=evaluation.b
            )
        )
        return braking_control(evaluation, bounds)
    return interval.clamp(nominal_u)
