"""
First-order constructions: the optimal zeroing barrier, the linear CBF and its slope.

Every construction returns a :class:`HalfSpaceConstraint` on the control, ``normal . u <=
offset``. :func:`feasible_interval` intersects a list of them with the control bounds for
scalar controls.
"""

from dataclasses import dataclass
from gettext import gettext as _
import logging

import numpy as np

from optimal_cbf.app import settings
from optimal_cbf.app.exceptions import OutsideSafeSetError, ParameterError
from optimal_cbf.app.models import eval_barrier, extremal_rate


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HalfSpaceConstraint:
    """
    The control constraint ``normal . u <= offset``.

    Attributes:
        normal (numpy.ndarray): Row vector of length n.
        offset (float): Right-hand side.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = np.atleast_1d(np.asarray(self.normal, dtype=float))
        if not np.all(np.isfinite(normal)):
            raise ParameterError(_("A half-space normal must be finite."))
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def is_trivial(self):
        """True when the control does not appear in the constraint."""
        return not np.any(self.normal)

    @property
    def is_infeasible(self):
        """True for a control-independent constraint that no control satisfies."""
        return self.is_trivial and self.offset < 0


@dataclass(frozen=True)
class BoundaryTolerance:
    """
    Band around ``b = 0`` treated as the constraint boundary.

    Attributes:
        tol_b (float): ``|b| <= tol_b`` counts as on-boundary.
    """

    tol_b: float = settings.TOL_B_ANALYTIC

    def __post_init__(self):
        if not self.tol_b > 0:
            raise ParameterError(_("tol_b must be positive, got {tol}").format(tol=self.tol_b))


@dataclass(frozen=True)
class FeasibleInterval:
    """
    Scalar control interval ``[lower, upper]``, possibly empty.

    Attributes:
        lower (float): Lower end.
        upper (float): Upper end.
        empty (bool): True when no control satisfies every constraint.
    """

    lower: float
    upper: float
    empty: bool = False

    def clamp(self, u):
        return float(np.clip(u, self.lower, self.upper))


def _require_first_order(evaluation):
    if evaluation.order != 1:
        raise ParameterError(
            _("Expected a first-order barrier, got order {r}").format(r=evaluation.order)
        )


def optimal_zbf(evaluation, bounds, tol=None):
    """
    Build the optimal zeroing-barrier constraint.

    In the interior the constraint only restates the control bound along ``Lg b``; on the
    boundary it forces ``b' <= 0``.

    Args:
        evaluation (BarrierEvaluation): First-order snapshot.
        bounds (ControlBounds): Control bound.
        tol (BoundaryTolerance): Boundary band, defaults to ``settings.TOL_B_ANALYTIC``.

    Raises:
        OutsideSafeSetError: If ``b > tol_b``.
    """
    _require_first_order(evaluation)
    tol = tol or BoundaryTolerance()
    b = evaluation.b
    if b > tol.tol_b:
        raise OutsideSafeSetError(
            _("b = {b:.6g} lies outside the constraint set").format(b=b)
        )
    normal = evaluation.bdot_ctrl
    if b < -tol.tol_b:
        return HalfSpaceConstraint(normal, float(np.linalg.norm(normal)) * bounds.u_max)
    return HalfSpaceConstraint(normal, -evaluation.bdot_drift)


def linear_cbf(evaluation, c1):
    """Build the linear CBF constraint ``Lg b . u <= -c1 b - Lf b``."""
    _require_first_order(evaluation)
    if not c1 > 0:
        raise ParameterError(_("c1 must be positive, got {c1}").format(c1=c1))
    return HalfSpaceConstraint(evaluation.bdot_ctrl, -c1 * evaluation.b - evaluation.bdot_drift)


def matching_slope(spec, bounds, eps, sample_states):
    """
    Return a linear-CBF slope that is non-binding wherever ``b <= -eps``.

    The slope is ``max_u b' / eps`` maximized over the samples. When no sample can
    increase ``b`` at all the constraint never binds, and 0 is returned with a notice.

    Args:
        spec (BarrierSpec): First-order barrier.
        bounds (ControlBounds): Control bound.
        eps (float): Distance from the boundary beyond which the constraint must not bind.
        sample_states (list): ``(state, time)`` pairs.
    """
    if not eps > 0:
        raise ParameterError(_("eps must be positive, got {eps}").format(eps=eps))
    if not sample_states:
        raise ParameterError(_("matching_slope needs at least one sample."))

    peak = max(
        extremal_rate(eval_barrier(spec, x, t), bounds, "max", 1) for x, t in sample_states
    )
    if peak <= 0:
        log.info(
            _("Barrier '{name}' cannot increase at any sample; the linear CBF never binds.").format(
                name=spec.name
            )
        )
        return 0.0
    return peak / eps


def feasible_interval(constraints, bounds):
    """
    Intersect half-spaces on a scalar control with ``[-u_max, u_max]``.

    Args:
        constraints (list): :class:`HalfSpaceConstraint` with normals of length 1.
        bounds (ControlBounds): Control bound.

    Returns:
        FeasibleInterval: The intersection; ``empty`` is set when it has no points or a
            control-independent constraint is infeasible.
    """
    lower, upper = -bounds.u_max, bounds.u_max
    for constraint in constraints:
        if constraint.normal.shape != (1,):
            raise ParameterError(_("feasible_interval only handles scalar controls."))
        a = float(constraint.normal[0])
        if a == 0:
            if constraint.offset < 0:
                return FeasibleInterval(lower, upper, empty=True)
            continue
        bound = constraint.offset / a
        if a > 0:
            upper = min(upper, bound)
        else:
            lower = max(lower, bound)
    return FeasibleInterval(lower, upper, empty=lower > upper)
