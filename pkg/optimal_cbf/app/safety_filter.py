"""
The adaptive cruise control QP: track a target speed within the admissible control interval.

The program is one-dimensional, so it is solved by clamping. The generic form exists as an
independent check on the closed form.
"""

from dataclasses import dataclass
from gettext import gettext as _
import logging

import numpy as np

from optimal_cbf.app.exceptions import EmptyIntervalError, ParameterError


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QpSetup:
    """
    One instance of the speed-tracking QP.

    Attributes:
        v (float): Current speed [m/s].
        v_star (float): Target speed [m/s].
        dt (float): Step over which the control is held [s].
        lower (float): Lower end of the admissible interval.
        upper (float): Upper end; ``inf`` when no CBF bound is active and no bound is given.
        u_max (float): Control bound, used to tell saturation from an active CBF. Defaults
            to ``-lower``.
    """

    v: float
    v_star: float
    dt: float
    lower: float
    upper: float
    u_max: float = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError(_("dt must be positive, got {dt}").format(dt=self.dt))
        if self.u_max is None:
            object.__setattr__(self, "u_max", -self.lower)


@dataclass(frozen=True)
class FilterResult:
    """
    Outcome of :func:`solve_acc_qp`.

    Attributes:
        u_applied (float): The control to apply.
        cbf_active (bool): The CBF bound is the binding upper end.
        saturated (bool): ``-u_max`` or ``+u_max`` binds.
        infeasible (bool): The interval was empty and the fallback was applied.
    """

    u_applied: float
    cbf_active: bool = False
    saturated: bool = False
    infeasible: bool = False


def solve_acc_qp(setup):
    """
    Minimize ``(v + u dt - v_star)**2`` over ``[lower, upper]``.

    An empty interval yields maximal braking ``u = lower`` flagged as infeasible.

    Args:
        setup (QpSetup): The instance.

    Returns:
        FilterResult: The applied control and which bound, if any, binds.
    """
    if setup.upper < setup.lower:
        log.debug(
            _("Infeasible QP: upper {upper:.6g} < lower {lower:.6g}; braking").format(
                upper=setup.upper, lower=setup.lower
            )
        )
        return FilterResult(u_applied=setup.lower, saturated=True, infeasible=True)

    target = (setup.v_star - setup.v) / setup.dt
    u = float(np.clip(target, setup.lower, setup.upper))
    clamped_up = target > setup.upper
    clamped_down = target < setup.lower
    cbf_bound = setup.upper < setup.u_max
    return FilterResult(
        u_applied=u,
        cbf_active=bool(clamped_up and cbf_bound),
        saturated=bool((clamped_up and not cbf_bound) or clamped_down),
    )


def solve_generic_scalar_qp(a, b_lin, lower, upper):
    """Minimize ``a u**2 + b_lin u`` on ``[lower, upper]``."""
    if not a > 0:
        raise ParameterError(_("The quadratic coefficient must be positive, got {a}").format(a=a))
    if lower > upper:
        raise EmptyIntervalError(
            _("Empty interval [{lower}, {upper}]").format(lower=lower, upper=upper)
        )
    return float(np.clip(-b_lin / (2.0 * a), lower, upper))
