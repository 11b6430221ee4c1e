from gettext import gettext as _


class CbfError(Exception):
    """Base class for every error raised by optimal_cbf."""


class ParameterError(CbfError, ValueError):
    """A parameter or precondition of an operation is violated."""


class EvaluationError(CbfError, ArithmeticError):
    """
    An evaluator returned a non-finite value.

    Attributes:
        field (str): Name of the offending field.
    """

    def __init__(self, field, value=None):
        self.field = field
        self.value = value
        super().__init__(
            _("Non-finite value for '{field}': {value}").format(field=field, value=value)
        )


class OutsideSafeSetError(CbfError):
    """The state lies outside the constraint set b <= 0."""


class EnvelopeViolationError(CbfError):
    """The lower envelope of the second derivative is positive somewhere on [b, 0]."""


class SingularityError(CbfError):
    """The barrier value is inside the singular band around b = 0."""


class DegenerateConstraintError(CbfError):
    """The control does not appear in the second derivative of the barrier."""


class SafetyViolationError(CbfError):
    """The state has left the recursively feasible set C2."""


class HorizonError(CbfError):
    """A rollout exhausted its horizon before the barrier rate turned non-positive."""


class EmptyIntervalError(CbfError, ValueError):
    """An interval with lower > upper was passed where a nonempty one is required."""


class ConfigError(CbfError, ValueError):
    """
    A scenario configuration is malformed or inconsistent.

    Attributes:
        line (int): 1-based line number in the config file, when known.
        key (str): The offending key, when known.
    """

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        if line is not None:
            message = _("line {line}: {message}").format(line=line, message=message)
        super().__init__(message)
