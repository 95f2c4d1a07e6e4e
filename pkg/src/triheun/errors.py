"""Exception hierarchy shared by every module."""


class TriHeunError(Exception):
    """Base class for all library errors."""


class InvalidParams(TriHeunError, ValueError):
    pass


class InfeasibleCase(TriHeunError, ValueError):
    """No rho-interval exists on which I1 > 0 and rho(r) increases."""


class DomainError(TriHeunError, ValueError):
    pass


class ConvergenceError(TriHeunError, RuntimeError):
    pass


class SingularPoint(TriHeunError, ArithmeticError):
    pass


class UnsupportedFamily(TriHeunError, ValueError):
    pass


class TruncationError(TriHeunError, ArithmeticError):
    pass


class QuasiExactUnavailable(TriHeunError, ZeroDivisionError):
    """Raised when b1 == 0, so the QES energy formula has no meaning."""


class BetaMismatch(TriHeunError, ValueError):
    pass


class NoNontrivialSolution(TriHeunError, ArithmeticError):
    pass


class NormalizationError(TriHeunError, ArithmeticError):
    pass


class NodeSingularity(TriHeunError, ArithmeticError):
    """The superpotential has a movable pole at a node of the Heun solution."""


class StepUnderflow(TriHeunError, RuntimeError):
    pass


class CutoffTooSmall(TriHeunError, ValueError):
    pass
