"""Exception hierarchy shared by every module of the package."""


class GLError(Exception):
    """Base class for all errors raised by glduality."""


class DomainError(GLError, ValueError):
    """An argument lies outside the domain of a formula (typically r <= 0)."""


class DegenerateClass(GLError, ValueError):
    """Class exponent for which the potential or the dual map is singular."""


class WrongClass(GLError, ValueError):
    """A class-specific quantity was requested for an equation of another class."""


class StepLimitExceeded(GLError, RuntimeError):
    pass


class SingularityApproach(GLError, RuntimeError):
    """Adaptive step collapsed, usually because the orbit is falling into r = 0."""


class InsufficientEvents(GLError, RuntimeError):
    pass


class Unbound(GLError, ValueError):
    """The (energy, angular momentum) pair does not confine the orbit to an annulus."""


class NonConvergent(GLError, RuntimeError):
    pass


class PoleError(GLError, ValueError):
    """Evaluation at a pole of a special function."""


class PoleAtC(PoleError):
    """Gauss hypergeometric series with c a non-positive integer."""
