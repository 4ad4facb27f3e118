"""Exception hierarchy shared by all modules."""


class OscPeriodError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OscPeriodError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class EnergyOutOfRange(DomainError):
    """Energy not inside the open well interval (0, E_max)."""


class NearCriticalPoint(DomainError):
    """Quotient forms evaluated too close to the potential minimum."""


class NoConvergence(OscPeriodError, RuntimeError):
    """An iterative solver failed to reach its tolerance."""


class QuadratureNoConvergence(NoConvergence):
    """Gauss-Legendre order doubling hit its cap.

    ``history`` holds the ``(order, value)`` pairs computed before giving up.
    """

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class NoSignChange(NoConvergence):
    """Bracket search did not find a sign change."""


class StepFailure(OscPeriodError, RuntimeError):
    """The integrator could not meet its energy-drift bound."""


class DegenerateOrbit(OscPeriodError, RuntimeError):
    """Orbit amplitude below the event-detection floor."""


class RepresentationOverflow(OscPeriodError, OverflowError):
    """A value exceeds the float range; use the log-domain variant instead."""
