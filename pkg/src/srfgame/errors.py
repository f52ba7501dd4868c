"""Exception types raised by the solvers, simulator and CLI."""


class SrfError(Exception):
    """Base class for package errors."""


class NoSignChange(SrfError):
    """A root bracket has no sign change."""


class OutOfDomain(SrfError, ValueError):
    """An argument lies outside the function's domain."""


class AssumptionViolation(SrfError):
    """A modelling assumption required by a solver does not hold."""


class ParseError(SrfError, ValueError):
    """A strategy or report file could not be parsed."""


class ChatteringError(SrfError):
    """Base class for failures inside a chattering regime."""


class MarginalViolated(ChatteringError):
    """Marginal success gain Phi(w) - psi'(eta) fell to the safety margin at entry."""


class NonIncreasing(ChatteringError):
    """The chattering strategy would start out non-increasing."""


class NoProgress(SrfError):
    """The regime state machine failed to advance."""


class ConfigError(SrfError, ValueError):
    """Invalid or inconsistent run configuration."""
