"""Exception hierarchy shared by every module."""


class LsapproxError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(LsapproxError, ValueError):
    """A numeric parameter is outside its admissible range."""


class DomainError(ParameterError):
    """An evaluation point lies outside the interval an operator is defined on."""


class ScheduleError(ParameterError):
    """A lambda schedule produced a value outside [0, 1]."""


class EvaluationError(LsapproxError, ArithmeticError):
    """A function returned a non-finite sample."""


class UnsupportedFamilyError(LsapproxError, ValueError):
    pass


class UnsupportedMomentError(LsapproxError, ValueError):
    pass


class MetadataError(LsapproxError, ValueError):
    """A function lacks derivative or shape metadata an operation needs."""


class ConfigurationError(LsapproxError, ValueError):
    """Growth constants or other inputs required by a bound are missing."""


class NeedsWindowError(ParameterError):
    """A grid computation was asked to run over an unbounded interval."""


class GrowthError(LsapproxError, ValueError):
    """A function grows too fast for the operator or weight it is used with."""


class ConfigError(LsapproxError, ValueError):
    """An experiment configuration could not be parsed or resolved."""
