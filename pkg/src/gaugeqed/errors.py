"""Exception hierarchy. Each class maps to a distinct CLI exit code."""


class GaugeQEDError(Exception):
    exit_code = 1


class ConfigError(GaugeQEDError, ValueError):
    exit_code = 2


class PreconditionError(GaugeQEDError, ValueError):
    exit_code = 2


class UnsupportedParameterError(ConfigError):
    pass


class ResonanceError(ConfigError):
    pass


class OutputPathError(GaugeQEDError, OSError):
    exit_code = 3


class ConvergenceError(GaugeQEDError, RuntimeError):
    exit_code = 4


class TruncationError(ConvergenceError):
    pass


class StepSizeError(ConvergenceError):
    pass


class NumericalError(GaugeQEDError, ArithmeticError):
    exit_code = 5


class ExtractionError(NumericalError):
    pass
