"""exceptions and warnings raised by the solvers, bound evaluators and harness"""


class SingstepError(Exception):
    """base class of every library error"""


class ParameterError(SingstepError, ValueError):
    """a model or grid parameter is outside its admissible range"""


class StepSizeViolation(SingstepError):
    """the time step makes the update singular"""


class DomainError(SingstepError, ValueError):
    """argument outside the domain of an evaluator"""


class SingularKernel(SingstepError):
    """a leading BDF2 kernel vanishes, so the DOC recursion cannot be solved"""


class LinearSolveFailure(SingstepError):
    """factorization of a step matrix failed"""


class HypothesisViolation(SingstepError):
    """the hypotheses of a bound or inequality probe do not hold"""


class DegenerateError(SingstepError):
    """an error value is zero, negative or not finite, so no order can be formed"""


class ConfigError(SingstepError):
    """malformed or incomplete experiment configuration"""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class UnknownPreset(SingstepError):
    """requested preset does not exist"""

    def __init__(self, name, valid):
        self.name = name
        self.valid = sorted(valid)
        super().__init__(f"unknown preset '{name}', valid names: {', '.join(self.valid)}")


class AccuracyWarning(UserWarning):
    """an evaluator could not reach its target accuracy"""
