"""Exception hierarchy.

``DomainError`` subclasses describe a well-posed request whose answer is
"no" (singular pencil, inconsistent initial state, ...). The CLI maps them
to exit code 2; anything else is a crash.
"""


class PencilSysError(Exception):
    pass


class DomainError(PencilSysError):
    pass


class DimensionMismatch(PencilSysError, ValueError):
    pass


class SingularMatrix(DomainError):
    pass


class NotNilpotent(DomainError):
    pass


class SingularPencil(DomainError):
    pass


class IllConditioned(DomainError):
    pass


class ExactModeRequired(PencilSysError):
    pass


class DerivativeUnavailable(PencilSysError):
    pass


class InconsistentInitialCondition(DomainError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class GridTooCoarse(PencilSysError, ValueError):
    pass


class InsufficientHistory(PencilSysError, IndexError):
    pass


class GammaPole(DomainError):
    pass


class StepMatrixSingular(DomainError):
    pass
