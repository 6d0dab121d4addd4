"""Exception types shared across the package."""


class TrankError(Exception):
    """Base class for all package errors."""


class ModeMismatch(TrankError, TypeError):
    """Float64 and exact-rational objects were combined."""


class SingularMatrix(TrankError, ZeroDivisionError):
    pass


class CostGuard(TrankError, ValueError):
    """Input exceeds a size limit that protects exact symbolic work."""


class Uncovered(TrankError, ValueError):
    """Tensor format not treated by the closed-form rank tables."""

    def __init__(self, dims):
        self.dims = tuple(dims)
        super().__init__(f"no closed-form typical-rank result for dims {self.dims}")


class WrongShape(TrankError, ValueError):
    pass


class NotInV1(TrankError, ValueError):
    """The stacked first m-1 slices do not form a nonsingular matrix."""


class GenericityFailed(TrankError):
    def __init__(self, condition: str, report=None):
        self.condition = condition
        self.report = report
        super().__init__(f"genericity condition {condition} failed")


class SearchExhausted(TrankError):
    """No perturbation with a full certificate was found within the budget."""

    def __init__(self, message: str, tries: int = 0):
        self.tries = tries
        super().__init__(message)


class CertificateNotFound(TrankError):
    pass


class OracleInapplicable(TrankError, ValueError):
    pass
