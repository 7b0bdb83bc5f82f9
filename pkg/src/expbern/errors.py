"""Exception types raised by the library."""


class ExpBernError(Exception):
    """Base class for all library errors."""


class ParseError(ExpBernError, ValueError):
    pass


class IllConditioned(ExpBernError):
    pass


class ZeroScale(ExpBernError, ValueError):
    pass


class DivisionNearZero(ExpBernError, ZeroDivisionError):
    pass


class DomainError(ExpBernError, ValueError):
    pass


class NotChebyshevPair(ExpBernError):
    def __init__(self, k, msg=None):
        self.k = k
        super().__init__(msg or f"not an extended Chebyshev pair: degenerate quotient at step k={k}")


class SingularHankel(ExpBernError):
    def __init__(self, k, msg=None):
        self.k = k
        super().__init__(msg or f"Hankel matrix of order {k} is numerically singular")


class NonPositiveWeight(ExpBernError):
    def __init__(self, k, value):
        self.k = k
        self.value = value
        super().__init__(f"weight alpha_{k} = {value!r} is not positive")


class KnotsNotIncreasing(ExpBernError):
    def __init__(self, k, msg=None):
        self.k = k
        super().__init__(msg or f"knots not strictly increasing at index {k}")


class KnotLogDomain(ExpBernError):
    def __init__(self, k, ratio):
        self.k = k
        self.ratio = ratio
        super().__init__(f"knot {k}: coefficient ratio {ratio!r} is not positive")


class DegenerateLimit(ExpBernError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"limit at b is degenerate for k={k} (denominator derivative vanishes)")


class RequiresZeroEigenvalue(ExpBernError, ValueError):
    pass


class UndefinedDiagnostic(ExpBernError, ValueError):
    pass
