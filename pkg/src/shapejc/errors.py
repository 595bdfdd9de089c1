"""Exception types raised across the package."""


class ShapeJCError(Exception):
    """Base class for all package errors."""


class InvalidModel(ShapeJCError, ValueError):
    pass


class NonPositiveRemainder(InvalidModel):
    def __init__(self, k, value=None):
        self.k = k
        self.value = value
        msg = f"remainder R_{k} must be positive"
        if value is not None:
            msg += f" (got {value!r})"
        super().__init__(msg)


class DimensionTooSmall(InvalidModel):
    def __init__(self, n):
        self.n = n
        super().__init__(f"basis size must be at least 2 (got {n})")


class InvalidFrequency(ShapeJCError, ValueError):
    pass


class BlockOutOfRange(ShapeJCError, IndexError):
    def __init__(self, m, n):
        self.m = m
        self.n = n
        super().__init__(f"block index {m} outside 0..{n - 2}")


class DegenerateLadder(ShapeJCError, ValueError):
    pass


class NotDiagonal(ShapeJCError, ValueError):
    pass


class NotResonant(ShapeJCError, ValueError):
    pass


class NotHermitian(ShapeJCError, ValueError):
    pass


class ConvergenceBudgetExceeded(ShapeJCError, ArithmeticError):
    pass


class NoConvergence(ShapeJCError, ArithmeticError):
    pass


class BackendDomainError(ShapeJCError, ValueError):
    pass


class ShapeMismatch(ShapeJCError, ValueError):
    pass


class NonNormalizedState(ShapeJCError, ValueError):
    pass
