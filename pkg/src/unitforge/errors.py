"""Exception types shared across the package."""

from __future__ import annotations


class UnitforgeError(Exception):
    pass


class VerificationError(UnitforgeError, AssertionError):
    """An exact post-condition check failed; always indicates a bug."""


class NormMinusOne(UnitforgeError):
    pass


class DegenerateBeta(UnitforgeError):
    pass


class CoercionFailure(VerificationError):
    pass


class PreconditionUnverifiable(UnitforgeError):
    pass


class BadResidue(UnitforgeError, ValueError):
    pass


class NotSquareFree(UnitforgeError, ValueError):
    def __init__(self, name: str, value: int) -> None:
        super().__init__(f"{name} = {value} is not squarefree")
        self.name = name
        self.value = value


class BadPrime(UnitforgeError, ValueError):
    pass


class InsufficientFamilies(UnitforgeError):
    pass


class DimensionMismatch(UnitforgeError, ValueError):
    pass


class NotClassical(UnitforgeError):
    pass


class NotUnit(UnitforgeError):
    pass


class NotTotallyPositiveUnit(UnitforgeError, ValueError):
    pass


class NonDiagonal(UnitforgeError):
    pass


class UnsupportedBase(UnitforgeError):
    pass


class BudgetExceeded(UnitforgeError):
    def __init__(self, budget: int) -> None:
        super().__init__(f"search budget of {budget} nodes exhausted")
        self.budget = budget


class RepresentationNotFound(UnitforgeError):
    pass


class MaxIterExceeded(UnitforgeError):
    def __init__(self, trace) -> None:
        super().__init__(f"descent did not terminate within {len(trace.levels) - 1} iterations")
        self.trace = trace


class NotIntegral(UnitforgeError, ValueError):
    pass
