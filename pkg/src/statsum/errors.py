"""Exception hierarchy shared by every module."""


class StatSumError(Exception):
    """Base class for all library errors."""


class DomainError(StatSumError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateSpecError(DomainError):
    """z = 1, where S(z, M, n) is identically M."""


class WindowError(DomainError):
    """A threshold falls outside the range on which a bound is stated."""


class BudgetError(StatSumError):
    """Exact enumeration would exceed the configured size cap."""


class NumericFailure(StatSumError, ArithmeticError):
    """A numerical routine could not bracket or converge."""


class NoRootError(NumericFailure):
    """A bracketed root search found no sign change."""
