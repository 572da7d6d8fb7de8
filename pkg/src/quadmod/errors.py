"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(RuntimeError):
    """An iterative method failed to reach its tolerance."""


class NumericalOverflow(OverflowError):
    """The result is not representable in double precision."""


class UnderResolvedError(ValueError):
    """A grid is too coarse to resolve a boundary feature."""


class SandwichViolation(AssertionError):
    """Numerical moduli break the ordering lower <= value <= upper."""
