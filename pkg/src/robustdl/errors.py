"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(ValueError):
    """Array shapes are inconsistent."""


class IntegrityError(RuntimeError):
    """A structural invariant (e.g. unit-norm atoms) is violated."""
