"""Exception hierarchy shared by every module."""


class DualGameError(ValueError):
    """Base class for all package errors."""


class DimensionError(DualGameError):
    """Mismatched or oversized dimensions."""


class ShapeError(DualGameError):
    """Matrix has the wrong shape or structure (e.g. not Hermitian)."""


class StateError(DualGameError):
    """Invalid quantum state (norm, trace or positivity violated)."""


class ArgError(DualGameError):
    """Argument outside its allowed range."""


class DistError(DualGameError):
    """Invalid probability distribution or joint table."""


class ScenarioError(DualGameError):
    """A game scenario violates its invariants."""
