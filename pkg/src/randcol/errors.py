"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (bad vertex ids, wrong regularity, ...)."""


class CapacityError(ValueError):
    """Requested work exceeds a configured enumeration or size cap."""


class GenerationError(RuntimeError):
    """A randomised generator exhausted its rejection budget; retry with a new seed."""


class ConstructionError(RuntimeError):
    """A deterministic construction failed its internal audit (bug guard)."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine did not converge within its iteration cap."""
