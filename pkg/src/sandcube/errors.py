"""Exception types shared across the package."""


class OutOfDomainError(ValueError):
    """A point lies outside the cube or the fundamental domain, or an index is out of range."""


class UnsupportedDomainError(ValueError):
    """Operation not defined for this domain (e.g. the run-index scan needs M >= 2)."""


class BackgroundTooLargeError(ValueError):
    """Initial chip count violates the standing bound s0 <= 2*(2d) - 1."""


class BudgetExhaustedError(RuntimeError):
    """Step budget ran out before the requested condition was reached."""


class CorruptCheckpointError(Exception):
    """Checkpoint file failed magic, version, or length validation."""


class PaletteOverflowError(ValueError):
    """A normalized pixel value falls outside the 16-entry palette."""
