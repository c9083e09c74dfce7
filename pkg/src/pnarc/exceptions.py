"""Exception types shared across the package."""


class PnarcError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(PnarcError, ValueError):
    """A constructor or operation argument violates its contract."""


class NonConvergenceError(PnarcError, RuntimeError):
    """Relaxation failed to settle within the iteration budget."""

    def __init__(self, message, field_step=None):
        super().__init__(message)
        self.field_step = field_step


class InputRangeError(PnarcError, ValueError):
    """Input sample lies outside the encoder's declared range."""


class InsufficientHistoryError(PnarcError, ValueError):
    """Requested a mixed state at a time index with fewer than h past embeddings."""


class LevelCodeError(PnarcError, ValueError):
    """Embedding value not representable in the declared level set."""


class StoreFormatError(PnarcError, ValueError):
    """Malformed embedding-store bytes."""


class DegenerateBatchError(PnarcError, ValueError):
    """Correlation is undefined: a constant target or output vector."""


class TrainingDivergedError(PnarcError, RuntimeError):
    """Loss became non-finite during training."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class SeriesInstabilityError(PnarcError, RuntimeError):
    """Generated series blew up (|y| beyond the sanity bound)."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class DimensionMismatchError(PnarcError, ValueError):
    """Array dimensions do not line up with the bound model or geometry."""


class DegenerateStatesError(PnarcError, ValueError):
    """Reservoir quality metrics need non-constant state coordinates."""
