"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Raised when an input value or series violates its domain."""


class InvalidLagError(InvalidInputError):
    """Raised when a lag is not in ``1..T-1`` for the series at hand."""


class IncompatibleFeaturesError(ValueError):
    """Raised when two feature sets were computed with different parameters."""


class InvalidSpecError(ValueError):
    """Raised for generator or scenario specifications that cannot be simulated."""


class InvalidConfigError(ValueError):
    """Raised for clustering or CLI configurations outside their domain."""


class IngestionError(ValueError):
    """Raised when a wind CSV has too many invalid rows or a broken header."""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = list(errors or [])
