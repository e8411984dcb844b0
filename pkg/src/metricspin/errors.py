"""Exception types shared across the package."""


class NumericalConsistencyError(RuntimeError):
    """A numerical invariant (Hermiticity, norm, energy drift) was violated."""


class ExtractionInvalidError(RuntimeError):
    """Coefficient extraction requested outside its validity range."""


class ConfigError(ValueError):
    """Bad, unknown or missing run-configuration key."""


class InsufficientDataError(ValueError):
    """A diagnostic was asked of a series too short to support it."""
