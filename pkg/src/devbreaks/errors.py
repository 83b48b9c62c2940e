"""Exceptions shared across the pipeline."""


class IngestError(ValueError):
    """An input file cannot be read or parsed as the declared format."""


class CacheError(ValueError):
    """A timeline cache is missing, corrupted, or has an incompatible version."""


class ConsistencyError(RuntimeError):
    """A derived artifact violates an internal invariant."""
