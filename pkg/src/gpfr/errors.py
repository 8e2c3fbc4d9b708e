"""Exception taxonomy shared across the pipeline.

The CLI maps these onto exit codes: UsageError -> 1, data/file errors -> 2,
NumericError -> 3.
"""


class GpfrError(Exception):
    pass


class ConfigurationError(GpfrError):
    """Model or layer configuration is inconsistent (shape mismatch etc.)."""


class UsageError(GpfrError):
    """Caller violated an API contract (bad argument, missing cache, ...)."""


class SynthesisError(GpfrError):
    """A required repository bucket is empty even after fallback."""


class DataFormatError(GpfrError):
    """Base for on-disk format problems."""


class MalformedHeaderError(DataFormatError):
    pass


class TruncatedFileError(DataFormatError):
    pass


class ChecksumError(DataFormatError):
    pass


class NumericError(GpfrError):
    """Training diverged (non-finite loss or parameters)."""
