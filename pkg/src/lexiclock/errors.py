"""Exception types raised across the package.

Everything derives from :class:`LexiclockError` so callers (the CLI in
particular) can catch domain failures without swallowing programming errors.
"""


class LexiclockError(ValueError):
    """Base class for domain errors."""


class BandCollapseError(LexiclockError):
    """The 95% band of a statistic reaches zero: the statistic is uninformative."""


class ExtinctStatisticError(LexiclockError):
    """Observed statistic is at or below zero, so no common ancestor is detectable."""


class InsufficientPairsError(LexiclockError):
    """Too few language pairs (or word pairs) to form an average."""


class SaturationError(LexiclockError):
    """Averaged signal is non-positive and its logarithm is undefined."""


class DatasetError(LexiclockError):
    """Malformed or inconsistent input files."""
