"""Exception types shared across the toolkit.

Everything derives from :class:`MtqeError` so callers (and the CLI) can
distinguish data/usage problems from numerical failures.
"""


class MtqeError(Exception):
    """Base class for all toolkit errors."""


class DataError(MtqeError):
    """Malformed or inconsistent input data."""


class LengthMismatch(DataError):
    """Two parallel inputs do not have the same number of items."""


class EmptyReference(DataError):
    """A reference sentence is empty; HTER is undefined (zero denominator)."""


class RaggedRows(DataError):
    """A tabular file has rows with differing column counts."""


class NonNumericCell(DataError):
    """A feature/label cell could not be parsed as a finite number."""


class TooFewRows(DataError):
    """Not enough rows for the requested operation."""


class TooFewSamples(DataError):
    """Not enough samples for a statistically meaningful computation."""


class DimensionMismatch(DataError):
    """Array dimensions are inconsistent with the model or scaler."""


class MissingLabels(DataError):
    """The dataset lacks the label columns required by the model variant."""


class ZeroVariance(DataError):
    """A correlation was requested against a constant vector."""


class ConfigError(MtqeError):
    """Invalid or inconsistent configuration."""


class NumericalError(MtqeError):
    """Numerical failure (divergence, non-finite values) during training."""


class NonFiniteLoss(NumericalError):
    """Training loss became NaN or infinite."""


class NonFiniteInput(NumericalError):
    """Inputs contain NaN or infinite values."""
