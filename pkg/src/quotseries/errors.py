"""Exception types shared across the package."""


class QuotSeriesError(Exception):
    """Base class for all package errors."""


class SeriesPrecisionError(QuotSeriesError):
    """A coefficient beyond the tracked precision was requested."""


class LeadingCoefficientError(QuotSeriesError):
    """Division or inversion hit a non-invertible leading coefficient."""


class ConstantTermError(QuotSeriesError):
    """log/exp/fractional powers need a specific constant term."""


class ValuationError(QuotSeriesError):
    """Series reversion needs valuation exactly 1."""


class ReconstructionError(QuotSeriesError):
    """A series did not match the proposed rational-function shape."""


class RationalityError(QuotSeriesError):
    """A symmetric root expression failed to collapse to rational coefficients."""


class IntegrandPoleError(QuotSeriesError):
    """A localization factor is not invertible for the chosen weights."""


class SizeBoundError(QuotSeriesError):
    """Tree enumeration was asked for more vertices than the configured bound."""


class TableRangeError(QuotSeriesError):
    """A table lookup fell outside the precomputed range."""


class UnsupportedConfigurationError(QuotSeriesError):
    """No closed form is available for the requested combination."""


class WeightError(QuotSeriesError):
    """Equivariant weight vector violates the pairwise-difference rules."""
