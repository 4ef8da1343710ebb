"""Exception types raised across the package."""


class GaussepError(ValueError):
    """Base class for invalid input to a gaussep routine."""


class UnphysicalError(GaussepError):
    """Covariance matrix violates the uncertainty relation."""


class UnsupportedChannelError(GaussepError):
    """Channel falls outside the family a routine can handle."""


class NotStandardFormError(GaussepError):
    """Two-mode covariance matrix does not have the standard-form pattern."""


class DegenerateMarginalError(GaussepError):
    """A marginal variance is at (or below) the vacuum value."""
