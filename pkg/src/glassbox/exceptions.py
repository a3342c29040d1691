"""Exception types shared across the library.

The command line front end maps these onto exit codes, so library code
should prefer them over bare ValueError when a failure is part of the
documented contract.
"""


class GlassboxError(Exception):
    """Base class for all errors raised by this package."""


class DataFormatError(GlassboxError):
    """A CSV or other input file could not be parsed."""


class ConfigError(GlassboxError):
    """A hyperparameter or option value is out of its legal range."""


class DimensionMismatchError(GlassboxError):
    """Input shapes are inconsistent with each other or with a model."""


class ModelFormatError(GlassboxError):
    """A serialized model document is malformed or has the wrong kind."""


class RankDeficiencyError(GlassboxError):
    """A least-squares design matrix is numerically rank deficient.

    Attributes
    ----------
    dependent : tuple of str
        Names of the columns flagged as linearly dependent on the rest.
    """

    def __init__(self, message, dependent=()):
        super().__init__(message)
        self.dependent = tuple(dependent)


class NumericalError(GlassboxError):
    """A numerical procedure cannot produce a well-defined result."""
