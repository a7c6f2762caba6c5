# ========================
# src/compressive/exceptions.py
# ========================

"""
Toolkit Exceptions

Every error raised for bad input derives from ValueError, so callers that
only know the builtin still catch it.
"""


class CompressiveError(ValueError):
    """Base class for all toolkit errors."""


class InvalidDimensionsError(CompressiveError):
    """Matrix, signal or measurement shapes do not agree."""


class InvalidParameterError(CompressiveError):
    """A scalar parameter is outside its admissible range."""


class SolverDegenerateError(CompressiveError):
    """A least-squares subproblem inside a solver is rank deficient."""


class UndefinedMetricError(CompressiveError):
    """A recovery metric cannot be computed for the given ground truth."""


class InvalidDatasetError(CompressiveError):
    """A labeled dataset cannot produce class templates."""


class IncomparableHashError(CompressiveError):
    """Two perceptual hashes of different kinds were compared."""


class SingularDesignError(CompressiveError):
    """A regression design matrix is not of full column rank."""


class UnderDeterminedMaskError(CompressiveError):
    """A regression mask keeps too few rows to identify the coefficients."""


class FormatError(CompressiveError):
    """A file does not follow the expected on-disk format."""
