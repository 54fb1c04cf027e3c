"""Exception types shared across the toolkit."""


class SymnmfError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(SymnmfError):
    """Operand shapes are incompatible."""


class NotSymmetric(SymnmfError):
    """Input matrix is not symmetric within tolerance."""


class NumericalError(SymnmfError):
    """An underlying numerical routine (e.g. eigensolver) failed."""


class ZeroMatrix(SymnmfError):
    """Operation undefined for an all-zero matrix."""


class PivotLimitExceeded(SymnmfError):
    """Block principal pivoting exceeded its iteration cap."""


class NotPositiveDefinite(SymnmfError):
    """Gram matrix passed to the NNLS solver is not positive definite."""


class RankTooLarge(SymnmfError):
    """Exhaustive NNLS oracle limited to small ranks."""


class DegenerateFactors(SymnmfError):
    """Adaptive penalty update undefined: factor inner product is zero."""


class NonPositiveLambda(SymnmfError):
    """Penalty parameter must be strictly positive."""


class InvalidProbabilities(SymnmfError):
    """Planted-cluster edge probabilities out of range."""


class LengthMismatch(SymnmfError):
    """Label vectors have different lengths."""


class DegenerateScale(SymnmfError):
    """Self-tuning kernel scale collapsed to zero."""
