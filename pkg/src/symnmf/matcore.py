"""Dense matrix primitives: symmetric-matrix container, factors, spectral
quantities, and plain-text / CSV matrix I/O.

Everything here is desk scale (n up to a few thousand), dense, double
precision. Spectral quantities come from a full symmetric eigendecomposition.
"""

import numpy as np

from .errors import DimensionMismatch, NotSymmetric, NumericalError

SYMMETRY_RTOL = 1e-12


class SymmetricMatrix:
    """Dense symmetric n-by-n matrix with lazily cached spectral quantities.

    Use :func:`make_symmetric` to construct from raw data with validation.
    """

    def __init__(self, entries):
        a = np.array(entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch("expected a square matrix, got shape %s" % (a.shape,))
        self.entries = a
        self.n = a.shape[0]
        self._fro = None
        self._spec = None
        self._sigma_min = None

    @property
    def fro(self):
        """Frobenius norm, computed once on first access."""
        if self._fro is None:
            self._fro = float(np.linalg.norm(self.entries))
        return self._fro

    @property
    def spec_norm(self):
        """Largest singular value (= largest absolute eigenvalue)."""
        if self._spec is None:
            self._eig()
        return self._spec

    @property
    def sigma_min(self):
        """Smallest signed eigenvalue; may be negative."""
        if self._sigma_min is None:
            self._eig()
        return self._sigma_min

    def _eig(self):
        try:
            w = np.linalg.eigvalsh(self.entries)
        except np.linalg.LinAlgError as e:
            raise NumericalError("symmetric eigendecomposition failed: %s" % e)
        if not np.all(np.isfinite(w)):
            raise NumericalError("eigendecomposition returned non-finite values")
        self._spec = float(np.max(np.abs(w)))
        self._sigma_min = float(w[0])


def make_symmetric(raw):
    """Validate and wrap a raw square array as a SymmetricMatrix.

    Rejects input whose asymmetry exceeds ``1e-12 * ||raw||_F``.
    """
    a = np.asarray(raw, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("expected a square matrix, got shape %s" % (a.shape,))
    fro = np.linalg.norm(a)
    asym = np.max(np.abs(a - a.T)) if a.size else 0.0
    if asym > SYMMETRY_RTOL * fro:
        raise NotSymmetric(
            "max asymmetry %.3e exceeds tolerance %.3e" % (asym, SYMMETRY_RTOL * fro)
        )
    return SymmetricMatrix(a)


def spectral_extremes(x):
    """Return ``(spec_norm, sigma_min)`` of a SymmetricMatrix."""
    return x.spec_norm, x.sigma_min


class Factor:
    """Nonnegative n-by-r factor. Storage is column major: HALS touches
    columns as contiguous vectors."""

    def __init__(self, entries):
        a = np.asfortranarray(entries, dtype=np.float64)
        if a.ndim != 2:
            raise DimensionMismatch("factor must be a 2-d array")
        if a.size and a.min() < 0:
            raise ValueError("factor entries must be nonnegative")
        self.entries = a
        self.n, self.r = a.shape

    def copy(self):
        return Factor(self.entries.copy(order="F"))


class FactorPair:
    """The joint variable W = (U, V) the penalized solvers iterate on."""

    def __init__(self, u, v):
        if not isinstance(u, Factor):
            u = Factor(u)
        if not isinstance(v, Factor):
            v = Factor(v)
        if u.n != v.n or u.r != v.r:
            raise DimensionMismatch(
                "factor shapes differ: %s vs %s" % ((u.n, u.r), (v.n, v.r))
            )
        self.u = u
        self.v = v

    def copy(self):
        return FactorPair(self.u.copy(), self.v.copy())


# ---------------------------------------------------------------------------
# gemm family (thin wrappers over numpy with explicit dimension checks)

def multiply(a, b):
    """Matrix product a @ b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch("cannot multiply %s by %s" % (a.shape, b.shape))
    return a @ b


def transpose_multiply(a, b):
    """Matrix product a.T @ b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch("cannot multiply %s.T by %s" % (a.shape, b.shape))
    return a.T @ b


def rank1_update(a, u, v, alpha=1.0):
    """In-place rank-1 update ``a += alpha * outer(u, v)``."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if a.shape != (u.size, v.size):
        raise DimensionMismatch(
            "rank-1 update shape %s incompatible with vectors %d, %d"
            % (a.shape, u.size, v.size)
        )
    a += alpha * np.outer(u, v)
    return a


def fro_inner(a, b):
    """Frobenius inner product <a, b>."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch("shapes differ: %s vs %s" % (a.shape, b.shape))
    return float(np.sum(a * b))


def fro_norm(a):
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64)))


# ---------------------------------------------------------------------------
# Matrix I/O: plain-text dense ("n m" header, then rows) and headerless CSV.
# Both round-trip float64 exactly via 17 significant digits.

def save_dense_text(path, a):
    a = np.asarray(a, dtype=np.float64)
    with open(path, "w") as fh:
        fh.write("%d %d\n" % a.shape)
        for row in a:
            fh.write(" ".join("%.17g" % x for x in row) + "\n")


def load_dense_text(path):
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("expected 'n m' header in %s" % path)
        n, m = int(header[0]), int(header[1])
        data = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    if data.shape != (n, m):
        raise DimensionMismatch(
            "header says %dx%d but body is %s" % (n, m, (data.shape,))
        )
    return data


def save_csv(path, a):
    a = np.asarray(a, dtype=np.float64)
    with open(path, "w") as fh:
        for row in a:
            fh.write(",".join("%.17g" % x for x in row) + "\n")


def load_csv(path):
    return np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
