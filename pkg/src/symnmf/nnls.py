"""Nonnegative least squares in Gram form via block principal pivoting.

Each column z of the solution minimizes 0.5 z^T G z - z^T q subject to
z >= 0, with G symmetric positive definite (the ridge lambda*I is always
folded in by the caller). Columns are solved simultaneously; columns sharing
a passive set are batched into one linear solve.

The pivoting rule is the standard full exchange with a per-column backup
counter: when the infeasibility count fails to decrease, a few more full
exchanges are allowed, after which only the infeasible variable of largest
index is exchanged. This prevents cycling. If the pivot cap is exceeded the
caller falls back to projected gradient descent on the subproblem
(:func:`pgd_fallback`).
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    PivotLimitExceeded,
    RankTooLarge,
)

KKT_TOL = 1e-10
_BACKUP_EXCHANGES = 3


@dataclass
class NnlsProblem:
    gram: np.ndarray      # r x r, SPD
    rhs: np.ndarray       # r x m, one column per NNLS instance
    max_pivots: int = 1000

    def __post_init__(self):
        self.gram = np.asarray(self.gram, dtype=np.float64)
        self.rhs = np.asarray(self.rhs, dtype=np.float64)
        if self.rhs.ndim == 1:
            self.rhs = self.rhs[:, None]
        if self.gram.ndim != 2 or self.gram.shape[0] != self.gram.shape[1]:
            raise DimensionMismatch("gram must be square")
        if self.rhs.shape[0] != self.gram.shape[0]:
            raise DimensionMismatch(
                "rhs has %d rows, gram is %d" % (self.rhs.shape[0], self.gram.shape[0])
            )
        if self.max_pivots < 1:
            raise ValueError("max_pivots must be >= 1")


def _solve_passive(gram, rhs, passive):
    """Solve G_FF z_F = q_F for every column, batching identical passive sets.

    Returns z (active entries zero) and y = G z - q.
    """
    r, m = rhs.shape
    z = np.zeros((r, m))
    # group columns by passive pattern
    patterns, inverse = np.unique(passive, axis=1, return_inverse=True)
    for p in range(patterns.shape[1]):
        cols = np.nonzero(inverse == p)[0]
        idx = np.nonzero(patterns[:, p])[0]
        if idx.size == 0:
            continue
        sub = gram[np.ix_(idx, idx)]
        try:
            sol = np.linalg.solve(sub, rhs[np.ix_(idx, cols)])
        except np.linalg.LinAlgError as e:
            raise NotPositiveDefinite("passive-set solve failed: %s" % e)
        z[np.ix_(idx, cols)] = sol
    y = gram @ z - rhs
    return z, y


def solve_nnls(p: NnlsProblem) -> np.ndarray:
    """Solve every column of the Gram-form NNLS problem exactly.

    The returned array satisfies the KKT system to ``1e-10`` per entry.
    Raises PivotLimitExceeded if the pivot loop does not terminate within
    ``p.max_pivots`` rounds.
    """
    gram, rhs = p.gram, p.rhs
    r, m = rhs.shape
    scale = max(1.0, float(np.max(np.abs(rhs))), float(np.max(np.abs(gram))))
    tol = 1e-12 * scale

    passive = np.zeros((r, m), dtype=bool)
    z = np.zeros((r, m))
    y = -rhs.copy()
    alpha = np.full(m, _BACKUP_EXCHANGES)
    beta = np.full(m, r + 1)

    for _ in range(p.max_pivots):
        bad_z = passive & (z < -tol)
        bad_y = (~passive) & (y < -tol)
        ninf = bad_z.sum(axis=0) + bad_y.sum(axis=0)
        if not ninf.any():
            z[~passive] = 0.0
            np.maximum(z, 0.0, out=z)
            return z
        for j in np.nonzero(ninf)[0]:
            if ninf[j] < beta[j]:
                beta[j] = ninf[j]
                alpha[j] = _BACKUP_EXCHANGES
                flip = bad_z[:, j] | bad_y[:, j]
            elif alpha[j] >= 1:
                alpha[j] -= 1
                flip = bad_z[:, j] | bad_y[:, j]
            else:
                # single exchange: largest-index infeasible variable only
                k = np.nonzero(bad_z[:, j] | bad_y[:, j])[0][-1]
                flip = np.zeros(r, dtype=bool)
                flip[k] = True
            passive[:, j] ^= flip
        z, y = _solve_passive(gram, rhs, passive)

    raise PivotLimitExceeded("no KKT point within %d pivot rounds" % p.max_pivots)


def pgd_fallback(gram, rhs, kkt_tol=KKT_TOL, max_iters=200000):
    """Projected gradient on the Gram-form subproblem with Lipschitz step
    1/||G||_2; used when block pivoting hits its cap."""
    gram = np.asarray(gram, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    step = 1.0 / np.linalg.norm(gram, 2)
    z = np.maximum(rhs, 0.0) * step
    for _ in range(max_iters):
        y = gram @ z - rhs
        res = np.where(z > 0, np.abs(y), np.maximum(-y, 0.0))
        if res.max() <= kkt_tol:
            break
        z = np.maximum(z - step * y, 0.0)
    return z


def oracle_nnls(p: NnlsProblem) -> np.ndarray:
    """Exact optimum by exhaustive enumeration of the 2^r active sets.

    Test oracle only; refuses r > 12.
    """
    gram, rhs = p.gram, p.rhs
    r, m = rhs.shape
    if r > 12:
        raise RankTooLarge("oracle limited to r <= 12, got %d" % r)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(rhs))), float(np.max(np.abs(gram))))
    out = np.zeros((r, m))
    for j in range(m):
        q = rhs[:, j]
        best = None
        best_obj = np.inf
        for mask in product([False, True], repeat=r):
            idx = np.nonzero(mask)[0]
            z = np.zeros(r)
            if idx.size:
                try:
                    z[idx] = np.linalg.solve(gram[np.ix_(idx, idx)], q[idx])
                except np.linalg.LinAlgError:
                    continue
            if z.min() < -tol:
                continue
            y = gram @ z - q
            if np.min(y) < -tol:
                continue
            obj = 0.5 * z @ gram @ z - z @ q
            if obj < best_obj:
                best_obj = obj
                best = np.maximum(z, 0.0)
        if best is None:
            raise NotPositiveDefinite("no feasible KKT point found (column %d)" % j)
        out[:, j] = best
    return out
