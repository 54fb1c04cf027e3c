"""Synthetic data generation and the graph-clustering pipeline.

Synthetic benchmarks build X = U* U*^T + sigma * sym(|N|) with U* the
entrywise absolute value of a standard Gaussian matrix. The clustering
pipeline covers: planted-cluster similarity matrices (the desk-scale
stand-in for real image datasets), a self-tuning Gaussian-kernel similarity
builder for external feature CSVs, argmax label assignment from the learned
factor, and permutation-matched accuracy via optimal assignment.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateScale, InvalidProbabilities, LengthMismatch
from .matcore import SymmetricMatrix, make_symmetric

GAUSSIAN = "gaussian"
UNIFORM = "uniform"
LOGNORMAL = "lognormal"
NOISE_DISTS = (GAUSSIAN, UNIFORM, LOGNORMAL)

_SCALE_FLOOR = 1e-12


@dataclass
class SyntheticSpec:
    n: int
    r: int
    sigma: float = 0.0
    noise_dist: str = GAUSSIAN
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.noise_dist not in NOISE_DISTS:
            raise ValueError("unknown noise distribution %r" % self.noise_dist)


@dataclass
class ClusterProblem:
    similarity: SymmetricMatrix
    labels_true: np.ndarray
    k_classes: int


def gen_synthetic(spec: SyntheticSpec):
    """Generate (X, U*) with X = U* U*^T + sigma * (|N| + |N|^T) / 2.

    The noise matrix is symmetrized so X stays in the symmetric problem
    class; all three noise distributions yield entrywise nonnegative noise.
    """
    rng = np.random.default_rng(spec.seed)
    u_true = np.abs(rng.standard_normal((spec.n, spec.r)))
    x = u_true @ u_true.T
    if spec.sigma > 0:
        if spec.noise_dist == GAUSSIAN:
            noise = np.abs(rng.standard_normal((spec.n, spec.n)))
        elif spec.noise_dist == UNIFORM:
            noise = rng.uniform(0.0, 1.0, size=(spec.n, spec.n))
        else:
            noise = rng.lognormal(size=(spec.n, spec.n))
        x = x + spec.sigma * 0.5 * (noise + noise.T)
    return SymmetricMatrix(x), u_true


def gen_planted_clusters(n, k_classes, p_in, p_out, seed=0) -> ClusterProblem:
    """Block-structured similarity: within-class weights uniform on
    [max(p_in - 0.1, 0), p_in], cross-class uniform on [0, p_out], zero
    diagonal. Classes are balanced (sizes differ by at most one)."""
    if not (0 <= p_out < p_in <= 1):
        raise InvalidProbabilities(
            "need 0 <= p_out < p_in <= 1, got p_in=%r p_out=%r" % (p_in, p_out)
        )
    rng = np.random.default_rng(seed)
    labels = np.sort(np.arange(n) % k_classes)
    same = labels[:, None] == labels[None, :]
    within = rng.uniform(max(p_in - 0.1, 0.0), p_in, size=(n, n))
    cross = rng.uniform(0.0, p_out, size=(n, n))
    a = np.where(same, within, cross)
    a = np.triu(a, 1)
    a = a + a.T
    return ClusterProblem(similarity=SymmetricMatrix(a),
                          labels_true=labels, k_classes=k_classes)


def build_similarity(features, knn=7) -> SymmetricMatrix:
    """Self-tuning Gaussian-kernel similarity from an n-by-d feature array.

    A_ij = exp(-||f_i - f_j||^2 / (s_i s_j)) with s_i the distance to the
    knn-th nearest neighbor (floored at 1e-12 for duplicate points),
    sparsified to the mutual-kNN support, zero diagonal, then scaled as
    D^{-1/2} A D^{-1/2}.
    """
    f = np.asarray(features, dtype=np.float64)
    n = f.shape[0]
    if n < knn + 1:
        raise ValueError("need at least knn + 1 = %d points, got %d" % (knn + 1, n))
    sq = np.sum(f * f, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (f @ f.T), 0.0)
    order = np.argsort(d2, axis=1, kind="stable")
    # column 0 of `order` is the point itself (distance zero)
    kth = order[:, knn]
    scale = np.sqrt(d2[np.arange(n), kth])
    if np.any(scale == 0.0):
        scale = np.maximum(scale, _SCALE_FLOOR)
    if np.any(scale <= 0.0):
        raise DegenerateScale("non-positive kernel scale")

    a = np.exp(-d2 / np.outer(scale, scale))
    neigh = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), knn)
    neigh[rows, order[:, 1:knn + 1].ravel()] = True
    mutual = neigh & neigh.T
    a = np.where(mutual, a, 0.0)
    np.fill_diagonal(a, 0.0)
    deg = a.sum(axis=1)
    inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.maximum(deg, _SCALE_FLOOR)), 0.0)
    a = inv_sqrt[:, None] * a * inv_sqrt[None, :]
    a = 0.5 * (a + a.T)
    return make_symmetric(a)


def assign_labels(u):
    """Row-wise argmax over factor columns; ties break to the smallest
    column index. Labels are 0-based."""
    u = np.asarray(u, dtype=np.float64)
    return np.argmax(u, axis=1)


def clustering_accuracy(pred, truth):
    """Best agreement rate over all class-label permutations, via optimal
    assignment on the confusion matrix."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise LengthMismatch(
            "label shapes differ: %s vs %s" % (pred.shape, truth.shape)
        )
    pc = np.unique(pred)
    tc = np.unique(truth)
    if len(pc) > 64 or len(tc) > 64:
        raise ValueError("more than 64 classes")
    confusion = np.zeros((len(pc), len(tc)), dtype=np.int64)
    p_idx = np.searchsorted(pc, pred)
    t_idx = np.searchsorted(tc, truth)
    np.add.at(confusion, (p_idx, t_idx), 1)
    rows, cols = linear_sum_assignment(-confusion)
    return float(confusion[rows, cols].sum()) / pred.size
