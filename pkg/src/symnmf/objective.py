"""Penalized objective, gradients, penalty threshold, iterate bound,
projected-gradient KKT residual, and the normalized fitting error.

The penalized objective is

    g(U, V) = 0.5 * ||X - U V^T||_F^2 + (lambda / 2) * ||U - V||_F^2

over nonnegative factors. All public functions accept a SymmetricMatrix and
a FactorPair; the underscore-prefixed array versions are reused by the
solver loops.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroMatrix
from .matcore import SymmetricMatrix, FactorPair


@dataclass
class ObjectiveValue:
    fit: float       # 0.5 * ||X - U V^T||_F^2
    penalty: float   # (lambda / 2) * ||U - V||_F^2
    total: float


@dataclass
class KktResidual:
    per_factor_u: float
    per_factor_v: float
    total: float


def _check_dims(x, u, v):
    n = x.shape[0]
    if u.shape != v.shape or u.shape[0] != n:
        raise DimensionMismatch(
            "X is %s but factors are %s and %s" % (x.shape, u.shape, v.shape)
        )


def _eval_objective(x, u, v, lam):
    _check_dims(x, u, v)
    resid = x - u @ v.T
    fit = 0.5 * float(np.sum(resid * resid))
    d = u - v
    penalty = 0.5 * lam * float(np.sum(d * d))
    return fit, penalty


def eval_objective(x: SymmetricMatrix, w: FactorPair, lam) -> ObjectiveValue:
    """Evaluate fit, penalty, and total of the penalized objective."""
    fit, penalty = _eval_objective(x.entries, w.u.entries, w.v.entries, lam)
    return ObjectiveValue(fit=fit, penalty=penalty, total=fit + penalty)


def _grad_g(x, u, v, lam):
    _check_dims(x, u, v)
    e = u @ v.T - x
    d = u - v
    gu = e @ v + lam * d
    gv = e.T @ u - lam * d
    return gu, gv


def grad_g(x: SymmetricMatrix, w: FactorPair, lam):
    """Smooth-part gradient blocks (gu, gv) of the penalized objective.

    The nonnegativity subdifferential is handled by :func:`kkt_residual`.
    """
    return _grad_g(x.entries, w.u.entries, w.v.entries, lam)


def _projected_residual(factor, grad):
    # |grad| on strictly positive entries; max(-grad, 0) where the
    # constraint is active. This attains dist(0, grad + subdifferential)
    # exactly for the nonnegativity indicator.
    res = np.where(factor > 0, np.abs(grad), np.maximum(-grad, 0.0))
    return float(np.linalg.norm(res))


def _kkt_residual(x, u, v, lam):
    gu, gv = _grad_g(x, u, v, lam)
    ru = _projected_residual(u, gu)
    rv = _projected_residual(v, gv)
    return ru, rv


def kkt_residual(x: SymmetricMatrix, w: FactorPair, lam) -> KktResidual:
    """Projected-gradient measure of distance to a critical point."""
    ru, rv = _kkt_residual(x.entries, w.u.entries, w.v.entries, lam)
    return KktResidual(per_factor_u=ru, per_factor_v=rv,
                       total=float(np.hypot(ru, rv)))


def symmetric_kkt_residual(x, u):
    """Projected-gradient residual of the original symmetric problem
    0.5 * ||X - U U^T||_F^2 at a nonnegative U."""
    x = x.entries if isinstance(x, SymmetricMatrix) else np.asarray(x)
    grad = 2.0 * (u @ u.T - x) @ u
    return _projected_residual(u, grad)


def lambda_threshold(x: SymmetricMatrix, u0) -> float:
    """Penalty threshold: any fixed lambda strictly above this value makes
    all consensus guarantees apply for runs started at (u0, u0).

    Returns 0.5 * (||X||_2 + ||X - U0 U0^T||_F - sigma_min(X)).
    """
    u0 = np.asarray(u0, dtype=np.float64)
    if u0.shape[0] != x.n:
        raise DimensionMismatch("u0 has %d rows, X is %d" % (u0.shape[0], x.n))
    resid = float(np.linalg.norm(x.entries - u0 @ u0.T))
    return 0.5 * (x.spec_norm + resid - x.sigma_min)


def iterate_bound(x: SymmetricMatrix, u0, lam) -> float:
    """A-priori bound B0 on ||U_k||_F^2 + ||V_k||_F^2 along any descent
    sequence started at (u0, u0):

        B0 = (1/lambda + 2 sqrt(r)) ||X - U0 U0^T||_F^2 + 2 sqrt(r) ||X||_F
    """
    u0 = np.asarray(u0, dtype=np.float64)
    r = u0.shape[1]
    resid_sq = float(np.sum((x.entries - u0 @ u0.T) ** 2))
    return (1.0 / lam + 2.0 * np.sqrt(r)) * resid_sq + 2.0 * np.sqrt(r) * x.fro


def _fitting_error(x, u, x_fro_sq):
    resid = x - u @ u.T
    return float(np.sum(resid * resid)) / x_fro_sq


def fitting_error(x: SymmetricMatrix, u) -> float:
    """Normalized fitting error ||X - U U^T||_F^2 / ||X||_F^2."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape[0] != x.n:
        raise DimensionMismatch("u has %d rows, X is %d" % (u.shape[0], x.n))
    if x.fro == 0.0:
        raise ZeroMatrix("fitting error undefined for a zero matrix")
    return _fitting_error(x.entries, u, x.fro ** 2)
