"""Hot inner loops of the HALS-family sweeps.

Two interchangeable implementations: a numba ``@njit`` version and a pure
numpy one. The active backend is picked at import time from the
``SYMNMF_BACKEND`` environment variable (``numba`` or ``numpy``); default is
numba when importable, numpy otherwise.

Both sweeps maintain the residual R = X - U V^T in place and update the
target factor's columns in place. The closed-form column update is

    u_i <- max((Xbar + lambda*I) v_i / (||v_i||^2 + lambda), 0)

with Xbar the residual excluding column i's rank-1 term; the two rank-1
residual touches per column are fused into a single update with u_new - u_old.
"""

import os

import numpy as np

_requested = os.environ.get("SYMNMF_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError("SYMNMF_BACKEND must be 'numba' or 'numpy', got %r" % _requested)


def _sweep_u_numpy(resid, u, v, lam):
    """One column sweep over U with V fixed; returns sum ||du_i||^2."""
    r = u.shape[1]
    moved = 0.0
    for i in range(r):
        vi = v[:, i]
        ui = u[:, i]
        vv = vi @ vi
        numer = resid @ vi + vv * ui + lam * vi
        new = np.maximum(numer / (vv + lam), 0.0)
        du = new - ui
        resid -= np.outer(du, vi)
        u[:, i] = new
        moved += du @ du
    return moved


def _sweep_v_numpy(resid, u, v, lam):
    """One column sweep over V with U fixed; returns sum ||dv_i||^2."""
    r = v.shape[1]
    moved = 0.0
    for i in range(r):
        ui = u[:, i]
        vi = v[:, i]
        uu = ui @ ui
        numer = resid.T @ ui + uu * vi + lam * ui
        new = np.maximum(numer / (uu + lam), 0.0)
        dv = new - vi
        resid -= np.outer(ui, dv)
        v[:, i] = new
        moved += dv @ dv
    return moved


_HAS_NUMBA = False
_sweep_u_numba = None
_sweep_v_numba = None

if _requested != "numpy":
    try:
        from numba import njit

        @njit(cache=True)
        def _sweep_u_numba(resid, u, v, lam):  # noqa: F811
            n, r = u.shape
            moved = 0.0
            for i in range(r):
                vv = 0.0
                for k in range(n):
                    vv += v[k, i] * v[k, i]
                denom = vv + lam
                for j in range(n):
                    acc = 0.0
                    for k in range(n):
                        acc += resid[j, k] * v[k, i]
                    new = (acc + vv * u[j, i] + lam * v[j, i]) / denom
                    if new < 0.0:
                        new = 0.0
                    du = new - u[j, i]
                    u[j, i] = new
                    moved += du * du
                    if du != 0.0:
                        for k in range(n):
                            resid[j, k] -= du * v[k, i]
            return moved

        @njit(cache=True)
        def _sweep_v_numba(resid, u, v, lam):  # noqa: F811
            n, r = v.shape
            moved = 0.0
            for i in range(r):
                uu = 0.0
                for k in range(n):
                    uu += u[k, i] * u[k, i]
                denom = uu + lam
                for j in range(n):
                    acc = 0.0
                    for k in range(n):
                        acc += resid[k, j] * u[k, i]
                    new = (acc + uu * v[j, i] + lam * u[j, i]) / denom
                    if new < 0.0:
                        new = 0.0
                    dv = new - v[j, i]
                    v[j, i] = new
                    moved += dv * dv
                    if dv != 0.0:
                        for k in range(n):
                            resid[k, j] -= u[k, i] * dv
            return moved

        _HAS_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise

if _requested == "numba" and not _HAS_NUMBA:
    raise ImportError("SYMNMF_BACKEND=numba but numba is not installed")

BACKEND = "numba" if (_HAS_NUMBA and _requested != "numpy") else "numpy"

if BACKEND == "numba":
    sweep_u = _sweep_u_numba
    sweep_v = _sweep_v_numba
else:
    sweep_u = _sweep_u_numpy
    sweep_v = _sweep_v_numpy

sweep_u_numpy = _sweep_u_numpy
sweep_v_numpy = _sweep_v_numpy
sweep_u_numba = _sweep_u_numba
sweep_v_numba = _sweep_v_numba


def active_backend():
    return BACKEND
