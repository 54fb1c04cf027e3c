"""The four iterative algorithms behind one solver interface.

* ``symanls``  -- alternating exact minimization over full factors; each
  subproblem is a ridge-regularized NNLS solved by block principal pivoting.
* ``symhals``  -- alternating closed-form column updates with an
  incrementally maintained residual.
* ``asymhals`` -- SymHALS with L inner column sweeps per factor per outer
  iteration (symhals is the L = 1 special case and shares its code path).
* ``pgd``      -- projected gradient baseline on the original single-factor
  problem, with Armijo backtracking.

``run`` owns the outer loop: stopping logic, penalty schedule updates,
trace recording, and per-iteration diagnostics (objective, sufficient
decrease, iterate norms) used by the verification suite.
"""

import csv
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import PivotLimitExceeded
from .matcore import Factor, FactorPair, SymmetricMatrix
from .nnls import NnlsProblem, pgd_fallback, solve_nnls
from .objective import _kkt_residual, iterate_bound
from .penalty import PenaltySchedule

SYMANLS = "symanls"
SYMHALS = "symhals"
ASYMHALS = "asymhals"
PGD = "pgd"
ALGORITHMS = (SYMANLS, SYMHALS, ASYMHALS, PGD)

CONVERGED = "Converged"
MAX_ITERS = "MaxIters"
DEGENERATE = "Degenerate"

_RESYNC_EVERY = 500  # full residual recompute, bounds incremental drift
_TINY = 1e-300
_EPS = float(np.finfo(np.float64).eps)

TRACE_FIELDS = ("k", "f_total", "f_fit", "f_penalty", "E", "consensus",
                "kkt", "lambda", "elapsed")


@dataclass
class SolverConfig:
    algorithm: str
    rank: int
    schedule: PenaltySchedule
    inner_loops: int = 2          # asymhals only
    max_iters: int = 30000
    tol_obj: float = 1e-10
    tol_consensus: float = 1e-8
    seed: int = 0
    record_every: int = 1
    max_pivots: int = 1000

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError("unknown algorithm %r" % self.algorithm)
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.inner_loops < 1:
            raise ValueError("inner_loops must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class TraceRecord:
    k: int
    f_total: float
    f_fit: float
    f_penalty: float
    E: float
    consensus: float
    kkt: float
    lam: float
    elapsed: float

    def as_row(self):
        return (self.k, self.f_total, self.f_fit, self.f_penalty, self.E,
                self.consensus, self.kkt, self.lam, self.elapsed)


@dataclass
class SolverResult:
    u_final: Factor
    v_final: Factor
    trace: list
    status: str
    b0: float
    iterations: int
    # per-iteration arrays (index 0 = first iteration): f_total, decrease,
    # dw_sq, inner_sq, norm_sq, lambda
    diagnostics: dict = field(default_factory=dict)


def init_factors(x: SymmetricMatrix, r, seed) -> FactorPair:
    """Seeded uniform [0, 1] initialization with V0 an exact copy of U0."""
    rng = np.random.default_rng(seed)
    u0 = np.asfortranarray(rng.uniform(0.0, 1.0, size=(x.n, r)))
    return FactorPair(Factor(u0), Factor(u0.copy(order="F")))


# ---------------------------------------------------------------------------
# single steps (arrays in, arrays updated in place where noted)

def _anls_half_step(x, fixed, lam, max_pivots):
    """Exact minimizer of the ridge-NNLS subproblem with one factor fixed.

    Rows are separable after forming the Gram matrix G = F^T F + lambda*I
    with right-hand sides ((X + lambda*I) F)^T.
    """
    r = fixed.shape[1]
    gram = fixed.T @ fixed + lam * np.eye(r)
    rhs = (x @ fixed + lam * fixed).T
    try:
        sol = solve_nnls(NnlsProblem(gram=gram, rhs=rhs, max_pivots=max_pivots))
    except PivotLimitExceeded:
        sol = pgd_fallback(gram, rhs)
    return np.asfortranarray(sol.T)


def step_symanls(x, u, v, lam, max_pivots=1000):
    """One SymANLS outer iteration: exact U-update, then exact V-update
    using the new U. Returns the new (u, v) pair."""
    u_new = _anls_half_step(x, v, lam, max_pivots)
    v_new = _anls_half_step(x, u_new, lam, max_pivots)
    return u_new, v_new


def step_symhals(x, u, v, lam, resid):
    """One SymHALS outer iteration, updating u, v, and resid in place.

    ``resid`` must equal X - U V^T on entry. Returns (du_sq, dv_sq), the
    squared Frobenius change of each factor."""
    du_sq = kernels.sweep_u(resid, u, v, lam)
    dv_sq = kernels.sweep_v(resid, u, v, lam)
    return du_sq, dv_sq


def step_asymhals(x, u, v, lam, resid, inner_loops):
    """One A-SymHALS outer iteration: L column sweeps over U with V fixed,
    then L sweeps over V with the new U fixed; in place.

    Returns (dw_sq, inner_sq): total squared change of (U, V) over the
    iteration and the sum of squared per-sweep changes."""
    u_start = u.copy(order="F")
    v_start = v.copy(order="F")
    inner_sq = 0.0
    for _ in range(inner_loops):
        inner_sq += kernels.sweep_u(resid, u, v, lam)
    for _ in range(inner_loops):
        inner_sq += kernels.sweep_v(resid, u, v, lam)
    dw_sq = float(np.sum((u - u_start) ** 2) + np.sum((v - v_start) ** 2))
    return dw_sq, inner_sq


def step_pgd(x, u, x_fro, h=None, armijo_c=1e-4):
    """One projected-gradient step on h(U) = 0.5||X - U U^T||_F^2 with
    backtracking from the local Lipschitz estimate. Returns (u_new, h_new)."""
    if h is None:
        d = x - u @ u.T
        h = 0.5 * float(np.sum(d * d))
    grad = 2.0 * (u @ u.T - x) @ u
    eta = 1.0 / (4.0 * float(np.sum(u * u)) + 2.0 * x_fro)
    while True:
        u_new = np.maximum(u - eta * grad, 0.0)
        d = x - u_new @ u_new.T
        h_new = 0.5 * float(np.sum(d * d))
        if h_new <= h + armijo_c * float(np.sum(grad * (u_new - u))):
            return np.asfortranarray(u_new), h_new
        eta *= 0.5
        if eta < 1e-30:  # flat to machine precision; stay put
            return np.asfortranarray(u.copy()), h


# ---------------------------------------------------------------------------
# outer loop

def run(x: SymmetricMatrix, cfg: SolverConfig) -> SolverResult:
    """Iterate the configured algorithm until convergence or max_iters.

    Converged means relative objective change < tol_obj AND relative
    consensus ||U - V||_F / ||V||_F < tol_consensus (the consensus criterion
    is vacuous for pgd). The adaptive penalty schedule advances once per
    outer iteration, after both factor blocks were updated.
    """
    xa = x.entries
    x_fro = x.fro
    x_fro_sq = x_fro ** 2
    schedule = cfg.schedule.copy()
    w0 = init_factors(x, cfg.rank, cfg.seed)
    b0 = iterate_bound(x, w0.u.entries, schedule.current)

    u = w0.u.entries
    v = w0.v.entries
    is_pgd = cfg.algorithm == PGD
    hals = cfg.algorithm in (SYMHALS, ASYMHALS)
    inner_loops = 1 if cfg.algorithm == SYMHALS else cfg.inner_loops

    resid = xa - u @ v.T
    fit = 0.5 * float(np.sum(resid * resid))
    cons_sq = 0.0

    t0 = time.perf_counter()
    trace = []
    diag = {key: [] for key in
            ("f_total", "decrease", "dw_sq", "inner_sq", "norm_sq", "lambda")}

    def record(k, lam):
        f_pen = 0.5 * lam * cons_sq
        e = float(np.sum((xa - u @ u.T) ** 2)) / x_fro_sq
        ru, rv = _kkt_residual(xa, u, v, lam)
        trace.append(TraceRecord(
            k=k, f_total=fit + f_pen, f_fit=fit, f_penalty=f_pen, E=e,
            consensus=float(np.sqrt(cons_sq)), kkt=float(np.hypot(ru, rv)),
            lam=lam, elapsed=time.perf_counter() - t0))

    record(0, schedule.current)
    status = MAX_ITERS
    k = 0
    recorded_last = True

    for k in range(1, cfg.max_iters + 1):
        lam = schedule.current
        f_prev = fit + 0.5 * lam * cons_sq
        inner_sq = 0.0

        if is_pgd:
            u_prev = u
            u, fit = step_pgd(xa, u, x_fro, h=fit)
            v = u
            dw_sq = float(np.sum((u - u_prev) ** 2))
        elif hals:
            dw_sq, inner_sq = step_asymhals(xa, u, v, lam, resid, inner_loops)
            if k % _RESYNC_EVERY == 0:
                resid = xa - u @ v.T
            fit = 0.5 * float(np.sum(resid * resid))
        else:
            u_prev, v_prev = u, v
            u, v = step_symanls(xa, u, v, lam, cfg.max_pivots)
            dw_sq = float(np.sum((u - u_prev) ** 2) + np.sum((v - v_prev) ** 2))
            resid = xa - u @ v.T
            fit = 0.5 * float(np.sum(resid * resid))

        cons_sq = 0.0 if is_pgd else float(np.sum((u - v) ** 2))
        f_new = fit + 0.5 * lam * cons_sq

        if not (np.isfinite(f_new) and np.all(np.isfinite(u))):
            status = DEGENERATE
            record(k, lam)
            recorded_last = True
            break

        diag["f_total"].append(f_new)
        diag["decrease"].append(f_prev - f_new)
        diag["dw_sq"].append(dw_sq)
        diag["inner_sq"].append(inner_sq)
        diag["norm_sq"].append(float(np.sum(u * u) + np.sum(v * v)))
        diag["lambda"].append(lam)

        recorded_last = k % cfg.record_every == 0
        if recorded_last:
            record(k, lam)

        v_norm = float(np.sqrt(np.sum(v * v)))
        # the objective is a sum of ~n^2 products, so its absolute accuracy
        # is ~eps * ||X||_F^2; at or below that floor, values and their
        # relative changes are machine noise and count as converged
        noise_floor = _EPS * x_fro_sq
        rel_obj = abs(f_prev - f_new) / max(f_prev, noise_floor, _TINY)
        obj_done = rel_obj < cfg.tol_obj or f_new < noise_floor
        rel_cons = float(np.sqrt(cons_sq)) / max(v_norm, _TINY)
        if obj_done and (is_pgd or rel_cons < cfg.tol_consensus):
            status = CONVERGED
            if not recorded_last:
                record(k, lam)
                recorded_last = True
            break

        schedule.update(FactorPair(Factor(u), Factor(v)))
    else:
        k = cfg.max_iters

    if not recorded_last:
        record(k, schedule.current)

    return SolverResult(
        u_final=Factor(u), v_final=Factor(v.copy(order="F")), trace=trace,
        status=status, b0=b0, iterations=k,
        diagnostics={key: np.asarray(val) for key, val in diag.items()})


# ---------------------------------------------------------------------------
# trace export

def write_trace_csv(path, trace):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_FIELDS)
        for rec in trace:
            writer.writerow(["%.17g" % x if isinstance(x, float) else x
                             for x in rec.as_row()])


def write_trace_json(path, trace, metadata):
    payload = {
        "metadata": metadata,
        "trace": [dict(zip(TRACE_FIELDS, rec.as_row())) for rec in trace],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
