"""Lemma-level invariant suite behind ``symnmf verify``.

Each check runs on freshly generated random instances and reports pass/fail;
the CLI prints one line per check. The ``lambda_override`` hook (debug only)
executes solver steps with a corrupted penalty parameter while the
sufficient-decrease bound is still evaluated at the schedule's lambda, so a
zero override must fail that check (negative control).
"""

from dataclasses import dataclass

import numpy as np

from .bench import SyntheticSpec, gen_synthetic
from .errors import SymnmfError
from .nnls import NnlsProblem, oracle_nnls, solve_nnls
from .objective import _eval_objective, _kkt_residual, symmetric_kkt_residual
from .penalty import make_adaptive, make_fixed
from .solvers import (
    ASYMHALS,
    PGD,
    SYMANLS,
    SYMHALS,
    SolverConfig,
    init_factors,
    run,
    step_asymhals,
    step_symanls,
    step_symhals,
)

ALTERNATING = (SYMANLS, SYMHALS, ASYMHALS)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rand_spd(rng, r):
    a = rng.standard_normal((r, r))
    return a @ a.T + (0.05 + rng.uniform()) * np.eye(r)


def check_nnls_oracle(seeds, instances=200):
    rng = np.random.default_rng(seeds[0])
    worst = 0.0
    for _ in range(instances):
        r = int(rng.integers(1, 7))
        m = int(rng.integers(1, 5))
        gram = _rand_spd(rng, r)
        rhs = rng.standard_normal((r, m))
        if rng.uniform() < 0.2 and m > 1:
            rhs[:, 1] = rhs[:, 0]  # duplicate columns
        if rng.uniform() < 0.1:
            rhs[:, 0] = 0.0
        p = NnlsProblem(gram=gram, rhs=rhs)
        got = solve_nnls(p)
        want = oracle_nnls(p)
        worst = max(worst, float(np.max(np.abs(got - want))))
    return CheckResult("nnls_oracle_equivalence", worst <= 1e-8,
                       "max entry deviation %.3e over %d instances" % (worst, instances))


def check_monotonicity(seeds, n=25, r=3, iters=300):
    worst = 0.0
    for seed in seeds:
        x, _ = gen_synthetic(SyntheticSpec(n=n, r=r, sigma=0.1, seed=seed))
        for algo in ALTERNATING + (PGD,):
            cfg = SolverConfig(algorithm=algo, rank=r, schedule=make_adaptive(1e-5),
                               max_iters=iters, seed=seed, record_every=iters)
            res = run(x, cfg)
            f0 = res.diagnostics["f_total"][0] if len(res.diagnostics["f_total"]) else 1.0
            if len(res.diagnostics["decrease"]):
                worst = max(worst, float(-res.diagnostics["decrease"].min()) / max(f0, 1e-300))
    return CheckResult("monotone_descent", worst <= 1e-12,
                       "worst relative objective increase %.3e" % worst)


def check_sufficient_decrease(seeds, lambda_override=None, n=20, r=3, steps=50):
    """Per-step decrease >= (lambda/2)||dW||^2 for SymANLS/SymHALS and
    >= (lambda/4L)(||dW||^2 + inner sums) for A-SymHALS."""
    inner_loops = 2
    worst = -np.inf
    failed = False
    detail = ""
    for seed in seeds:
        x, _ = gen_synthetic(SyntheticSpec(n=n, r=r, sigma=0.1, seed=seed))
        w0 = init_factors(x, r, seed)
        lam_check = make_fixed(x, w0.u.entries).current
        lam_exec = lam_check if lambda_override is None else lambda_override
        tol = 1e-10 * _eval_objective(x.entries, w0.u.entries, w0.v.entries,
                                      lam_check)[0]
        for algo in ALTERNATING:
            u = w0.u.entries.copy(order="F")
            v = w0.v.entries.copy(order="F")
            resid = x.entries - u @ v.T
            try:
                for _ in range(steps):
                    fb = sum(_eval_objective(x.entries, u, v, lam_check))
                    if algo == SYMANLS:
                        u_new, v_new = step_symanls(x.entries, u, v, lam_exec)
                        dw_sq = float(np.sum((u_new - u) ** 2) + np.sum((v_new - v) ** 2))
                        u, v = u_new, v_new
                        bound = 0.5 * lam_check * dw_sq
                    elif algo == SYMHALS:
                        du, dv = step_symhals(x.entries, u, v, lam_exec, resid)
                        bound = 0.5 * lam_check * (du + dv)
                    else:
                        dw_sq, inner = step_asymhals(x.entries, u, v, lam_exec,
                                                     resid, inner_loops)
                        bound = lam_check / (4.0 * inner_loops) * (dw_sq + inner)
                    fa = sum(_eval_objective(x.entries, u, v, lam_check))
                    gap = (fb - fa) - bound
                    worst = max(worst, -gap)
                    if gap < -tol:
                        failed = True
                        detail = "%s violated by %.3e (seed %d)" % (algo, -gap, seed)
            except SymnmfError as e:
                failed = True
                detail = "%s raised %s" % (algo, type(e).__name__)
            except (ZeroDivisionError, FloatingPointError) as e:
                failed = True
                detail = "%s raised %s" % (algo, type(e).__name__)
    if not failed:
        detail = "holds for %d steps x %d algorithms x %d seeds" % (
            steps, len(ALTERNATING), len(seeds))
    return CheckResult("sufficient_decrease", not failed, detail)


def check_iterate_bound(seeds, n=25, r=3, iters=500):
    worst = 0.0
    for seed in seeds:
        x, _ = gen_synthetic(SyntheticSpec(n=n, r=r, sigma=0.1, seed=seed))
        w0 = init_factors(x, r, seed)
        sched = make_fixed(x, w0.u.entries)
        for algo in ALTERNATING:
            cfg = SolverConfig(algorithm=algo, rank=r, schedule=sched,
                               max_iters=iters, seed=seed, record_every=iters)
            res = run(x, cfg)
            if len(res.diagnostics["norm_sq"]):
                worst = max(worst, float(res.diagnostics["norm_sq"].max()) / res.b0)
    return CheckResult("iterate_bound", worst <= 1.0,
                       "max (||U||^2+||V||^2)/B0 = %.6f" % worst)


def check_consensus_and_kkt(seeds, n=25, r=3, max_iters=20000):
    worst_cons = 0.0
    worst_kkt = 0.0
    worst_sym = 0.0
    for seed in seeds:
        for sigma in (0.0, 0.1):
            x, _ = gen_synthetic(SyntheticSpec(n=n, r=r, sigma=sigma, seed=seed))
            w0 = init_factors(x, r, seed)
            sched = make_fixed(x, w0.u.entries)
            for algo in (SYMANLS, SYMHALS):
                cfg = SolverConfig(algorithm=algo, rank=r, schedule=sched,
                                   max_iters=max_iters, seed=seed,
                                   record_every=max_iters)
                res = run(x, cfg)
                u = res.u_final.entries
                v = res.v_final.entries
                cons = np.linalg.norm(u - v) / max(np.linalg.norm(v), 1e-300)
                ru, rv = _kkt_residual(x.entries, u, v, sched.current)
                kkt = np.hypot(ru, rv) / (1.0 + x.fro)
                sym = symmetric_kkt_residual(x, u) / (1.0 + x.fro)
                worst_cons = max(worst_cons, cons)
                worst_kkt = max(worst_kkt, kkt)
                worst_sym = max(worst_sym, sym)
    cons_ok = worst_cons < 1e-6
    kkt_ok = worst_kkt < 1e-6 and worst_sym < 1e-5
    return [
        CheckResult("consensus", cons_ok,
                    "worst final ||U-V||_F/||V||_F = %.3e" % worst_cons),
        CheckResult("kkt_criticality", kkt_ok,
                    "worst penalized %.3e, symmetric %.3e (scaled)" %
                    (worst_kkt, worst_sym)),
    ]


def run_suite(seeds=(0,), lambda_override=None):
    seeds = tuple(seeds)
    results = [
        check_nnls_oracle(seeds),
        check_monotonicity(seeds),
        check_sufficient_decrease(seeds, lambda_override=lambda_override),
        check_iterate_bound(seeds),
    ]
    results.extend(check_consensus_and_kkt(seeds))
    return results
