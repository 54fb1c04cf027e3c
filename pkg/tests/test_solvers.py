import csv
import json

import numpy as np
import pytest

from symnmf.bench import SyntheticSpec, gen_synthetic
from symnmf.penalty import make_adaptive, make_fixed
from symnmf.solvers import (
    ALGORITHMS,
    CONVERGED,
    MAX_ITERS,
    TRACE_FIELDS,
    SolverConfig,
    init_factors,
    run,
    step_pgd,
    step_symanls,
    step_symhals,
    write_trace_csv,
    write_trace_json,
)


def _small_problem(seed=0, n=20, r=3, sigma=0.0):
    x, _ = gen_synthetic(SyntheticSpec(n=n, r=r, sigma=sigma, seed=seed))
    return x


def test_init_deterministic_and_consensus():
    x = _small_problem()
    w1 = init_factors(x, 3, 7)
    w2 = init_factors(x, 3, 7)
    assert np.array_equal(w1.u.entries, w2.u.entries)
    assert np.array_equal(w1.u.entries, w1.v.entries)
    assert w1.u.entries is not w1.v.entries
    w3 = init_factors(x, 3, 8)
    assert not np.array_equal(w1.u.entries, w3.u.entries)
    assert w1.u.entries.min() >= 0.0 and w1.u.entries.max() <= 1.0


def test_config_validation():
    sched = make_adaptive()
    with pytest.raises(ValueError):
        SolverConfig(algorithm="bogus", rank=2, schedule=sched)
    with pytest.raises(ValueError):
        SolverConfig(algorithm="symhals", rank=0, schedule=sched)
    with pytest.raises(ValueError):
        SolverConfig(algorithm="asymhals", rank=2, schedule=sched, inner_loops=0)
    with pytest.raises(ValueError):
        SolverConfig(algorithm="symhals", rank=2, schedule=sched, record_every=0)


def test_exact_critical_point_is_fixed():
    # X = u u^T with u > 0; U = V = u is a critical point of every update
    u = np.asfortranarray([[1.0], [2.0], [0.5]])
    x = np.outer(u, u)
    lam = 2.0

    u1, v1 = step_symanls(x, u.copy(order="F"), u.copy(order="F"), lam)
    assert np.allclose(u1, u, atol=1e-12) and np.allclose(v1, u, atol=1e-12)

    uh, vh = u.copy(order="F"), u.copy(order="F")
    resid = x - uh @ vh.T
    step_symhals(x, uh, vh, lam, resid)
    assert np.allclose(uh, u, atol=1e-12) and np.allclose(vh, u, atol=1e-12)

    up, _ = step_pgd(x, u.copy(order="F"), float(np.linalg.norm(x)))
    assert np.allclose(up, u, atol=1e-12)


def test_asymhals_single_loop_is_bitwise_symhals():
    x = _small_problem(seed=2, sigma=0.1)
    kwargs = dict(rank=3, max_iters=200, seed=2, record_every=50)
    ra = run(x, SolverConfig(algorithm="asymhals", inner_loops=1,
                             schedule=make_adaptive(), **kwargs))
    rh = run(x, SolverConfig(algorithm="symhals",
                             schedule=make_adaptive(), **kwargs))
    assert np.array_equal(ra.u_final.entries, rh.u_final.entries)
    assert np.array_equal(ra.v_final.entries, rh.v_final.entries)
    assert np.array_equal(ra.diagnostics["f_total"], rh.diagnostics["f_total"])
    assert ra.iterations == rh.iterations


def test_symanls_rank1_matches_symhals_rank1():
    # for r = 1 both updates have the same closed form
    x = _small_problem(seed=3, n=15, r=1, sigma=0.05)
    xa = x.entries
    w0 = init_factors(x, 1, 3)
    lam = 0.7

    ua = w0.u.entries.copy(order="F")
    va = w0.v.entries.copy(order="F")
    uh = w0.u.entries.copy(order="F")
    vh = w0.v.entries.copy(order="F")
    for _ in range(50):
        ua, va = step_symanls(xa, ua, va, lam)
        resid = xa - uh @ vh.T  # resync each step for a clean comparison
        step_symhals(xa, uh, vh, lam, resid)
        scale = max(1.0, np.abs(uh).max())
        assert np.abs(ua - uh).max() <= 1e-10 * scale
        assert np.abs(va - vh).max() <= 1e-10 * scale


def test_same_seed_same_result():
    x = _small_problem(seed=4, sigma=0.1)
    for algo in ALGORITHMS:
        cfg = dict(algorithm=algo, rank=3, max_iters=100, seed=4,
                   record_every=100)
        r1 = run(x, SolverConfig(schedule=make_adaptive(), **cfg))
        r2 = run(x, SolverConfig(schedule=make_adaptive(), **cfg))
        assert np.array_equal(r1.u_final.entries, r2.u_final.entries)
        assert r1.status == r2.status


def test_monotone_descent_all_algorithms():
    for seed in range(3):
        x = _small_problem(seed=seed, sigma=0.1)
        for algo in ALGORITHMS:
            cfg = SolverConfig(algorithm=algo, rank=3,
                               schedule=make_adaptive(), max_iters=300,
                               seed=seed, record_every=300)
            res = run(x, cfg)
            dec = res.diagnostics["decrease"]
            f0 = res.diagnostics["f_total"][0]
            assert dec.min() >= -1e-12 * max(f0, 1.0), algo


def test_sufficient_decrease_fixed_lambda():
    x = _small_problem(seed=5, sigma=0.1)
    w0 = init_factors(x, 3, 5)
    sched = make_fixed(x, w0.u.entries)
    lam = sched.current
    for algo, inner in (("symanls", 1), ("symhals", 1), ("asymhals", 2)):
        cfg = SolverConfig(algorithm=algo, rank=3, schedule=sched,
                           inner_loops=inner, max_iters=60, seed=5,
                           record_every=60)
        res = run(x, cfg)
        d = res.diagnostics
        f0 = d["f_total"][0]
        if algo == "asymhals":
            bound = lam / (4.0 * inner) * (d["dw_sq"] + d["inner_sq"])
        else:
            bound = 0.5 * lam * d["dw_sq"]
        assert np.all(d["decrease"] >= bound - 1e-10 * max(f0, 1.0)), algo


def test_iterate_bound_respected():
    x = _small_problem(seed=6, sigma=0.1)
    w0 = init_factors(x, 3, 6)
    sched = make_fixed(x, w0.u.entries)
    for algo in ("symanls", "symhals", "asymhals"):
        cfg = SolverConfig(algorithm=algo, rank=3, schedule=sched,
                           max_iters=200, seed=6, record_every=200)
        res = run(x, cfg)
        assert res.diagnostics["norm_sq"].max() <= res.b0


def test_residual_integrity_over_long_hals_run():
    # the incrementally maintained residual must track X - U V^T through
    # periodic resyncs; verify via the recorded objective value
    x = _small_problem(seed=7, n=25, sigma=0.1)
    cfg = SolverConfig(algorithm="symhals", rank=3, schedule=make_adaptive(),
                       max_iters=1200, seed=7, record_every=1200)
    res = run(x, cfg)
    u = res.u_final.entries
    v = res.v_final.entries
    lam = res.trace[-1].lam
    true_fit = 0.5 * np.sum((x.entries - u @ v.T) ** 2)
    assert res.trace[-1].f_fit == pytest.approx(true_fit, abs=1e-10 * x.fro)


def test_noise_free_reaches_machine_precision():
    x = _small_problem(seed=8, n=30, r=3, sigma=0.0)
    for algo in ("symanls", "symhals", "asymhals"):
        cfg = SolverConfig(algorithm=algo, rank=3, schedule=make_adaptive(),
                           max_iters=10000, seed=8, record_every=2000)
        res = run(x, cfg)
        assert res.status == CONVERGED
        assert res.trace[-1].E < 1e-12
        rel_cons = res.trace[-1].consensus / np.linalg.norm(res.v_final.entries)
        assert rel_cons < 1e-8


def test_zero_iterations():
    x = _small_problem(seed=9)
    cfg = SolverConfig(algorithm="symhals", rank=3, schedule=make_adaptive(),
                       max_iters=0, seed=9)
    res = run(x, cfg)
    assert res.status == MAX_ITERS
    assert res.iterations == 0
    assert len(res.trace) == 1
    assert res.trace[0].k == 0


def test_trace_row_count():
    x = _small_problem(seed=10, sigma=0.1)
    for every in (1, 7, 50):
        cfg = SolverConfig(algorithm="symhals", rank=3,
                           schedule=make_adaptive(), max_iters=100, seed=10,
                           record_every=every)
        res = run(x, cfg)
        k = res.iterations
        want = 1 + k // every + (1 if k % every else 0)
        assert len(res.trace) == want
        assert res.trace[0].k == 0
        assert res.trace[-1].k == k


def test_trace_csv_roundtrip(tmp_path):
    x = _small_problem(seed=11, sigma=0.1)
    cfg = SolverConfig(algorithm="symanls", rank=3, schedule=make_adaptive(),
                       max_iters=20, seed=11, record_every=5)
    res = run(x, cfg)
    p = tmp_path / "trace.csv"
    write_trace_csv(p, res.trace)
    with open(p) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(TRACE_FIELDS)
    assert len(rows) == len(res.trace) + 1
    for row, rec in zip(rows[1:], res.trace):
        assert int(row[0]) == rec.k
        assert float(row[1]) == rec.f_total  # 17 sig digits round-trips

    j = tmp_path / "trace.json"
    write_trace_json(j, res.trace, {"note": "test"})
    payload = json.loads(j.read_text())
    assert payload["metadata"] == {"note": "test"}
    assert len(payload["trace"]) == len(res.trace)
    assert payload["trace"][-1]["f_total"] == res.trace[-1].f_total


def test_pgd_ignores_consensus():
    x = _small_problem(seed=12, sigma=0.1)
    cfg = SolverConfig(algorithm="pgd", rank=3, schedule=make_adaptive(),
                       max_iters=2000, seed=12, record_every=500)
    res = run(x, cfg)
    assert np.array_equal(res.u_final.entries, res.v_final.entries)
    for rec in res.trace:
        assert rec.consensus == 0.0
        assert rec.f_penalty == 0.0
