"""Command-line front end.

Subcommands: ``factorize`` a matrix file, ``synth`` benchmark on generated
data, ``cluster`` a feature/similarity dataset (or planted clusters),
``verify`` the invariant suite, and ``bench-kernels`` to time the numba
kernels against the pure-numpy fallback.

Exit codes: 0 success/converged, 1 usage or input error, 2 solver hit its
iteration cap, 3 verification failure.
"""

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, kernels
from .bench import (
    SyntheticSpec,
    assign_labels,
    build_similarity,
    clustering_accuracy,
    gen_planted_clusters,
    gen_synthetic,
)
from .errors import SymnmfError
from .matcore import load_csv, load_dense_text, make_symmetric, save_csv
from .objective import fitting_error
from .penalty import make_adaptive, make_fixed, make_mult101
from .solvers import (
    ALGORITHMS,
    CONVERGED,
    MAX_ITERS,
    SolverConfig,
    init_factors,
    run,
    write_trace_csv,
    write_trace_json,
)
from .verify import run_suite


def _add_solver_flags(p):
    p.add_argument("--algo", default="symhals", choices=ALGORITHMS)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--inner-loops", type=int, default=2)
    p.add_argument("--lambda-mode", default="adaptive",
                   choices=("fixed", "adaptive", "mult101"))
    p.add_argument("--lambda0", type=float, default=1e-5)
    p.add_argument("--margin", type=float, default=1.01)
    p.add_argument("--tol-obj", type=float, default=1e-10)
    p.add_argument("--tol-consensus", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=30000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--out-dir", default=".")


def _make_schedule(args, x, rank):
    if args.lambda_mode == "fixed":
        u0 = init_factors(x, rank, args.seed).u.entries
        return make_fixed(x, u0, margin=args.margin)
    if args.lambda_mode == "mult101":
        return make_mult101(args.lambda0)
    return make_adaptive(args.lambda0)


def _config(args, rank, algo=None):
    return {
        "algorithm": algo or args.algo,
        "rank": rank,
        "inner_loops": args.inner_loops,
        "lambda_mode": args.lambda_mode,
        "lambda0": args.lambda0,
        "margin": args.margin,
        "tol_obj": args.tol_obj,
        "tol_consensus": args.tol_consensus,
        "max_iters": args.max_iters,
        "seed": args.seed,
        "record_every": args.record_every,
    }


def _write_manifest(out_dir, command, config, inputs, outputs):
    manifest = {
        "command": command,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
        "toolkit_version": __version__,
        "kernel_backend": kernels.BACKEND,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path


def _load_matrix(path):
    if path.endswith(".csv"):
        return load_csv(path)
    return load_dense_text(path)


def _solve(x, args, rank, algo=None):
    cfg = SolverConfig(
        algorithm=algo or args.algo, rank=rank,
        schedule=_make_schedule(args, x, rank),
        inner_loops=args.inner_loops, max_iters=args.max_iters,
        tol_obj=args.tol_obj, tol_consensus=args.tol_consensus,
        seed=args.seed, record_every=args.record_every)
    return run(x, cfg)


def cmd_factorize(args):
    x = make_symmetric(_load_matrix(args.matrix))
    os.makedirs(args.out_dir, exist_ok=True)
    res = _solve(x, args, args.rank)
    u_path = os.path.join(args.out_dir, "U.csv")
    v_path = os.path.join(args.out_dir, "V.csv")
    t_path = os.path.join(args.out_dir, "trace.csv")
    save_csv(u_path, res.u_final.entries)
    save_csv(v_path, res.v_final.entries)
    write_trace_csv(t_path, res.trace)
    _write_manifest(args.out_dir, "factorize", _config(args, args.rank),
                    {"matrix": args.matrix},
                    {"u": u_path, "v": v_path, "trace": t_path})
    final = res.trace[-1]
    print("status=%s iterations=%d f=%.6e E=%.6e consensus=%.3e" %
          (res.status, res.iterations, final.f_total, final.E, final.consensus))
    return 0 if res.status == CONVERGED else (2 if res.status == MAX_ITERS else 1)


def cmd_synth(args):
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGORITHMS:
            raise SymnmfError("unknown algorithm %r" % a)
    spec = SyntheticSpec(n=args.n, r=args.r, sigma=args.sigma,
                         noise_dist=args.noise_dist, seed=args.seed)
    x, _ = gen_synthetic(spec)
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    outputs = {}
    for algo in algos:
        t0 = time.perf_counter()
        res = _solve(x, args, args.rank, algo=algo)
        wall = time.perf_counter() - t0
        final_e = fitting_error(x, res.u_final.entries)
        t_path = os.path.join(args.out_dir, "trace_%s.csv" % algo)
        write_trace_csv(t_path, res.trace)
        write_trace_json(t_path[:-4] + ".json", res.trace,
                         {"algorithm": algo, "seed": args.seed, "n": args.n,
                          "r": args.rank, "lambda_mode": args.lambda_mode})
        outputs[algo] = t_path
        rows.append((algo, res.status, res.iterations, final_e, wall))
    _write_manifest(args.out_dir, "synth", _config(args, args.rank),
                    {"n": args.n, "r": args.r, "sigma": args.sigma,
                     "noise_dist": args.noise_dist}, outputs)
    if args.json:
        print(json.dumps([
            {"algorithm": a, "status": s, "iterations": it,
             "final_E": e, "wall_seconds": w}
            for a, s, it, e, w in rows]))
    else:
        print("%-10s %-10s %10s %14s %10s" %
              ("algorithm", "status", "iters", "final_E", "seconds"))
        for a, s, it, e, w in rows:
            print("%-10s %-10s %10d %14.6e %10.3f" % (a, s, it, e, w))
    return 0


def cmd_cluster(args):
    os.makedirs(args.out_dir, exist_ok=True)
    if args.planted:
        prob = gen_planted_clusters(args.n, args.k, args.p_in, args.p_out,
                                    seed=args.seed)
        x = prob.similarity
        truth = prob.labels_true
        k = args.k
        inputs = {"planted": {"n": args.n, "k": args.k, "p_in": args.p_in,
                              "p_out": args.p_out}}
    else:
        if args.features is None or args.labels is None:
            raise SymnmfError("need FEATURES and LABELS paths (or --planted)")
        truth = np.loadtxt(args.labels, dtype=np.int64, ndmin=1)
        if args.similarity:
            x = make_symmetric(_load_matrix(args.features))
        else:
            feats = load_csv(args.features)
            x = build_similarity(feats, knn=args.knn)
        if truth.size != x.n:
            raise SymnmfError("label count %d does not match n=%d" %
                              (truth.size, x.n))
        k = args.k if args.k else int(np.unique(truth).size)
        inputs = {"features": args.features, "labels": args.labels}
    res = _solve(x, args, k)
    pred = assign_labels(res.u_final.entries)
    acc = clustering_accuracy(pred, truth)
    p_path = os.path.join(args.out_dir, "predictions.txt")
    np.savetxt(p_path, pred, fmt="%d")
    _write_manifest(args.out_dir, "cluster", _config(args, k), inputs,
                    {"predictions": p_path})
    print("accuracy=%.4f status=%s iterations=%d" %
          (acc, res.status, res.iterations))
    return 0


def cmd_verify(args):
    seeds = range(args.seed, args.seed + args.num_seeds)
    results = run_suite(seeds, lambda_override=args.lambda_override)
    all_ok = True
    for r in results:
        print("%-28s %s  (%s)" % (r.name, "PASS" if r.passed else "FAIL", r.detail))
        all_ok = all_ok and r.passed
    return 0 if all_ok else 3


def cmd_bench_kernels(args):
    """Time one HALS sweep pair per backend on a synthetic instance."""
    x, _ = gen_synthetic(SyntheticSpec(n=args.n, r=args.r, sigma=0.1,
                                       seed=args.seed))
    w = init_factors(x, args.r, args.seed)
    results = []
    for name, su, sv in (("numba", kernels.sweep_u_numba, kernels.sweep_v_numba),
                         ("numpy", kernels.sweep_u_numpy, kernels.sweep_v_numpy)):
        if su is None:
            print("%-6s unavailable" % name)
            continue
        u = w.u.entries.copy(order="F")
        v = w.v.entries.copy(order="F")
        resid = x.entries - u @ v.T
        lam = 1e-3
        su(resid, u, v, lam)  # warm-up / JIT compile
        sv(resid, u, v, lam)
        t0 = time.perf_counter()
        for _ in range(args.sweeps):
            su(resid, u, v, lam)
            sv(resid, u, v, lam)
        dt = (time.perf_counter() - t0) / args.sweeps
        results.append((name, dt))
        print("%-6s %.6f s/sweep-pair (n=%d, r=%d)" % (name, dt, args.n, args.r))
    if len(results) == 2:
        print("speedup numba vs numpy: %.2fx" % (results[1][1] / results[0][1]))
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="symnmf",
        description="Symmetric NMF via penalized nonsymmetric factorization.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("factorize", help="factorize a symmetric matrix file")
    f.add_argument("matrix")
    _add_solver_flags(f)
    f.set_defaults(func=cmd_factorize)

    s = sub.add_parser("synth", help="synthetic benchmark")
    s.add_argument("--n", type=int, default=300)
    s.add_argument("--r", type=int, default=20)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--noise-dist", default="gaussian",
                   choices=("gaussian", "uniform", "lognormal"))
    s.add_argument("--algos", default="symanls,symhals,asymhals")
    s.add_argument("--json", action="store_true")
    _add_solver_flags(s)
    s.set_defaults(func=cmd_synth)

    c = sub.add_parser("cluster", help="graph clustering pipeline")
    c.add_argument("features", nargs="?")
    c.add_argument("labels", nargs="?")
    c.add_argument("--similarity", action="store_true",
                   help="FEATURES is already a similarity matrix")
    c.add_argument("--knn", type=int, default=7)
    c.add_argument("--planted", action="store_true")
    c.add_argument("--n", type=int, default=60)
    c.add_argument("--k", type=int, default=0)
    c.add_argument("--p-in", type=float, default=0.9)
    c.add_argument("--p-out", type=float, default=0.1)
    _add_solver_flags(c)
    c.set_defaults(func=cmd_cluster)

    v = sub.add_parser("verify", help="run the invariant suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--num-seeds", type=int, default=1)
    v.add_argument("--lambda-override", type=float, default=None,
                   help="debug: execute solver steps with this lambda")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench-kernels",
                       help="time numba vs numpy HALS sweeps")
    b.add_argument("--n", type=int, default=300)
    b.add_argument("--r", type=int, default=20)
    b.add_argument("--sweeps", type=int, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench_kernels)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SymnmfError as e:
        print("error: %s: %s" % (type(e).__name__, e), file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
