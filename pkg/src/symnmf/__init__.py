"""Symmetric nonnegative matrix factorization via a penalized
nonsymmetric splitting.

Factorizes a symmetric nonnegative X as U U^T with U >= 0 by minimizing

    0.5 * ||X - U V^T||_F^2 + (lambda / 2) * ||U - V||_F^2,   U, V >= 0,

where a large enough (or adaptively grown) penalty lambda forces U = V.
Solvers: alternating exact NNLS (symanls), closed-form column updates
(symhals), its multi-sweep accelerated variant (asymhals), and a projected
gradient baseline (pgd).
"""

__version__ = "0.1.0"

from .bench import (
    ClusterProblem,
    SyntheticSpec,
    assign_labels,
    build_similarity,
    clustering_accuracy,
    gen_planted_clusters,
    gen_synthetic,
)
from .errors import SymnmfError
from .kernels import active_backend
from .matcore import (
    Factor,
    FactorPair,
    SymmetricMatrix,
    load_csv,
    load_dense_text,
    make_symmetric,
    save_csv,
    save_dense_text,
)
from .nnls import NnlsProblem, pgd_fallback, solve_nnls
from .objective import (
    KktResidual,
    ObjectiveValue,
    eval_objective,
    fitting_error,
    grad_g,
    iterate_bound,
    kkt_residual,
    lambda_threshold,
    symmetric_kkt_residual,
)
from .penalty import PenaltySchedule, make_adaptive, make_fixed, make_mult101
from .solvers import (
    ALGORITHMS,
    SolverConfig,
    SolverResult,
    TraceRecord,
    init_factors,
    run,
    write_trace_csv,
    write_trace_json,
)
from .verify import run_suite

__all__ = [
    "__version__",
    "ALGORITHMS",
    "ClusterProblem",
    "Factor",
    "FactorPair",
    "KktResidual",
    "NnlsProblem",
    "ObjectiveValue",
    "PenaltySchedule",
    "SolverConfig",
    "SolverResult",
    "SymmetricMatrix",
    "SymnmfError",
    "SyntheticSpec",
    "TraceRecord",
    "active_backend",
    "assign_labels",
    "build_similarity",
    "clustering_accuracy",
    "eval_objective",
    "fitting_error",
    "gen_planted_clusters",
    "gen_synthetic",
    "grad_g",
    "init_factors",
    "iterate_bound",
    "kkt_residual",
    "lambda_threshold",
    "load_csv",
    "load_dense_text",
    "make_adaptive",
    "make_fixed",
    "make_mult101",
    "make_symmetric",
    "pgd_fallback",
    "run",
    "run_suite",
    "save_csv",
    "save_dense_text",
    "solve_nnls",
    "symmetric_kkt_residual",
    "write_trace_csv",
    "write_trace_json",
]
