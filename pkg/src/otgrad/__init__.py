"""otgrad: gradient methods with occupation-time-adapted perturbations.

The package bundles the optimizers (plain, accelerated, perturbed, and
the occupation-adapted variants plus standard stochastic baselines), a
set of nonconvex benchmark problems with analytic gradients, a
self-interacting lattice-walk simulator, numerical verification tools,
and a config-driven experiment harness with a CLI.
"""

from .core import (
    ContractViolation,
    NumericalDomainError,
    Objective,
    RngStream,
    STREAM_ALGORITHM,
    STREAM_BATCH,
    STREAM_DATA,
    STREAM_INIT,
    as_vector,
    derive_stream,
    eval_objective,
)
from .occupation import (
    OccupationWindow,
    UNWINDOWED_H,
    WeightFn,
    left_probability,
    sample_ball_perturbation,
    sample_occupation_perturbation,
)
from .optimizers import (
    ALGORITHMS,
    AlgoConfig,
    BASELINE_ALGORITHMS,
    Batcher,
    BaselineHyper,
    OptimizerState,
    PERTURBED_ALGORITHMS,
    PagdotParams,
    PgdotParams,
    RunError,
    RunTrace,
    baseline_step,
    derive_pagdot_params,
    derive_pgdot_params,
    gd_step,
    make_pagdot_state,
    make_pgdot_state,
    nce,
    pagdot_step,
    pgdot_step,
    run,
)
from .analysis import (
    StationarityReport,
    classify_point,
    escape_summary,
    fd_gradient,
    fd_hessian,
    jacobi_eigenvalues,
    min_hessian_eig,
    monotone_after,
)
from .walks import (
    WALK_KINDS,
    WalkState,
    fit_msd_exponent,
    localization_metric,
    make_walk_state,
    msd_curve,
    msd_exponent,
    path_range,
    simulate,
    walk_step,
)
from .benchmarks import PROBLEM_NAMES, ProblemBundle, make_problem

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AlgoConfig",
    "BASELINE_ALGORITHMS",
    "Batcher",
    "BaselineHyper",
    "ContractViolation",
    "NumericalDomainError",
    "Objective",
    "OccupationWindow",
    "OptimizerState",
    "PERTURBED_ALGORITHMS",
    "PROBLEM_NAMES",
    "PagdotParams",
    "PgdotParams",
    "ProblemBundle",
    "RngStream",
    "RunError",
    "RunTrace",
    "STREAM_ALGORITHM",
    "STREAM_BATCH",
    "STREAM_DATA",
    "STREAM_INIT",
    "StationarityReport",
    "UNWINDOWED_H",
    "WALK_KINDS",
    "WalkState",
    "WeightFn",
    "as_vector",
    "baseline_step",
    "classify_point",
    "derive_pagdot_params",
    "derive_pgdot_params",
    "derive_stream",
    "escape_summary",
    "eval_objective",
    "fd_gradient",
    "fd_hessian",
    "fit_msd_exponent",
    "gd_step",
    "jacobi_eigenvalues",
    "left_probability",
    "localization_metric",
    "make_pagdot_state",
    "make_pgdot_state",
    "make_problem",
    "make_walk_state",
    "min_hessian_eig",
    "monotone_after",
    "msd_curve",
    "msd_exponent",
    "nce",
    "pagdot_step",
    "path_range",
    "pgdot_step",
    "run",
    "sample_ball_perturbation",
    "sample_occupation_perturbation",
    "simulate",
    "walk_step",
]
