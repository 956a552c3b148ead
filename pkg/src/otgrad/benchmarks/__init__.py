"""Benchmark problem registry.

make_problem() turns a problem name plus options into a ProblemBundle: a
deterministic Objective (or a dataset-backed MlpProblem for "mlp") together
with the problem's canonical initial point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..core import STREAM_INIT, ContractViolation, Objective, RngStream, derive_stream
from .airy import AIRY_DIM, airy_ai, airy_regression_objective
from .datasets import load_dataset
from .mlp import MlpProblem, mlp_param_count
from .quadratics import (
    PR_DIM,
    PR_N_MEASUREMENTS,
    REGLQ_DIM,
    phase_retrieval_init_std,
    phase_retrieval_objective,
    reglq_objective,
)
from .staircase import staircase_objective, staircase_profile, staircase_saddle_init

PROBLEM_NAMES = ("staircase", "airy_regression", "reglq", "phase_retrieval", "mlp")

__all__ = [
    "PROBLEM_NAMES",
    "ProblemBundle",
    "make_problem",
    "airy_ai",
    "airy_regression_objective",
    "load_dataset",
    "MlpProblem",
    "mlp_param_count",
    "phase_retrieval_objective",
    "reglq_objective",
    "staircase_objective",
    "staircase_profile",
]


@dataclass
class ProblemBundle:
    name: str
    dim: int
    objective: Optional[Objective]          # None for dataset-backed problems
    problem: Optional[MlpProblem]           # set only for "mlp"
    default_init: Callable[[RngStream], np.ndarray]

    def init_point(self, data_seed: int) -> np.ndarray:
        """Canonical x0, derived deterministically from the data seed."""
        return self.default_init(derive_stream(data_seed, STREAM_INIT))


def make_problem(name: str, data_seed: int = 0, **options) -> ProblemBundle:
    """Build a benchmark instance; unknown option keys are rejected."""

    def take(key, default):
        return options.pop(key, default)

    if name == "staircase":
        dim = int(take("dim", 4))
        n_plateaus = int(take("n_plateaus", 4))
        length = float(take("length", 1.0))
        _reject_leftovers(name, options)
        obj = staircase_objective(dim=dim, n_plateaus=n_plateaus, length=length)
        return ProblemBundle(
            name=name, dim=dim, objective=obj, problem=None,
            default_init=lambda rng: staircase_saddle_init(dim, n_plateaus, length))

    if name == "airy_regression":
        _reject_leftovers(name, options)
        obj = airy_regression_objective()
        return ProblemBundle(
            name=name, dim=AIRY_DIM, objective=obj, problem=None,
            default_init=lambda rng: np.zeros(AIRY_DIM))

    if name == "reglq":
        n_terms = int(take("n_terms", 10))
        _reject_leftovers(name, options)
        obj = reglq_objective(data_seed, n_terms=n_terms)
        return ProblemBundle(
            name=name, dim=REGLQ_DIM, objective=obj, problem=None,
            default_init=lambda rng: np.zeros(REGLQ_DIM))

    if name == "phase_retrieval":
        dim = int(take("dim", PR_DIM))
        n_measurements = int(take("n_measurements", PR_N_MEASUREMENTS))
        _reject_leftovers(name, options)
        obj = phase_retrieval_objective(data_seed, n_measurements=n_measurements, dim=dim)
        std = phase_retrieval_init_std(dim)
        return ProblemBundle(
            name=name, dim=dim, objective=obj, problem=None,
            default_init=lambda rng: std * rng.normal(dim))

    if name == "mlp":
        n_hidden = int(take("n_hidden", 32))
        dataset = str(take("dataset", "synthetic_blobs"))
        data_path = take("data_path", None)
        n_samples = int(take("n_samples", 1280))
        activation = str(take("activation", "sigmoid"))
        init_mean = float(take("init_mean", 0.0))
        init_std = float(take("init_std", 0.1))
        _reject_leftovers(name, options)
        features, labels = load_dataset(dataset, path=data_path, seed=data_seed,
                                        n_samples=n_samples)
        problem = MlpProblem(features, labels, n_hidden=n_hidden, activation=activation)
        return ProblemBundle(
            name=name, dim=problem.dim, objective=None, problem=problem,
            default_init=lambda rng: problem.init_params(rng, mean=init_mean, std=init_std))

    raise ContractViolation(f"unknown problem {name!r}, expected one of {PROBLEM_NAMES}")


def _reject_leftovers(name: str, options: dict) -> None:
    if options:
        raise ContractViolation(f"unknown options for {name}: {sorted(options)}")
