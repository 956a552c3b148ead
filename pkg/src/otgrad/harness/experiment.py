"""Experiment execution and artifact emission.

run_experiment() drives the (algorithm x seed) grid for one config and
writes, into <output>/<hash12>/:

    trace_<algorithm>_seed<seed>.csv   one per grid cell
    summary.json                       per-run stats + final classification
    index.json                         artifact listing with statuses

Everything is deterministic: reruns of the same config produce the same
bytes, and the artifact contents do not depend on the order in which the
grid cells executed. Files are written to a temporary name and renamed,
so a crash never leaves a half-written artifact behind.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import Optional

import numpy as np

from ..analysis import MAX_HESSIAN_DIM, classify_point, escape_summary
from ..benchmarks import ProblemBundle, make_problem
from ..core import ContractViolation, STREAM_BATCH, STREAM_INIT, derive_stream
from ..optimizers import Batcher, RunError, RunTrace, run
from .config import ExperimentConfig, OUTPUT_ENV_VAR, _jsonable

TRACE_HEADER = "t,f,grad_norm,perturbed,nce"


def resolve_output_dir(config: ExperimentConfig) -> Path:
    """Artifact directory: <base>/<hash12>, base overridable via the env."""
    base = os.environ.get(OUTPUT_ENV_VAR) or config.output
    return Path(base) / config.config_hash[:12]


def initial_point(bundle: ProblemBundle, config: ExperimentConfig, seed: int) -> np.ndarray:
    """Per-seed initial iterate, shared by every algorithm in the replicate."""
    rng = derive_stream(seed, STREAM_INIT)
    style = config.init[0]
    if style == "default":
        return bundle.default_init(rng)
    if style == "zeros":
        return np.zeros(bundle.dim)
    if style == "constant":
        return np.full(bundle.dim, float(config.init[1]))
    if style == "gaussian":
        mean, std = config.init[1], config.init[2]
        return mean + std * rng.normal(bundle.dim)
    vec = np.asarray(config.init[1], dtype=np.float64)
    if vec.shape != (bundle.dim,):
        raise ContractViolation(
            f"explicit init has {vec.shape[0]} values, problem dim is {bundle.dim}")
    return vec


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def trace_csv_text(trace: RunTrace) -> str:
    lines = [TRACE_HEADER]
    for t, f, g, p, n in zip(trace.ts, trace.fs, trace.grad_norms,
                             trace.perturbed, trace.nce):
        lines.append(f"{t},{repr(f)},{repr(g)},{p},{n}")
    return "\n".join(lines) + "\n"


def write_trace_csv(path: Path, trace: RunTrace) -> None:
    _atomic_write_text(path, trace_csv_text(trace))


def read_trace_csv(path: Path) -> dict:
    """Load a trace file back into column arrays (inverse of write_trace_csv)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRACE_HEADER:
            raise ContractViolation(f"unexpected trace header {header!r}")
        cols = {"t": [], "f": [], "grad_norm": [], "perturbed": [], "nce": []}
        for line in fh:
            t, f, g, p, n = line.strip().split(",")
            cols["t"].append(int(t))
            cols["f"].append(float(f))
            cols["grad_norm"].append(float(g))
            cols["perturbed"].append(int(p))
            cols["nce"].append(int(n))
    return {k: np.asarray(v) for k, v in cols.items()}


def _resolve_max_steps(config: ExperimentConfig, bundle: ProblemBundle) -> int:
    if config.epochs is None:
        return config.max_steps
    steps_per_epoch = math.ceil(bundle.problem.n_samples / config.batch_size)
    return config.epochs * steps_per_epoch


def _classification_report(bundle: ProblemBundle, config: ExperimentConfig,
                           trace: RunTrace) -> Optional[dict]:
    if bundle.objective is None or bundle.dim > MAX_HESSIAN_DIM:
        return None
    if trace.final_x is None:
        return None
    report = classify_point(bundle.objective, trace.final_x,
                            config.classify_eps, config.classify_rho)
    return {
        "label": report.label,
        "grad_norm": report.grad_norm,
        "lambda_min": report.lambda_min,
        "epsilon": report.epsilon,
        "rho": report.rho,
        "grad_threshold": report.grad_threshold,
        "curv_threshold": report.curv_threshold,
    }


def run_experiment(config: ExperimentConfig) -> Path:
    """Run the full grid and write artifacts; returns the artifact directory."""
    bundle = make_problem(config.problem_name, data_seed=config.data_seed,
                          **config.problem_options)
    max_steps = _resolve_max_steps(config, bundle)
    out_dir = resolve_output_dir(config)
    out_dir.mkdir(parents=True, exist_ok=True)

    full_obj = bundle.objective if bundle.objective is not None \
        else bundle.problem.full_objective()

    thresholds = {}
    inits = {}
    for seed in config.seeds:
        x0 = initial_point(bundle, config, seed)
        inits[seed] = x0
        if config.threshold is not None:
            thresholds[seed] = float(config.threshold)
        else:
            thresholds[seed] = 0.5 * float(full_obj.value(x0))

    completed = []
    entries = []
    for algo in config.algorithms:
        for seed in config.seeds:
            batcher = None
            obj_arg = bundle.objective
            if bundle.problem is not None:
                batcher = Batcher(bundle.problem, config.batch_size,
                                  derive_stream(seed, STREAM_BATCH))
                obj_arg = full_obj
            status = "ok"
            try:
                trace = run(obj_arg, algo, max_steps, seed, x0=inits[seed],
                            record_every=config.record_every, batcher=batcher,
                            problem_name=config.problem_name)
                completed.append(trace)
            except RunError as exc:
                trace = exc.trace
                status = f"failed: {exc}"
            fname = f"trace_{algo.name}_seed{seed}.csv"
            write_trace_csv(out_dir / fname, trace)
            entries.append({"file": fname, "kind": "trace", "algorithm": algo.name,
                            "seed": seed, "status": status})

    rows = []
    by_seed = {}
    for trace in completed:
        by_seed.setdefault(trace.seed, []).append(trace)
    for seed in sorted(by_seed):
        rows.extend(escape_summary(by_seed[seed], thresholds[seed]))
    rows.sort(key=lambda row: (row["algorithm"], row["seed"]))

    trace_by_cell = {(tr.algorithm, tr.seed): tr for tr in completed}
    for row in rows:
        trace = trace_by_cell[(row["algorithm"], row["seed"])]
        row["final_classification"] = _classification_report(bundle, config, trace)

    summary = {
        "config_hash": config.config_hash,
        "problem": config.problem_name,
        "max_steps": max_steps,
        "thresholds": {str(seed): thresholds[seed] for seed in sorted(thresholds)},
        "runs": rows,
    }
    _atomic_write_text(out_dir / "summary.json",
                       json.dumps(_jsonable(summary), sort_keys=True, indent=2) + "\n")

    entries.sort(key=lambda e: (e["kind"], e["algorithm"], e["seed"]))
    index = {
        "config_hash": config.config_hash,
        "problem": config.problem_name,
        "summary": "summary.json",
        "artifacts": entries,
    }
    _atomic_write_text(out_dir / "index.json",
                       json.dumps(_jsonable(index), sort_keys=True, indent=2) + "\n")
    return out_dir
