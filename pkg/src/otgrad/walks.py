"""Self-interacting nearest-neighbor walks on the integer lattice.

Two variants share one mechanism. Both walks look at how often the two
neighbor sites have been visited so far and convert those counts into
transition probabilities through an increasing weight function w. The
repelling walk prefers the less-visited neighbor; the reinforced walk
prefers the more-visited one.

Repelling:   P(Z -> Z-1) = w(R) / (w(L) + w(R))
Reinforced:  P(Z -> Z-1) = w(L) / (w(L) + w(R))

where L and R are the visit counts of sites Z-1 and Z+1 among all sites
occupied strictly before the current step. The start site counts as
visited at t=0, so after t steps the counts sum to t+1.

A numba kernel accelerates long simulations when numba is importable;
the pure-python walk_step path is kept as the reference implementation
and as the fallback.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np

from .core import ContractViolation, RngStream
from .occupation import WeightFn

WALK_KINDS = ("repelling", "reinforced")

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False


@dataclass
class WalkState:
    position: int
    counts: Dict[int, int]
    t: int
    kind: str
    weight: WeightFn
    rng: RngStream

    def neighbor_counts(self) -> tuple[int, int]:
        return (self.counts.get(self.position - 1, 0),
                self.counts.get(self.position + 1, 0))


def make_walk_state(kind: str, weight: WeightFn, rng: RngStream,
                    start: int = 0) -> WalkState:
    if kind not in WALK_KINDS:
        raise ContractViolation(f"unknown walk kind {kind!r}, expected one of {WALK_KINDS}")
    return WalkState(position=start, counts={start: 1}, t=0, kind=kind,
                     weight=weight, rng=rng)


def left_move_probability(kind: str, weight: WeightFn, n_left: int, n_right: int) -> float:
    wl = weight(n_left)
    wr = weight(n_right)
    if kind == "repelling":
        return wr / (wl + wr)
    if kind == "reinforced":
        return wl / (wl + wr)
    raise ContractViolation(f"unknown walk kind {kind!r}")


def walk_step(state: WalkState) -> WalkState:
    """Advance the walk one step in place (one uniform draw per step)."""
    n_left, n_right = state.neighbor_counts()
    p_left = left_move_probability(state.kind, state.weight, n_left, n_right)
    if state.rng.uniform() < p_left:
        state.position -= 1
    else:
        state.position += 1
    state.counts[state.position] = state.counts.get(state.position, 0) + 1
    state.t += 1
    return state


def _simulate_python(kind: str, alpha: float, uniforms: np.ndarray) -> np.ndarray:
    T = uniforms.shape[0]
    path = np.zeros(T + 1, dtype=np.int64)
    counts = np.zeros(2 * T + 3, dtype=np.int64)
    off = T + 1
    pos = 0
    counts[off] = 1
    repelling = kind == "repelling"
    for t in range(T):
        wl = 1.0 + float(counts[pos - 1 + off]) ** alpha
        wr = 1.0 + float(counts[pos + 1 + off]) ** alpha
        p_left = wr / (wl + wr) if repelling else wl / (wl + wr)
        if uniforms[t] < p_left:
            pos -= 1
        else:
            pos += 1
        counts[pos + off] += 1
        path[t + 1] = pos
    return path


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _simulate_kernel(repelling: bool, alpha: float, uniforms: np.ndarray) -> np.ndarray:  # pragma: no cover - compiled
        T = uniforms.shape[0]
        path = np.zeros(T + 1, dtype=np.int64)
        counts = np.zeros(2 * T + 3, dtype=np.int64)
        off = T + 1
        pos = 0
        counts[off] = 1
        for t in range(T):
            wl = 1.0 + float(counts[pos - 1 + off]) ** alpha
            wr = 1.0 + float(counts[pos + 1 + off]) ** alpha
            if repelling:
                p_left = wr / (wl + wr)
            else:
                p_left = wl / (wl + wr)
            if uniforms[t] < p_left:
                pos -= 1
            else:
                pos += 1
            counts[pos + off] += 1
            path[t + 1] = pos
        return path


def simulate(kind: str, weight: WeightFn, T: int, seed: int) -> np.ndarray:
    """Run one walk for T steps; returns the path (length T+1, starts at 0)."""
    if kind not in WALK_KINDS:
        raise ContractViolation(f"unknown walk kind {kind!r}, expected one of {WALK_KINDS}")
    if T < 1:
        raise ContractViolation(f"T must be >= 1, got {T}")
    uniforms = RngStream(seed, 0).uniforms(T)
    if _HAVE_NUMBA:
        return _simulate_kernel(kind == "repelling", weight.alpha, uniforms)
    return _simulate_python(kind, weight.alpha, uniforms)


def fit_msd_exponent(msd: np.ndarray, t_lo: int, t_hi: int) -> tuple[float, float]:
    """Least-squares slope of log msd[t] vs log t over t in [t_lo, t_hi].

    Returns (slope, stderr) with the stderr taken from the regression
    residuals. Entries with msd == 0 are skipped (log undefined).
    """
    msd = np.asarray(msd, dtype=np.float64)
    t_lo = max(1, int(t_lo))
    t_hi = min(int(t_hi), msd.shape[0] - 1)
    if t_hi <= t_lo:
        raise ContractViolation(f"empty fit window [{t_lo}, {t_hi}]")
    ts = np.arange(t_lo, t_hi + 1)
    ys = msd[t_lo:t_hi + 1]
    keep = ys > 0
    ts, ys = ts[keep], ys[keep]
    if ts.shape[0] < 3:
        raise ContractViolation("fewer than 3 usable points in the fit window")
    lx = np.log(ts.astype(np.float64))
    ly = np.log(ys)
    lx_c = lx - lx.mean()
    sxx = float(lx_c @ lx_c)
    slope = float(lx_c @ ly) / sxx
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    dof = ts.shape[0] - 2
    sigma2 = float(resid @ resid) / dof if dof > 0 else 0.0
    stderr = float(np.sqrt(sigma2 / sxx))
    return slope, stderr


def msd_curve(kind: str, weight: WeightFn, T: int, n_paths: int, seed: int) -> np.ndarray:
    """Ensemble average of Z_t^2 over n_paths independent walks.

    Path i uses seed + i; the accumulation order is fixed by ascending
    seed, so the curve is deterministic.
    """
    if n_paths < 1:
        raise ContractViolation(f"n_paths must be >= 1, got {n_paths}")
    acc = np.zeros(T + 1, dtype=np.float64)
    for i in range(n_paths):
        path = simulate(kind, weight, T, seed + i)
        acc += path.astype(np.float64) ** 2
    return acc / n_paths


def msd_exponent(kind: str, weight: WeightFn, T: int, n_paths: int, seed: int,
                 fit_lo_frac: float = 0.1) -> tuple[float, float]:
    """Mean-squared-displacement scaling exponent with its regression stderr."""
    if T < 1000:
        raise ContractViolation(f"T must be >= 1000 for a stable fit, got {T}")
    if n_paths < 100:
        raise ContractViolation(f"n_paths must be >= 100, got {n_paths}")
    msd = msd_curve(kind, weight, T, n_paths, seed)
    return fit_msd_exponent(msd, int(fit_lo_frac * T), T)


def localization_metric(path: Sequence[int]) -> float:
    """Share of the second half of the path spent at its 5 busiest sites."""
    path = np.asarray(path, dtype=np.int64)
    if path.shape[0] < 100:
        raise ContractViolation(f"path length must be >= 100, got {path.shape[0]}")
    second = path[path.shape[0] // 2:]
    _, counts = np.unique(second, return_counts=True)
    counts = np.sort(counts)[::-1]
    return float(counts[:5].sum()) / second.shape[0]


def path_range(path: Sequence[int]) -> int:
    path = np.asarray(path, dtype=np.int64)
    return int(path.max() - path.min())


def write_paths_csv(file_path: str, seeds: Sequence[int],
                    paths: Sequence[np.ndarray]) -> None:
    """Write walk paths as rows (seed, t, Z), seeds in the given order."""
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "t", "Z"])
        for seed, path in zip(seeds, paths):
            for t, z in enumerate(path):
                writer.writerow([seed, t, int(z)])


def write_msd_csv(file_path: str, msd: np.ndarray) -> None:
    """Write an ensemble mean-squared-displacement curve as rows (t, msd)."""
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "msd"])
        for t, value in enumerate(msd):
            writer.writerow([t, repr(float(value))])
