"""Radially symmetric staircase landscape with rings of degenerate saddles.

The scalar profile is piecewise cubic in r = mean(x_i^2):

    f~(r) = r^3                              0 <= r < L/2
    f~(r) = (r - nL)^3 + nL^3/4              nL - L/2 <= r < nL + L/2, 1 <= n <= N
    f~(r) = (r - NL)^3 + NL^3/4              r >= NL + L/2

The slope 3(r - nL)^2 vanishes on every ring r = nL, so plain gradient
descent parks on the first ring it reaches while the global minimum sits at
the origin.  The profile is C^1 across all branch boundaries.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import ContractViolation, Objective


def _branch(r: float, n_plateaus: int, length: float) -> int:
    """Plateau index for radius r: 0 for the innermost bowl, else min(n, N)."""
    n = math.floor(r / length + 0.5)
    return min(n, n_plateaus)


def staircase_profile(r: float, n_plateaus: int = 4, length: float = 1.0) -> float:
    if r < 0:
        raise ContractViolation(f"squared-radius mean must be >= 0, got {r}")
    n = _branch(r, n_plateaus, length)
    if n == 0:
        return r ** 3
    return (r - n * length) ** 3 + 0.25 * n * length ** 3


def staircase_slope(r: float, n_plateaus: int = 4, length: float = 1.0) -> float:
    if r < 0:
        raise ContractViolation(f"squared-radius mean must be >= 0, got {r}")
    n = _branch(r, n_plateaus, length)
    if n == 0:
        return 3.0 * r * r
    return 3.0 * (r - n * length) ** 2


def staircase_objective(dim: int = 4, n_plateaus: int = 4, length: float = 1.0) -> Objective:
    """f(x) = f~(mean(x_i^2)); gradient_i = f~'(r) * 2 x_i / dim."""
    if dim <= 0 or n_plateaus < 1 or length <= 0:
        raise ContractViolation(
            f"invalid staircase shape dim={dim}, n_plateaus={n_plateaus}, length={length}")

    def value(x: np.ndarray) -> float:
        r = float(np.mean(x * x))
        return staircase_profile(r, n_plateaus, length)

    def gradient(x: np.ndarray) -> np.ndarray:
        r = float(np.mean(x * x))
        return staircase_slope(r, n_plateaus, length) * (2.0 / dim) * x

    return Objective(dim=dim, value=value, gradient=gradient, name="staircase",
                     known_min=0.0)


def staircase_saddle_init(dim: int, n_plateaus: int = 4, length: float = 1.0) -> np.ndarray:
    """Constant vector sitting exactly on the outermost zero-gradient ring."""
    return np.full(dim, math.sqrt(n_plateaus * length))
