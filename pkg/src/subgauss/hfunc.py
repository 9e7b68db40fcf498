"""The ratio ``h(lam) = 2 K(lam) / lam**2`` and its diagnostics.

``h`` extends continuously to ``h(0) = Var[X]``; near the origin it is
evaluated from the cumulant expansion ``Var + k3 lam / 3 + k4 lam**2 / 12``.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .cgf import cgf_centered, cgf_derivative, cgf_derivs
from .distributions import Distribution, fingerprint, moment_table, support_radius
from .errors import EvaluationError, ParameterError

FD_GUARD = 1e-4


@lru_cache(maxsize=1024)
def _h_constants(dist: Distribution):
    t = moment_table(dist, 4)
    return t.variance, t.kappa3, t.kappa4, series_switch(dist)


def series_switch(dist: Distribution) -> float:
    """Below this ``|lam|`` the cumulant expansion replaces ``2K/lam**2``."""
    return 1e-4 * max(1.0, 1.0 / support_radius(dist))


def h_series(dist: Distribution, lam):
    """Second-order cumulant expansion of ``h`` about 0."""
    var, k3, k4, _ = _h_constants(dist)
    lam = np.asarray(lam, dtype=float)
    out = var + k3 * lam / 3.0 + k4 * lam * lam / 12.0
    return float(out) if out.ndim == 0 else out


def h_eval(dist: Distribution, lam):
    """``h(lam)`` for a scalar or array ``lam``.

    Examples
    --------
    >>> from subgauss import Uniform
    >>> round(h_eval(Uniform(0, 1), 1.0), 7)
    0.0826497
    """
    var, k3, k4, switch = _h_constants(dist)
    arr = np.asarray(lam, dtype=float)
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    near = np.abs(flat) < switch
    out[near] = var + k3 * flat[near] / 3.0 + k4 * flat[near] ** 2 / 12.0
    far = flat[~near]
    if far.size:
        out[~near] = 2.0 * cgf_centered(dist, far) / (far * far)
    out = out.reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def ode_rhs_second(dist: Distribution, lam: float, method: str = "analytic") -> float:
    """Right-hand side ``(2/lam) d/dlam [K'(lam)/lam]`` of the second-order ODE for h.

    A negative value on all of ``lam != 0`` means every critical point of h is a
    local maximum, hence h has a unique global maximizer.

    Parameters
    ----------
    method : {"analytic", "fd"}
        ``analytic`` uses ``K''`` directly. ``fd`` differentiates ``K'/lam``
        numerically at two steps and raises if they disagree by more than 1e-4
        relative; the Richardson extrapolate is returned.
    """
    lam = float(lam)
    if lam == 0.0:
        raise ParameterError("ode_rhs_second needs lambda != 0")
    if method == "analytic":
        _, k1, k2 = cgf_derivs(dist, lam)
        return 2.0 * (lam * k2 - k1) / lam ** 3
    if method != "fd":
        raise ParameterError(f"unknown method {method!r}")

    def g(x):
        return cgf_derivative(dist, x) / x

    scale = max(1.0, abs(lam))
    h1, h2 = 1e-4 * scale, 5e-5 * scale
    if abs(lam) <= 2 * h1:
        raise EvaluationError(f"lambda={lam!r} too close to 0 for the difference stencil")
    d1 = (g(lam + h1) - g(lam - h1)) / (2 * h1)
    d2 = (g(lam + h2) - g(lam - h2)) / (2 * h2)
    if abs(d1 - d2) > FD_GUARD * max(abs(d1), abs(d2), 1e-300):
        raise EvaluationError(
            f"finite-difference estimates disagree at lambda={lam!r}: {d1!r} vs {d2!r}")
    return 2.0 / lam * (4.0 * d2 - d1) / 3.0


@dataclass(frozen=True, eq=False)
class HCurve:
    """``h`` sampled on an increasing grid."""

    lambdas: np.ndarray
    values: np.ndarray
    dist_fingerprint: str
    series_switch: float

    def argmax(self) -> int:
        return int(np.argmax(self.values))

    def to_csv(self, dest: Union[str, os.PathLike, io.TextIOBase]) -> None:
        """Write ``lambda,h`` rows with round-trip float formatting."""
        lines = ["lambda,h"]
        lines += [f"{float(x)!r},{float(y)!r}" for x, y in zip(self.lambdas, self.values)]
        text = "\n".join(lines) + "\n"
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            with open(dest, "w", newline="") as fh:
                fh.write(text)


def grid_with_zero(lo: float, hi: float, n: int) -> np.ndarray:
    """``linspace(lo, hi, n)``, with 0 snapped onto the nearest node or inserted.

    A node within ``1e-9`` of a step from 0 is set to exactly 0; otherwise 0 is
    inserted, giving ``n + 1`` points.
    """
    grid = np.linspace(lo, hi, n)
    if lo < 0.0 < hi:
        step = (hi - lo) / (n - 1)
        i = int(np.argmin(np.abs(grid)))
        if abs(grid[i]) <= 1e-9 * step:
            grid[i] = 0.0
        else:
            grid = np.insert(grid, int(np.searchsorted(grid, 0.0)), 0.0)
    return grid


def h_curve(dist: Distribution, lambda_min: float, lambda_max: float, n_points: int) -> HCurve:
    if not lambda_min < lambda_max:
        raise ParameterError(f"need lambda_min < lambda_max, got {lambda_min!r}, {lambda_max!r}")
    if n_points < 2:
        raise ParameterError(f"need at least 2 points, got {n_points!r}")
    lams = grid_with_zero(float(lambda_min), float(lambda_max), int(n_points))
    return HCurve(lambdas=lams, values=h_eval(dist, lams),
                  dist_fingerprint=fingerprint(dist), series_switch=series_switch(dist))
