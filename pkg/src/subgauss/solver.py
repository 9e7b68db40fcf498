"""Optimal proxy variance: maximize ``h`` directly, or bisect on the sign of Delta.

``sigma_opt^2 = max_lam h(lam)``, and the maximizer lies in ``|lam| <= 2B/Var``
because ``K(lam) <= |lam| B`` forces ``h(lam) <= 2B/|lam|`` there.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .cgf import cgf_derivs
from .distributions import Distribution, fingerprint, is_symmetric, support, support_radius, variance
from .errors import ConvergenceError, DegenerateDistributionError, ParameterError
from .hfunc import grid_with_zero, h_eval

HMAX = "HMAX"
DELTA = "DELTA"
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
# relative slack on the scaled Delta predicate; absorbs rounding in h
DELTA_PREDICATE_SLACK = 1e-13


@dataclass(frozen=True)
class SolverOptions:
    grid_points: int = 4097
    lambda_tol: float = 1e-12
    sigma_rel_tol: float = 1e-10
    bracket_margin: float = 1.25
    delta_grid_points: int = 8193
    max_bisection_iters: int = 200
    seed: int = 0

    def __post_init__(self):
        for name in ("lambda_tol", "sigma_rel_tol"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and val > 0 and math.isfinite(val)):
                raise ParameterError(f"{name} must be positive, got {val!r}")
        if not self.bracket_margin >= 1.0:
            raise ParameterError(f"bracket_margin must be >= 1, got {self.bracket_margin!r}")
        for name, low in (("grid_points", 3), ("delta_grid_points", 3), ("max_bisection_iters", 1)):
            val = getattr(self, name)
            if isinstance(val, bool) or int(val) != val or val < low:
                raise ParameterError(f"{name} must be an integer >= {low}, got {val!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def replace(self, **changes) -> "SolverOptions":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class SolveResult:
    sigma_opt_sq: float
    lambda_star: float
    method: str
    stationarity_residual: float
    bracket: Tuple[float, float]
    evaluations: int
    dist_fingerprint: str = ""
    options: Optional[SolverOptions] = field(default=None, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma_opt_sq": self.sigma_opt_sq,
            "lambda_star": self.lambda_star,
            "method": self.method,
            "stationarity_residual": self.stationarity_residual,
            "bracket": list(self.bracket),
            "evaluations": self.evaluations,
            "dist_fingerprint": self.dist_fingerprint,
            "options": self.options.to_dict() if self.options else None,
        }


class _Counted:
    """Wrap ``h_eval`` and count evaluated points."""

    def __init__(self, dist):
        self.dist = dist
        self.count = 0

    def __call__(self, lam):
        self.count += int(np.size(lam))
        return h_eval(self.dist, lam)


def _variance_checked(dist: Distribution) -> float:
    var = variance(dist)
    if not var > 0.0:
        raise DegenerateDistributionError(f"variance is {var!r}; the law is a point mass")
    return var


def bracket_bound(dist: Distribution, opts: SolverOptions = SolverOptions()) -> Tuple[float, float]:
    """``(-L, L)`` with ``L = margin * 2B / Var``; contains every maximizer of h."""
    var = _variance_checked(dist)
    big = opts.bracket_margin * 2.0 * support_radius(dist) / var
    return -big, big


def stationarity_residual(dist: Distribution, lam: float) -> float:
    """``lam K'(lam) - 2 K(lam)``; zero at every interior critical point of h."""
    k, k1, _ = cgf_derivs(dist, float(lam))
    return float(lam) * k1 - 2.0 * k


def _golden_max(f: Callable[[float], float], a: float, b: float, tol: float,
                max_iter: int = 300):
    """Golden-section search for a maximum of ``f`` on ``[a, b]``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc >= fd else (d, fd)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if fc > best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if fd > best[1]:
                best = (d, fd)
    return best


def _polish(dist, lam, width):
    """Bracketed root of the stationarity residual next to ``lam``, or None."""
    def r(x):
        return stationarity_residual(dist, x)

    step = max(1e-9 * max(1.0, abs(lam)), 1e-3 * width)
    for _ in range(8):
        lo, hi = lam - step, lam + step
        if lo * hi > 0.0:
            rl, rh = r(lo), r(hi)
            if rl == 0.0:
                return lo
            if rh == 0.0:
                return hi
            if rl * rh < 0.0:
                return brentq(r, lo, hi, xtol=1e-15 * max(1.0, abs(lam)), rtol=8.9e-16)
        step *= 4.0
        if step > width:
            break
    return None


def _best_grid_index(grid, values, symmetric: bool) -> int:
    if symmetric:
        allowed = np.flatnonzero(grid >= 0.0)
        return int(allowed[np.argmax(values[allowed])])
    return int(np.argmax(values))


def solve_hmax(dist: Distribution, opts: SolverOptions = SolverOptions()) -> SolveResult:
    """Maximize h by a bracketed grid scan and golden-section refinement.

    The grid always contains ``lam = 0``. When the best grid node is 0 the
    result is ``(Var, 0)``. Otherwise golden-section runs on the two cells around
    the best node and the result is polished by a bracketed root of the
    stationarity residual when that improves it without lowering h.
    """
    var = _variance_checked(dist)
    lo, hi = bracket_bound(dist, opts)
    h = _Counted(dist)
    grid = grid_with_zero(lo, hi, opts.grid_points)
    values = h(grid)
    sym = is_symmetric(dist)
    i = _best_grid_index(grid, values, sym)
    fp = fingerprint(dist)

    if grid[i] == 0.0:
        return SolveResult(sigma_opt_sq=var, lambda_star=0.0, method=HMAX,
                           stationarity_residual=0.0, bracket=(lo, hi),
                           evaluations=h.count, dist_fingerprint=fp, options=opts)

    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid.size - 1)]
    if sym:
        a = max(a, 0.0)
    lam, best = _golden_max(lambda x: float(h(x)), a, b, opts.lambda_tol * max(1.0, abs(grid[i])))
    if best < values[i]:
        lam, best = float(grid[i]), float(values[i])

    polished = _polish(dist, lam, b - a)
    if polished is not None and a <= polished <= b:
        hp = float(h(polished))
        # h is flat at its maximum, so a root of the residual may read a few ulps lower
        if (hp >= best - 1e-13 * abs(best)
                and abs(stationarity_residual(dist, polished)) < abs(stationarity_residual(dist, lam))):
            lam = polished
    if sym:
        lam = abs(lam)

    if lam == 0.0:
        sigma, resid = var, 0.0
    else:
        sigma = float(h(lam))
        resid = stationarity_residual(dist, lam)
    return SolveResult(sigma_opt_sq=sigma, lambda_star=float(lam), method=HMAX,
                       stationarity_residual=resid, bracket=(lo, hi),
                       evaluations=h.count, dist_fingerprint=fp, options=opts)


def _scaled_delta(sig2, lam, hvals, var):
    """``Delta(sig2, lam)`` divided by ``(exp(lam^2 sig2 / 2) - 1)``-scale; same sign as Delta.

    Equals ``expm1(lam^2 (sig2 - h) / 2) / (lam^2 sig2 / 2)``, and
    ``(sig2 - Var) / sig2`` at ``lam = 0``.
    """
    lam = np.asarray(lam, dtype=float)
    hvals = np.asarray(hvals, dtype=float)
    l2 = lam * lam
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        out = np.expm1(0.5 * l2 * (sig2 - hvals)) / (0.5 * l2 * sig2)
    return np.where(lam == 0.0, (sig2 - var) / sig2, out)


def solve_delta(dist: Distribution, opts: SolverOptions = SolverOptions()) -> SolveResult:
    """Smallest ``sig2`` with ``Delta(sig2, lam) >= 0`` for every ``lam``, by bisection.

    The predicate is evaluated as the minimum of a sign-preserving rescaling of
    Delta over a grid on the bracket, refined by golden-section around the grid
    minimizer. Bisection runs on ``[Var, (support length)^2 / 4]``.

    Raises
    ------
    ConvergenceError
        If the interval does not shrink below ``sigma_rel_tol * Var`` within
        ``max_bisection_iters`` halvings.
    """
    var = _variance_checked(dist)
    lo_b, hi_b = bracket_bound(dist, opts)
    h = _Counted(dist)
    grid = grid_with_zero(lo_b, hi_b, opts.delta_grid_points)
    hgrid = h(grid)
    sym = is_symmetric(dist)
    fp = fingerprint(dist)

    def min_delta(sig2):
        q = _scaled_delta(sig2, grid, hgrid, var)
        j = int(np.argmin(q))
        a, b = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
        if a < 0.0 < b and grid[j] == 0.0:
            return float(q[j]), 0.0
        lam, negq = _golden_max(lambda x: -float(_scaled_delta(sig2, x, h(x), var)), a, b,
                                opts.lambda_tol * max(1.0, abs(grid[j])))
        if -negq > q[j]:
            return float(q[j]), float(grid[j])
        return -negq, lam

    def feasible(sig2):
        return min_delta(sig2)[0] >= -DELTA_PREDICATE_SLACK

    def result(sig2, lam, iters_used):
        lam = abs(lam) if sym else lam
        resid = 0.0 if lam == 0.0 else stationarity_residual(dist, lam)
        return SolveResult(sigma_opt_sq=float(sig2), lambda_star=float(lam), method=DELTA,
                           stationarity_residual=resid, bracket=(lo_b, hi_b),
                           evaluations=h.count, dist_fingerprint=fp, options=opts)

    if feasible(var):
        return result(var, 0.0, 0)

    s_lo, s_hi = support(dist)
    upper = max((s_hi - s_lo) ** 2 / 4.0, var)
    for _ in range(8):
        if feasible(upper):
            break
        upper *= 2.0
    else:
        raise ConvergenceError(f"Delta predicate never held up to sigma^2={upper!r}")

    lower = var
    width_tol = opts.sigma_rel_tol * var
    for it in range(opts.max_bisection_iters):
        if upper - lower <= width_tol:
            mid = 0.5 * (lower + upper)
            return result(mid, min_delta(mid)[1], it)
        mid = 0.5 * (lower + upper)
        if feasible(mid):
            upper = mid
        else:
            lower = mid
    raise ConvergenceError(
        f"bisection did not reach width {width_tol:.3g} in {opts.max_bisection_iters} iterations "
        f"(bracket [{lower!r}, {upper!r}])")
