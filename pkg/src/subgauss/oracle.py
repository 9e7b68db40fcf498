"""Independent checks: Monte-Carlo MGF, quadrature moments, direct inequality test.

Nothing here uses the CGF evaluators or the exact-moment code, except
:func:`verify_inequality`, which checks the inequality itself rather than
recomputing K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy.special import betaln

from .cgf import cgf_centered
from .distributions import (Affine, Bernoulli, Beta, Binomial, DiracMixture, Distribution,
                            IndependentSum, Kumaraswamy, Mixture, Triangular, Uniform, mean)
from .errors import EvaluationError, ParameterError

MC_CHUNK = 1 << 16
QUAD_TOL = 1e-12
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


# ---------------------------------------------------------------------------
# sampling

def sample(dist: Distribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` variates; inverse CDF for uniform, triangular and Kumaraswamy."""
    if isinstance(dist, Bernoulli):
        return (rng.random(n) < dist.mu).astype(float)
    if isinstance(dist, Binomial):
        return rng.binomial(dist.n, dist.mu, size=n).astype(float)
    if isinstance(dist, Uniform):
        return dist.a + (dist.b - dist.a) * rng.random(n)
    if isinstance(dist, Triangular):
        a, b = dist.a, dist.b
        u = rng.random(n)
        left = u < a / (a + b)
        return np.where(left, -a + np.sqrt(u * a * (a + b)),
                        b - np.sqrt((1.0 - u) * b * (a + b)))
    if isinstance(dist, Beta):
        return rng.beta(dist.alpha, dist.beta, size=n)
    if isinstance(dist, Kumaraswamy):
        u = rng.random(n)
        return (-np.expm1(np.log1p(-u) / dist.beta)) ** (1.0 / dist.alpha)
    if isinstance(dist, DiracMixture):
        p = np.array(dist.weights)
        return np.asarray(dist.locations)[rng.choice(len(p), size=n, p=p / p.sum())]
    if isinstance(dist, Mixture):
        w = np.array([c[0] for c in dist.components])
        counts = rng.multinomial(n, w / w.sum())
        parts = [sample(d, int(k), rng) for k, (_, d) in zip(counts, dist.components)]
        return rng.permutation(np.concatenate(parts))
    if isinstance(dist, Affine):
        return dist.scale * sample(dist.inner, n, rng) + dist.shift
    if isinstance(dist, IndependentSum):
        out = np.zeros(n)
        for t in dist.terms:
            out += sample(t, n, rng)
        return out
    raise ParameterError(f"not a distribution: {dist!r}")


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int


def mc_mgf(dist: Distribution, lam: float, n: int = 1_000_000, seed: int = 0) -> McEstimate:
    """Monte-Carlo estimate of ``E exp(lam (X - mean))``.

    Samples come in fixed chunks of ``2**16``; chunk ``i`` uses a Philox stream
    spawned from ``SeedSequence(seed)``, and per-chunk means and sums of
    squares are pooled in order, so the result depends only on ``(seed, n)``.
    """
    if n < 1000:
        raise ParameterError(f"need at least 1000 samples, got {n!r}")
    if lam == 0.0:
        return McEstimate(1.0, 0.0, n, seed)
    mu = mean(dist)
    sizes = [MC_CHUNK] * (n // MC_CHUNK) + ([n % MC_CHUNK] if n % MC_CHUNK else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    count, avg, m2 = 0, 0.0, 0.0
    for size, ss in zip(sizes, streams):
        rng = np.random.Generator(np.random.Philox(ss))
        y = np.exp(lam * (sample(dist, size, rng) - mu))
        c_mean = float(y.mean())
        c_m2 = float(((y - c_mean) ** 2).sum())
        # Chan et al. pairwise update
        tot = count + size
        delta = c_mean - avg
        avg += delta * size / tot
        m2 += c_m2 + delta * delta * count * size / tot
        count = tot
    return McEstimate(value=avg, std_error=math.sqrt(m2 / (count - 1) / count),
                      n_samples=count, seed=seed)


# ---------------------------------------------------------------------------
# quadrature

def _smooth_map(t, m):
    """``phi(t) = t^m / (t^m + (1-t)^m)``, its complement and derivative."""
    tm, sm = t ** m, (1.0 - t) ** m
    den = tm + sm
    dphi = m * (t * (1.0 - t)) ** (m - 1) / den ** 2
    return tm / den, sm / den, dphi


def _adaptive_gl(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                 tol: float = QUAD_TOL, max_panels: int = 20000) -> float:
    """Adaptive composite 20-point Gauss-Legendre on ``[a, b]``."""
    def panel(lo, hi):
        x = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)
        return 0.5 * (hi - lo) * float(np.dot(_GL_WEIGHTS, f(x)))

    whole = panel(a, b)
    stack = [(a, b, whole)]
    total, scale, used = 0.0, abs(whole), 0
    while stack:
        lo, hi, est = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = panel(lo, mid), panel(mid, hi)
        used += 1
        scale = max(scale, abs(left) + abs(right))
        if abs(left + right - est) <= tol * max(scale, 1e-300) or hi - lo < 1e-14 * (b - a):
            total += left + right
        else:
            stack.append((mid, hi, right))
            stack.append((lo, mid, left))
        if used > max_panels:
            raise EvaluationError(f"quadrature on [{a}, {b}] did not converge in {max_panels} panels")
    return total


def _density_integral(g, lo, hi, logpdf, m=6):
    """``int_lo^hi g(x) f(x) dx`` after the endpoint-flattening map; ``logpdf(x, 1-x-ish)``.

    ``logpdf`` receives the point and its distances to both ends, so densities
    with endpoint singularities are evaluated without cancellation.
    """
    width = hi - lo

    def integrand(t):
        ph, phc, dph = _smooth_map(t, m)
        x = lo + width * ph
        with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
            val = g(x) * np.exp(logpdf(x, width * ph, width * phc)) * width * dph
        return np.where(dph > 0, val, 0.0)

    return _adaptive_gl(integrand, 0.0, 1.0)


def _expect(dist: Distribution, g: Callable[[np.ndarray], np.ndarray]) -> float:
    """``E[g(X)]`` by quadrature over the density, or exact sums over atoms."""
    if isinstance(dist, Bernoulli):
        x = np.array([0.0, 1.0])
        return math.fsum(np.array([1.0 - dist.mu, dist.mu]) * g(x))
    if isinstance(dist, Binomial):
        from scipy.stats import binom
        k = np.arange(dist.n + 1, dtype=float)
        return math.fsum(binom.pmf(k, dist.n, dist.mu) * g(k))
    if isinstance(dist, DiracMixture):
        p = np.array(dist.weights)
        return math.fsum(p / math.fsum(p) * g(np.array(dist.locations)))
    if isinstance(dist, Uniform):
        ld = -math.log(dist.b - dist.a)
        return _density_integral(g, dist.a, dist.b, lambda x, dl, dr: np.full_like(x, ld), m=1)
    if isinstance(dist, Triangular):
        a, b = dist.a, dist.b
        # split at the apex where the density has a kink
        left = _density_integral(g, -a, 0.0,
                                 lambda x, dl, dr: np.log(2.0 * dl / (a * (a + b))), m=1)
        right = _density_integral(g, 0.0, b,
                                  lambda x, dl, dr: np.log(2.0 * dr / (b * (a + b))), m=1)
        return left + right
    if isinstance(dist, Beta):
        al, be = dist.alpha, dist.beta
        c = betaln(al, be)
        return _density_integral(
            g, 0.0, 1.0, lambda x, dl, dr: (al - 1) * np.log(dl) + (be - 1) * np.log(dr) - c)
    if isinstance(dist, Kumaraswamy):
        al, be = dist.alpha, dist.beta

        def logpdf(x, dl, dr):
            # log(1 - x^al), accurate when x^al is near 1 via log1p of the complement
            xa = np.exp(al * np.log(dl))
            log1m = np.where(xa < 0.5, np.log1p(-xa), np.log(-np.expm1(al * np.log1p(-dr))))
            return math.log(al * be) + (al - 1) * np.log(dl) + (be - 1) * log1m
        return _density_integral(g, 0.0, 1.0, logpdf)
    if isinstance(dist, Mixture):
        return math.fsum(w * _expect(d, g) for w, d in dist.components)
    if isinstance(dist, Affine):
        return _expect(dist.inner, lambda y: g(dist.scale * y + dist.shift))
    raise ParameterError(f"no quadrature rule for {type(dist).__name__}")


def _quad_raw_moments(dist: Distribution, kmax: int):
    """Raw moments ``E[X^j]``, ``j = 0..kmax``; sums combine term moments binomially."""
    if isinstance(dist, IndependentSum):
        acc = None
        for t in dist.terms:
            r = _quad_raw_moments(t, kmax)
            if acc is None:
                acc = r
            else:
                acc = [math.fsum(math.comb(k, i) * acc[i] * r[k - i] for i in range(k + 1))
                       for k in range(kmax + 1)]
        return acc
    return [_expect(dist, lambda x, j=j: x ** j) for j in range(kmax + 1)]


def quad_mean(dist: Distribution) -> float:
    if isinstance(dist, IndependentSum):
        return math.fsum(quad_mean(t) for t in dist.terms)
    return _expect(dist, lambda x: x)


def quad_moment(dist: Distribution, k: int) -> float:
    """``E[(X - mean)^k]`` with the mean itself from quadrature."""
    if int(k) != k or k < 1:
        raise ParameterError(f"moment order must be an integer >= 1, got {k!r}")
    mu = quad_mean(dist)
    if isinstance(dist, IndependentSum):
        raw = _quad_raw_moments(dist, k)
        return math.fsum(math.comb(k, i) * raw[i] * (-mu) ** (k - i) for i in range(k + 1))
    return _expect(dist, lambda x: (x - mu) ** k)


def quad_abs_moment(dist: Distribution, k: int) -> float:
    """``E|X - mean|^k``, the natural scale for comparing odd central moments."""
    mu = quad_mean(dist)
    if isinstance(dist, IndependentSum):
        raise ParameterError("absolute moments of sums are not supported")
    return _expect(dist, lambda x: np.abs(x - mu) ** k)


# ---------------------------------------------------------------------------
# direct check of the sub-Gaussian inequality

def verify_inequality(dist: Distribution, sigma_sq: float,
                      lambda_grid: Sequence[float]) -> Tuple[bool, float, float]:
    """Check ``exp(lam^2 sigma^2 / 2) >= E exp(lam (X - mean))`` on a grid.

    A point passes when ``Delta >= -1e-10 max(1, exp(lam^2 sigma^2 / 2))``.

    Returns
    -------
    ok : bool
    worst_lambda : float
        Grid point with the most negative scaled margin.
    worst_delta : float
        ``Delta`` there.
    """
    if not sigma_sq > 0:
        raise ParameterError(f"sigma_sq must be positive, got {sigma_sq!r}")
    lam = np.asarray(lambda_grid, dtype=float).reshape(-1)
    if lam.size == 0:
        raise ParameterError("lambda grid is empty")
    a = 0.5 * lam * lam * sigma_sq
    K = np.asarray(cgf_centered(dist, lam), dtype=float)
    # Delta / exp(a) = -expm1(K - a); with a >= 0 that is Delta / max(1, exp(a))
    margin = -np.expm1(K - a)
    i = int(np.argmin(margin))
    with np.errstate(over="ignore"):
        worst = float(np.exp(a[i]) * margin[i])
    return bool(margin[i] >= -1e-10), float(lam[i]), worst
