"""Centered cumulant generating function ``K(lam) = log E exp(lam (X - mean))``.

Each family gets an evaluator returning ``(K, K', K'')`` on an array of
``lam``. All evaluators keep relative accuracy as ``lam -> 0`` (no ``log(M) -
lam * mean`` cancellation), which the ``h = 2K/lam**2`` ratio relies on.
"""
from __future__ import annotations

import math
from functools import lru_cache

import mpmath as mp
import numpy as np

from . import kernels
from .distributions import (Affine, Bernoulli, Beta, Binomial, DiracMixture, Distribution,
                            IndependentSum, Kumaraswamy, Mixture, Triangular, Uniform,
                            central_moments_mp, mean)
from .errors import EvaluationError, ParameterError

SERIES_RTOL = 1e-17
MAX_SERIES_TERMS = 10_000


def _scaled_tail(y, k, nterms=34):
    """``(exp(y) - sum_{j<k} y**j / j!) / y**k``; series for ``|y| <= 2``, so no underflow."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    small = np.abs(y) <= 2.0
    ys = y[small]
    acc = np.zeros_like(ys)
    for j in range(k + nterms, k - 1, -1):
        acc = acc * ys / (j + 1) + 1.0
    # acc = sum_{j>=0} y^j k!/(k+j)!
    out[small] = acc / math.factorial(k)
    yl = y[~small]
    poly = sum(yl ** j / math.factorial(j) for j in range(k))
    out[~small] = (np.exp(yl) - poly) / yl ** k
    return out


def _tail(y, k, nterms=34):
    """``exp(y) - sum_{j<k} y**j / j!`` with full relative accuracy for ``|y| <= 2``."""
    y = np.asarray(y, dtype=float)
    return y ** k * _scaled_tail(y, k, nterms)


def _as_array(lam):
    arr = np.asarray(lam, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParameterError("lambda must be finite")
    return arr


# ---------------------------------------------------------------------------
# per-family evaluators; each maps a 1-d float array to (K, K1, K2)

def _dirac_eval(locs, weights, mu):
    d = np.asarray(locs, dtype=float) - mu
    p = np.asarray(weights, dtype=float)
    p = p / math.fsum(p)
    s = math.fsum(p * d)

    def ev(lam):
        return kernels.tilted_cgf(d, p, s, lam)
    return ev


def _uniform_eval(length):
    half = 0.5 * length

    def ev(lam):
        x = lam * half
        ax = np.abs(x)
        small = ax < 1.0
        big = ax > 20.0
        mid = ~small & ~big
        K = np.empty_like(x)
        K1 = np.empty_like(x)
        K2 = np.empty_like(x)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            # sinh(x)/x - 1, (x cosh x - sinh x), sinh^2 x - x^2 as even/odd series
            xs = x[small]
            x2 = xs * xs
            q = np.zeros_like(xs)
            num1 = np.zeros_like(xs)
            num2 = np.zeros_like(xs)
            for k in range(14, 0, -1):
                q += x2 ** k / math.factorial(2 * k + 1)
                num1 += 2 * k * xs ** (2 * k + 1) / math.factorial(2 * k + 1)
                if k >= 2:
                    num2 += 0.5 * (2.0 * xs) ** (2 * k) / math.factorial(2 * k)
            sh = xs * (1.0 + q)
            K[small] = np.log1p(q)
            with np.errstate(invalid="ignore"):
                K1[small] = np.where(xs == 0.0, 0.0, num1 / (xs * sh))
                K2[small] = np.where(xs == 0.0, 1.0 / 3.0, num2 / (x2 * sh * sh))

            xm = x[mid]
            K[mid] = np.log(np.sinh(xm) / xm)
            K1[mid] = 1.0 / np.tanh(xm) - 1.0 / xm
            K2[mid] = 1.0 / xm ** 2 - 1.0 / np.sinh(xm) ** 2

            xb = x[big]
            ab = np.abs(xb)
            K[big] = ab + np.log1p(-np.exp(-2.0 * ab)) - math.log(2.0) - np.log(ab)
            K1[big] = np.sign(xb) / np.tanh(ab) - 1.0 / xb
            K2[big] = 1.0 / xb ** 2 - 4.0 * np.exp(-2.0 * ab) / (1.0 - np.exp(-2.0 * ab)) ** 2
        return K, half * K1, half * half * K2
    return ev


def _triangular_eval(a, b):
    w = np.array([a, b, -(a + b)])
    z = np.array([(a + 2 * b) / 3.0, -(b + 2 * a) / 3.0, (a - b) / 3.0])
    c = 2.0 / (a * b * (a + b))
    zmax = float(np.max(np.abs(z)))

    def ev(lam):
        K = np.zeros_like(lam)
        K1 = np.zeros_like(lam)
        K2 = np.empty_like(lam)
        K2[:] = (a * a + a * b + b * b) / 18.0
        nz = lam != 0.0
        small = nz & (np.abs(lam) * zmax <= 3.0)
        large = np.abs(lam) * zmax > 3.0

        ls = lam[small]
        y = ls[:, None] * z[None, :]
        # the lambda powers of the tails are factored out so nothing underflows
        wz4 = w * z ** 4
        A4 = _scaled_tail(y, 4) @ wz4
        A3 = _scaled_tail(y, 3) @ wz4
        A2 = _scaled_tail(y, 2) @ wz4
        M = 1.0 + c * ls * ls * A4
        M1 = c * ls * (A3 - 2.0 * A4)
        M2 = c * (A2 - 4.0 * A3 + 6.0 * A4)
        K[small] = np.log1p(c * ls * ls * A4)
        K1[small] = M1 / M
        K2[small] = M2 / M - (M1 / M) ** 2

        ll = lam[large]
        y = ll[:, None] * z[None, :]
        ymax = np.max(y, axis=1)
        e = np.exp(y - ymax[:, None])
        G = e @ w
        G1 = e @ (w * z) / G
        G2 = e @ (w * z * z) / G
        K[large] = math.log(c) + ymax + np.log(G) - 2.0 * np.log(np.abs(ll))
        K1[large] = G1 - 2.0 / ll
        K2[large] = G2 - G1 ** 2 + 2.0 / ll ** 2
        return K, K1, K2
    return ev


def _terms_needed(lam_max):
    n = int(lam_max + 12.0 * math.sqrt(lam_max) + 60)
    if n > MAX_SERIES_TERMS:
        raise EvaluationError(
            f"moment series at |lambda|={lam_max:.6g} needs more than {MAX_SERIES_TERMS} terms")
    # round up so the cache sees few distinct sizes
    return 1 << max(7, math.ceil(math.log2(n)))


@lru_cache(maxsize=256)
def _beta_logr(alpha, beta, n_terms):
    i = np.arange(n_terms - 1, dtype=float)
    logr = np.concatenate([[0.0], np.cumsum(np.log1p(-beta / (alpha + beta + i)))])
    logr[1] = math.log(alpha / (alpha + beta))
    return logr


@lru_cache(maxsize=256)
def _kumaraswamy_logr(alpha, beta, n_terms, mu):
    with mp.workdps(30):
        a, b = mp.mpf(alpha), mp.mpf(beta)
        logr = [0.0] + [float(mp.log(b) + mp.log(mp.beta(1 + n / a, b))) for n in range(1, n_terms)]
    logr[1] = math.log(mu)
    return np.array(logr)


def _series_eval(logr_fn, mu, label):
    def ev(lam):
        if lam.size == 0:
            return lam.copy(), lam.copy(), lam.copy()
        logr = logr_fn(_terms_needed(float(np.max(lam))))
        K, K1, K2, ok = kernels.series_cgf(logr, mu, lam, SERIES_RTOL)
        if not np.all(ok):
            bad = float(lam[~ok][0])
            raise EvaluationError(f"{label} moment series did not converge at lambda={bad!r}")
        return K, K1, K2
    return ev


TAYLOR_ORDER = 40


def _central_taylor_eval(dist):
    """Centered MGF from exact central moments; used where ``|lam| * B <= 1``."""
    _, c_mp = central_moments_mp(dist, TAYLOR_ORDER)
    n = np.arange(TAYLOR_ORDER + 1)
    c = np.array([float(v) for v in c_mp]) / np.array([math.factorial(k) for k in n], dtype=float)
    c[0] = c[1] = 0.0

    def ev(lam):
        # Horner for sum c_n lam^n / n!, and its first two derivatives
        m0 = np.zeros_like(lam)
        m1 = np.zeros_like(lam)
        m2 = np.zeros_like(lam)
        for k in range(TAYLOR_ORDER, 1, -1):
            m0 = m0 * lam + c[k]
            m1 = m1 * lam + k * c[k]
            m2 = m2 * lam + k * (k - 1) * c[k]
        m0 = m0 * lam * lam
        m1 = m1 * lam
        M = 1.0 + m0
        return np.log1p(m0), m1 / M, m2 / M - (m1 / M) ** 2
    return ev


def _split_eval(near, far, radius):
    """Route ``|lam| * radius <= 1`` to ``near`` and the rest to ``far``."""
    def ev(lam):
        out = [np.empty_like(lam) for _ in range(3)]
        z = np.abs(lam) * radius <= 1.0
        for sel, fn in ((z, near), (~z, far)):
            if np.any(sel):
                for arr, val in zip(out, fn(lam[sel])):
                    arr[sel] = val
        return tuple(out)
    return ev


def _beta_eval(alpha, beta):
    pos = _series_eval(lambda n: _beta_logr(alpha, beta, n), alpha / (alpha + beta),
                       f"Beta({alpha}, {beta})")
    # X - mean = -((1 - X) - (1 - mean)) with 1 - X ~ Beta(beta, alpha)
    neg = _series_eval(lambda n: _beta_logr(beta, alpha, n), beta / (alpha + beta),
                       f"Beta({beta}, {alpha})")

    def ev(lam):
        out = [np.zeros_like(lam) for _ in range(3)]
        p = lam >= 0.0
        for arr, val in zip(out, pos(lam[p])):
            arr[p] = val
        K, K1, K2 = neg(-lam[~p])
        out[0][~p], out[1][~p], out[2][~p] = K, -K1, K2
        return tuple(out)
    return ev


@lru_cache(maxsize=8)
def tanh_sinh_nodes(step=1.0 / 32.0, t_max=4.5):
    """Tanh-sinh rule on ``(0, 1)``: nodes ``u``, complements ``1 - u`` and weights."""
    t = np.arange(-t_max, t_max + step / 2, step)
    s = 0.5 * np.pi * np.sinh(t)
    u = 1.0 / (1.0 + np.exp(-2.0 * s))
    v = 1.0 / (1.0 + np.exp(2.0 * s))
    w = step * 0.5 * np.pi * np.cosh(t) / (2.0 * np.cosh(s) ** 2)
    return u, v, w


def kumaraswamy_quantile(alpha, beta, u, v=None):
    """Inverse CDF ``(1 - (1 - u)**(1/beta))**(1/alpha)``; ``v = 1 - u`` if known exactly."""
    u = np.asarray(u, dtype=float)
    v = 1.0 - u if v is None else np.asarray(v, dtype=float)
    with np.errstate(divide="ignore"):
        logv = np.where(u < 0.5, np.log1p(-np.minimum(u, 0.5)), np.log(np.maximum(v, 1e-320)))
        return np.exp(np.log(-np.expm1(logv / beta)) / alpha)


def _kumaraswamy_eval(alpha, beta, mu):
    pos = _series_eval(lambda n: _kumaraswamy_logr(alpha, beta, n, mu), mu,
                       f"Kumaraswamy({alpha}, {beta})")
    u, v, w = tanh_sinh_nodes()
    x = kumaraswamy_quantile(alpha, beta, u, v)
    neg = _dirac_eval(x, w, mu)

    def ev(lam):
        out = [np.zeros_like(lam) for _ in range(3)]
        # the series below the term cap, quadrature for lambda < 0 and beyond the cap
        p = (lam >= 0.0) & (lam + 12.0 * np.sqrt(np.abs(lam)) + 60 <= MAX_SERIES_TERMS)
        for arr, val in zip(out, pos(lam[p])):
            arr[p] = val
        for arr, val in zip(out, neg(lam[~p])):
            arr[~p] = val
        return tuple(out)
    return ev


def _tail2(x):
    return _tail(x, 2)


def _mixture_eval(dist):
    mu_mix, _ = central_moments_mp(dist, 2)
    ws = np.array([w for w, _ in dist.components])
    ws = ws / math.fsum(ws)
    d = np.array([float(central_moments_mp(c, 2)[0] - mu_mix) for _, c in dist.components])
    s = math.fsum(ws * d)
    evs = [_evaluator(c) for _, c in dist.components]

    def ev(lam):
        parts = [e(lam) for e in evs]
        Kj = np.stack([p[0] for p in parts], axis=1)
        K1j = np.stack([p[1] for p in parts], axis=1)
        K2j = np.stack([p[2] for p in parts], axis=1)
        a = Kj + lam[:, None] * d[None, :]
        small = np.max(np.abs(a), axis=1) <= 1.0
        amax = np.max(a, axis=1)
        e = np.exp(a - amax[:, None]) * ws[None, :]
        Z = e.sum(axis=1)
        pi = e / Z[:, None]
        K = np.empty_like(lam)
        K[~small] = amax[~small] + np.log(Z[~small]) - lam[~small] * s
        ls = lam[small]
        inner = Kj[small] @ ws + ls * s + _tail2(a[small]) @ ws
        K[small] = np.log1p(inner) - ls * s
        g = K1j + d[None, :]
        m1 = np.sum(pi * g, axis=1)
        K1 = m1 - s
        K2 = np.sum(pi * (K2j + (g - m1[:, None]) ** 2), axis=1)
        return K, K1, K2
    return ev


@lru_cache(maxsize=512)
def _evaluator(dist: Distribution):
    if isinstance(dist, Bernoulli):
        return _dirac_eval([0.0, 1.0], [1.0 - dist.mu, dist.mu], dist.mu)
    if isinstance(dist, Binomial):
        base = _evaluator(Bernoulli(dist.mu))
        n = dist.n

        def ev(lam):
            K, K1, K2 = base(lam)
            return n * K, n * K1, n * K2
        return ev
    if isinstance(dist, Uniform):
        return _uniform_eval(dist.b - dist.a)
    if isinstance(dist, Triangular):
        return _triangular_eval(dist.a, dist.b)
    if isinstance(dist, (Beta, Kumaraswamy)):
        mu = mean(dist)
        far = (_beta_eval(dist.alpha, dist.beta) if isinstance(dist, Beta)
               else _kumaraswamy_eval(dist.alpha, dist.beta, mu))
        return _split_eval(_central_taylor_eval(dist), far, max(mu, 1.0 - mu))
    if isinstance(dist, DiracMixture):
        return _dirac_eval(dist.locations, dist.weights, mean(dist))
    if isinstance(dist, Mixture):
        return _mixture_eval(dist)
    if isinstance(dist, Affine):
        inner = _evaluator(dist.inner)
        c = dist.scale

        def ev(lam):
            K, K1, K2 = inner(c * lam)
            return K, c * K1, c * c * K2
        return ev
    if isinstance(dist, IndependentSum):
        evs = [_evaluator(t) for t in dist.terms]

        def ev(lam):
            acc = [np.zeros_like(lam) for _ in range(3)]
            for e in evs:
                for a, v in zip(acc, e(lam)):
                    a += v
            return tuple(acc)
        return ev
    raise ParameterError(f"not a distribution: {dist!r}")


def cgf_derivs(dist: Distribution, lam):
    """``(K, K', K'')`` at ``lam`` (scalar or array), shaped like ``lam``."""
    arr = _as_array(lam)
    flat = np.ascontiguousarray(arr.reshape(-1))
    with np.errstate(over="ignore", under="ignore"):
        K, K1, K2 = _evaluator(dist)(flat)
    out = tuple(np.asarray(v, dtype=float).reshape(arr.shape) for v in (K, K1, K2))
    if not all(np.all(np.isfinite(v)) for v in out):
        raise EvaluationError(f"non-finite CGF value for {dist!r}")
    if arr.ndim == 0:
        return tuple(float(v) for v in out)
    return out


def cgf_centered(dist: Distribution, lam):
    """Centered CGF ``K(lam)``; scalar in, scalar out."""
    return cgf_derivs(dist, lam)[0]


def cgf_derivative(dist: Distribution, lam):
    """``K'(lam)``, the mean of the exponentially tilted law minus the mean."""
    return cgf_derivs(dist, lam)[1]


def cgf_second_derivative(dist: Distribution, lam):
    """``K''(lam)``, the variance of the exponentially tilted law."""
    return cgf_derivs(dist, lam)[2]


def cgf_derivative_fd(dist: Distribution, lam: float, step: float = None) -> float:
    """Central-difference ``K'``; step ``max(1e-6, 1e-6 |lam|)``, error ``O(step**2)``."""
    h = max(1e-6, 1e-6 * abs(lam)) if step is None else step
    k = cgf_centered(dist, np.array([lam - h, lam + h]))
    return float((k[1] - k[0]) / (2.0 * h))
