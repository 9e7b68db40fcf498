"""Pure-numpy implementations of the hot CGF kernels.

These mirror ``_ckernels.pyx`` one-for-one and are used whenever the
compiled extension is unavailable (or ``SUBGAUSS_PURE_PYTHON=1``).
"""
import math

import numpy as np
from scipy.special import gammaln

# coefficients of (e^x - 1 - x) / x^2 = sum_k x^k / (k+2)!
_TAIL2 = np.array([1.0 / math.factorial(k + 2) for k in range(20)])
_SMALL = 1.0
_SHIFT_FROM = 500.0
_CHUNK = 1024


def _tail2(x):
    """``exp(x) - 1 - x`` without cancellation for ``|x| <= 1``."""
    out = np.expm1(x) - x
    small = np.abs(x) <= _SMALL
    if np.any(small):
        xs = x[small]
        acc = np.zeros_like(xs)
        for c in _TAIL2[::-1]:
            acc = acc * xs + c
        out[small] = xs * xs * acc
    return out


def tilted_cgf(d, p, s, lam):
    """Centered CGF of a discrete law and its first two derivatives.

    Parameters
    ----------
    d : array
        Atom offsets from the (floating-point) mean.
    p : array
        Atom weights, normalised to sum to one.
    s : float
        Residual mean ``sum(p * d)``; the CGF is re-centered by it.
    lam : array
        Evaluation points.

    Returns
    -------
    K, K1, K2 : arrays shaped like ``lam``.
    """
    d = np.ascontiguousarray(d, dtype=float)
    p = np.ascontiguousarray(p, dtype=float)
    lam = np.ascontiguousarray(lam, dtype=float)
    K = np.empty_like(lam)
    K1 = np.empty_like(lam)
    K2 = np.empty_like(lam)
    for start in range(0, lam.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        lc = lam[sl]
        x = lc[:, None] * d[None, :]
        small = np.max(np.abs(x), axis=1) <= _SMALL

        # near the origin: log1p of the centred sum keeps relative accuracy
        xs = x[small]
        ls = lc[small]
        T = _tail2(xs) @ p
        Z = 1.0 + ls * s + T
        N1 = s + (np.expm1(xs) * d) @ p
        N2 = (np.exp(xs) * d * d) @ p
        t = N1 / Z
        Ks = np.log1p(ls * s + T) - ls * s
        K1s = t - s
        K2s = N2 / Z - t * t

        # elsewhere: log-sum-exp with the largest exponent factored out
        xl = x[~small]
        ll = lc[~small]
        m = np.max(xl, axis=1) if xl.size else np.zeros(0)
        w = np.exp(xl - m[:, None]) * p[None, :]
        Zl = w.sum(axis=1)
        tl = (w @ d) / Zl
        Kl = m + np.log(Zl) - ll * s
        K1l = tl - s
        K2l = (w * (d[None, :] - tl[:, None]) ** 2).sum(axis=1) / Zl

        kc = np.empty_like(lc)
        k1c = np.empty_like(lc)
        k2c = np.empty_like(lc)
        kc[small], kc[~small] = Ks, Kl
        k1c[small], k1c[~small] = K1s, K1l
        k2c[small], k2c[~small] = K2s, K2l
        K[sl], K1[sl], K2[sl] = kc, k1c, k2c
    return K, K1, K2


def series_cgf(logr, mu, lam, rtol=1e-17):
    """Centered CGF from the raw-moment power series of a law on [0, 1].

    ``logr[n]`` is ``log E[X**n]`` (so ``logr[0] == 0``). Only ``lam >= 0``
    is accepted; every term of the series is then positive.

    Returns
    -------
    K, K1, K2 : arrays shaped like ``lam``.
    converged : bool array, False where the series had not reached
        ``rtol`` by the end of ``logr``.
    """
    logr = np.ascontiguousarray(logr, dtype=float)
    lam = np.ascontiguousarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("series_cgf needs lam >= 0")
    N = logr.size
    n = np.arange(N, dtype=float)
    logn = np.log(np.maximum(n, 1.0))
    lognm1 = np.log(np.maximum(n - 1.0, 1.0))
    base = logr - gammaln(n + 1.0)

    K = np.zeros_like(lam)
    K1 = np.zeros_like(lam)
    K2 = np.empty_like(lam)
    ok = np.ones(lam.shape, dtype=bool)
    r1 = math.exp(logr[1])
    K2[:] = math.exp(logr[2]) - r1 * r1

    pos = np.flatnonzero(lam > 0)
    for start in range(0, pos.size, _CHUNK):
        idx = pos[start:start + _CHUNK]
        lc = lam[idx]
        ll = np.log(lc)
        shift = np.where(lc > _SHIFT_FROM, lc, 0.0)
        lt = n[None, :] * ll[:, None] + base[None, :] - shift[:, None]
        t = np.exp(lt)
        t[:, 0] = 0.0
        u1 = np.exp(lt - ll[:, None] + logn[None, :])
        u1[:, 0] = 0.0
        u2 = np.exp(lt - 2.0 * ll[:, None] + logn[None, :] + lognm1[None, :])
        u2[:, :2] = 0.0
        S0 = t.sum(axis=1)
        S1 = u1.sum(axis=1)
        S2 = u2.sum(axis=1)
        tail_ok = (
            (t[:, -1] <= rtol * S0)
            & (u1[:, -1] <= rtol * S1)
            & (u2[:, -1] <= rtol * S2)
            & (lc < N - 3)
        )
        scaled = shift > 0
        M = np.where(scaled, np.exp(-shift) + S0, 1.0 + S0)
        logM = np.where(scaled, shift + np.log(M), np.log1p(S0))
        q1 = S1 / M
        K[idx] = logM - lc * mu
        K1[idx] = q1 - mu
        K2[idx] = S2 / M - q1 * q1
        ok[idx] = tail_ok
    return K, K1, K2, ok
