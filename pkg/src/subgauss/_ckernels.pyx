# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CGF kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np

from libc.math cimport exp, expm1, fabs, lgamma, log, log1p

cdef double _SMALL = 1.0
cdef double _SHIFT_FROM = 500.0


cdef double _TAIL2[20]
for _k in range(20):
    _TAIL2[_k] = 1.0 / float(np.prod(np.arange(1, _k + 3, dtype=np.float64)))


cdef inline double _tail2(double x) noexcept nogil:
    # exp(x) - 1 - x; Horner on sum_k x^k / (k+2)! near the origin
    cdef double acc = 0.0
    cdef int k
    if fabs(x) > _SMALL:
        return expm1(x) - x
    for k in range(19, -1, -1):
        acc = acc * x + _TAIL2[k]
    return x * x * acc


def tilted_cgf(d, p, double s, lam):
    cdef double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[::1] lv = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t G = lv.shape[0], A = dv.shape[0], g, i
    K_arr = np.empty(G)
    K1_arr = np.empty(G)
    K2_arr = np.empty(G)
    cdef double[::1] K = K_arr
    cdef double[::1] K1 = K1_arr
    cdef double[::1] K2 = K2_arr
    cdef double l, x, xmax, amax, T, Z, N1, N2, t, w, dd, em
    cdef double[::1] wv = np.empty(A)
    with nogil:
        for g in range(G):
            l = lv[g]
            amax = 0.0
            xmax = l * dv[0]
            for i in range(A):
                x = l * dv[i]
                if fabs(x) > amax:
                    amax = fabs(x)
                if x > xmax:
                    xmax = x
            if amax <= _SMALL:
                T = 0.0
                N1 = 0.0
                N2 = 0.0
                for i in range(A):
                    x = l * dv[i]
                    em = expm1(x)
                    T += pv[i] * _tail2(x)
                    N1 += pv[i] * dv[i] * em
                    N2 += pv[i] * dv[i] * dv[i] * (1.0 + em)
                Z = 1.0 + l * s + T
                t = (s + N1) / Z
                K[g] = log1p(l * s + T) - l * s
                K1[g] = t - s
                K2[g] = N2 / Z - t * t
            else:
                Z = 0.0
                N1 = 0.0
                for i in range(A):
                    w = pv[i] * exp(l * dv[i] - xmax)
                    wv[i] = w
                    Z += w
                    N1 += w * dv[i]
                t = N1 / Z
                N2 = 0.0
                for i in range(A):
                    w = wv[i]
                    dd = dv[i] - t
                    N2 += w * dd * dd
                K[g] = xmax + log(Z) - l * s
                K1[g] = t - s
                K2[g] = N2 / Z
    return K_arr, K1_arr, K2_arr


def series_cgf(logr, double mu, lam, double rtol=1e-17):
    cdef double[::1] lr = np.ascontiguousarray(logr, dtype=np.float64)
    cdef double[::1] lv = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t G = lv.shape[0], N = lr.shape[0], g, n
    K_arr = np.zeros(G)
    K1_arr = np.zeros(G)
    K2_arr = np.empty(G)
    ok_arr = np.ones(G, dtype=bool)
    cdef double[::1] K = K_arr
    cdef double[::1] K1 = K1_arr
    cdef double[::1] K2 = K2_arr
    cdef unsigned char[::1] ok = ok_arr.view(np.uint8)
    cdef double l, ll, shift, t, u1, u2, S0, S1, S2, M, logM, q1, var0, inv
    cdef bint done
    # log of r_n / n!, shared by every lambda
    cdef double[::1] base = np.empty(N)
    if np.any(np.asarray(lam) < 0):
        raise ValueError("series_cgf needs lam >= 0")
    var0 = exp(lr[2]) - exp(lr[1]) * exp(lr[1])
    for n in range(N):
        base[n] = lr[n] - lgamma(n + 1.0)
    with nogil:
        for g in range(G):
            l = lv[g]
            if l == 0.0:
                K2[g] = var0
                continue
            ll = log(l)
            shift = l if l > _SHIFT_FROM else 0.0
            S0 = 0.0
            S1 = 0.0
            S2 = 0.0
            done = False
            inv = 1.0 / l
            for n in range(1, N):
                t = exp(n * ll + base[n] - shift)
                u1 = t * n * inv
                u2 = u1 * (n - 1) * inv
                S0 += t
                S1 += u1
                S2 += u2
                if n > l + 2 and t <= rtol * S0 and u1 <= rtol * S1 and u2 <= rtol * S2:
                    done = True
                    break
            ok[g] = done
            if shift > 0:
                M = exp(-shift) + S0
                logM = shift + log(M)
            else:
                M = 1.0 + S0
                logM = log1p(S0)
            q1 = S1 / M
            K[g] = logM - l * mu
            K1[g] = q1 - mu
            K2[g] = S2 / M - q1 * q1
    return K_arr, K1_arr, K2_arr, ok_arr
