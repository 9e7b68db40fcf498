"""Closed-form proxy variances and the catalog of named reference cases."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath as mp
from scipy.optimize import brentq

from .distributions import (Beta, Bernoulli, Binomial, DiracMixture, Distribution, IndependentSum,
                            Mixture, Triangular, Uniform, rademacher, symmetric_three_point,
                            to_spec, variance)
from .errors import ParameterError
from .strictness import Verdict

# |mu - 1/2| at or below this uses the continuous extension (1/4, 0)
BERNOULLI_SYMMETRIC_BAND = 1e-8


def bernoulli_proxy(mu: float) -> Tuple[float, float]:
    """Optimal proxy variance and maximizer of h for ``Bernoulli(mu)``.

    Returns
    -------
    sigma_sq : float
        ``(1/2 - mu) / log(1/mu - 1)``, or ``1/4`` at ``mu = 1/2``.
    lambda0 : float
        ``2 log((1 - mu) / mu)``.
    """
    if not 0.0 < mu < 1.0:
        raise ParameterError(f"mu must lie in (0, 1), got {mu!r}")
    if abs(mu - 0.5) <= BERNOULLI_SYMMETRIC_BAND:
        return 0.25, 0.0
    # log((1 - mu)/mu) without cancellation near mu = 1/2
    ell = math.log1p((1.0 - 2.0 * mu) / mu)
    return (0.5 - mu) / ell, 2.0 * ell


def binomial_proxy(n: int, mu: float) -> float:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    return n * bernoulli_proxy(mu)[0]


def uniform_sum_proxy(intervals: Sequence[Tuple[float, float]]) -> float:
    """Proxy variance of a sum of independent uniforms, ``sum (b - a)^2 / 12``."""
    if len(intervals) == 0:
        raise ParameterError("need at least one interval")
    total = []
    for a, b in intervals:
        if not a < b:
            raise ParameterError(f"interval needs a < b, got ({a!r}, {b!r})")
        total.append((b - a) ** 2 / 12.0)
    return math.fsum(total)


def triangular_kappa3(a: float, b: float) -> float:
    """Third central moment of the triangular law on ``(-a, b)`` with apex 0."""
    if not (a > 0 and b > 0):
        raise ParameterError(f"a and b must be positive, got {a!r}, {b!r}")
    return (b - a) * (2 * a + b) * (2 * b + a) / 270.0


def kumaraswamy_zero_skew_alpha(beta: float) -> float:
    """``alpha = 1 / (beta - (beta - 1) 2^(1/beta))``.

    This is the curve on which the mode and the median of Kumaraswamy(alpha,
    beta) coincide. It passes through ``(1, 1)``, but off that point the third
    central moment is small and nonzero; see
    :func:`kumaraswamy_third_moment_root` for the exact ``kappa3 = 0`` curve.
    """
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta!r}")
    if beta == 1.0:
        return 1.0
    denom = beta - (beta - 1.0) * 2.0 ** (1.0 / beta)
    if not denom > 0:
        raise ParameterError(f"alpha formula undefined at beta={beta!r} (denominator {denom!r})")
    return 1.0 / denom


def kumaraswamy_kappa3(alpha: float, beta: float) -> float:
    """Third central moment of Kumaraswamy(alpha, beta) from ``E[X^n] = beta B(1 + n/alpha, beta)``."""
    with mp.workdps(40):
        a, b = mp.mpf(alpha), mp.mpf(beta)
        m1, m2, m3 = (b * mp.beta(1 + n / a, b) for n in (1, 2, 3))
        return float(m3 - 3 * m1 * m2 + 2 * m1 ** 3)


def kumaraswamy_third_moment_root(beta: float) -> float:
    """The ``alpha`` with ``kappa3 = 0`` for the given ``beta``, by bracketed root finding."""
    guess = kumaraswamy_zero_skew_alpha(beta)
    if beta == 1.0:
        return 1.0

    def f(a):
        return kumaraswamy_kappa3(a, beta)

    lo, hi = guess / 1.5, guess * 1.5
    for _ in range(40):
        if f(lo) * f(hi) < 0:
            break
        lo, hi = lo / 1.5, hi * 1.5
    else:
        raise ParameterError(f"no sign change of kappa3 around alpha={guess!r} at beta={beta!r}")
    return brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)


@dataclass(frozen=True)
class NamedCase:
    name: str
    dist: Distribution
    expected_verdict: Verdict
    expected_sigma: Optional[float]
    source: str

    def __post_init__(self):
        if self.expected_sigma is not None and self.expected_sigma < variance(self.dist) - 1e-12:
            raise ParameterError(f"{self.name}: expected_sigma below the variance")

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "dist": to_spec(self.dist),
                "expected_verdict": self.expected_verdict.value,
                "expected_sigma": self.expected_sigma, "source": self.source}


ASYM_STRICT_ATOMS = ((-2.0, 1 / 13), (-0.5, 4 / 7), (1.25, 32 / 91))


def beta_mixture(eta: float = 0.1, a: float = 1.5, b: float = 9.0) -> Mixture:
    """``eta Beta(a, a) + (1 - eta) Beta(b, b)``; all components share mean 1/2."""
    return Mixture(((eta, Beta(a, a)), (1.0 - eta, Beta(b, b))))


def counterexample_catalog() -> List[NamedCase]:
    """Named laws with known verdicts (and proxy variances where exact)."""
    S, N = Verdict.STRICT, Verdict.NOT_STRICT
    return [
        NamedCase("sym-not-strict", symmetric_three_point(0.25), N, None,
                  "symmetric atoms -1, 0, 1; kappa4 = eta(1 - 3 eta) > 0 at eta = 0.25"),
        NamedCase("sym-strict", symmetric_three_point(0.4), S, 0.4,
                  "symmetric atoms -1, 0, 1 at eta = 0.4; maximum of h at zero"),
        NamedCase("beta-mixture", beta_mixture(), N, None,
                  "0.1 Beta(1.5, 1.5) + 0.9 Beta(9, 9): symmetric, kappa4 > 0"),
        NamedCase("asym-strict", DiracMixture(ASYM_STRICT_ATOMS), S, 1.0,
                  "asymmetric atoms (-2, -1/2, 5/4) with weights (1/13, 4/7, 32/91); mean 0, Var 1"),
        NamedCase("rademacher", rademacher(), S, 1.0,
                  "uniform on {-1, +1}; (2j)! >= 2^j j! for every j"),
        NamedCase("uniform", Uniform(0.0, 1.0), S, 1.0 / 12.0,
                  "uniform on (0, 1); proxy variance equals (b - a)^2 / 12"),
        NamedCase("bernoulli-0.1", Bernoulli(0.1), N, bernoulli_proxy(0.1)[0],
                  "Bernoulli closed form (1/2 - mu) / log(1/mu - 1)"),
        NamedCase("binomial-10-0.3", Binomial(10, 0.3), N, binomial_proxy(10, 0.3),
                  "binomial proxy variance is n times the Bernoulli one"),
        NamedCase("uniform-sum", IndependentSum((Uniform(0.0, 1.0), Uniform(0.0, 2.0))), S,
                  uniform_sum_proxy([(0.0, 1.0), (0.0, 2.0)]),
                  "h of an independent sum is the sum of the h functions"),
        NamedCase("triangular-1-1", Triangular(1.0, 1.0), S, 1.0 / 6.0,
                  "symmetric triangular; 12^j j! <= (2j + 2)!/2"),
        NamedCase("triangular-1-2", Triangular(1.0, 2.0), N, None,
                  "asymmetric triangular; kappa3 = 2/27"),
        NamedCase("beta-2-2", Beta(2.0, 2.0), S, 0.05, "symmetric beta"),
    ]


def catalog_by_name() -> Dict[str, NamedCase]:
    return {c.name: c for c in counterexample_catalog()}
