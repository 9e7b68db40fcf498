"""Strict sub-Gaussianity: cumulant necessary conditions, a moment sufficient
condition for symmetric laws, and the max-at-zero test on h."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import mpmath as mp

from .distributions import (Affine, Bernoulli, Beta, Binomial, DiracMixture, Distribution,
                            Triangular, central_moments_mp, is_symmetric, moment_table,
                            support_radius)
from .errors import ParameterError, PreconditionError
from .solver import SolveResult, SolverOptions, solve_hmax

NECESSARY_TOL = 1e-10
LAMBDA_REL_TOL = 1e-6
DEFAULT_J_MAX = 50


class Verdict(str, enum.Enum):
    STRICT = "Strict"
    NOT_STRICT = "NotStrict"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


def gap_tolerance(var: float) -> float:
    """Largest ``sigma_opt^2 - Var`` still read as equality."""
    return max(1e-9, 1e-8 * var)


@dataclass(frozen=True)
class StrictnessVerdict:
    verdict: Verdict
    kappa3: float
    kappa4: float
    kurtosis: float
    lambda_star: float
    sigma_gap: float
    sufficient_condition_depth: Optional[int]
    reasons: Tuple[str, ...]
    solve: Optional[SolveResult] = field(default=None, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "kappa3": self.kappa3,
            "kappa4": self.kappa4,
            "kurtosis": self.kurtosis,
            "lambda_star": self.lambda_star,
            "sigma_gap": self.sigma_gap,
            "sufficient_condition_depth": self.sufficient_condition_depth,
            "reasons": list(self.reasons),
        }


def necessary_conditions(dist: Distribution, tol: float = NECESSARY_TOL) -> Tuple[bool, bool]:
    """``(|k3| <= tol B^3, k4 <= tol B^4)`` with ``B`` the support radius.

    Both must hold for a strictly sub-Gaussian law.
    """
    t = moment_table(dist, 4)
    B = support_radius(dist)
    return abs(t.kappa3) <= tol * B ** 3, t.kappa4 <= tol * B ** 4


@dataclass(frozen=True)
class MomentCondition:
    """Outcome of the even-moment check ``m_2j / (2j)! <= Var^j / (2^j j!)``.

    ``certificate`` is True only when the check passed up to ``j_max`` for a
    family where the inequality is known to hold for every ``j``.
    """

    holds_up_to: int
    violated_at: Optional[int]
    certificate: bool


def _has_full_tail_proof(dist: Distribution) -> bool:
    # two-point symmetric laws, symmetric triangular and symmetric beta
    if isinstance(dist, Affine):
        return _has_full_tail_proof(dist.inner)
    if isinstance(dist, (Bernoulli, Binomial)):
        return isinstance(dist, Bernoulli) and dist.mu == 0.5
    if isinstance(dist, DiracMixture):
        return len(dist.atoms) == 2 and is_symmetric(dist)
    if isinstance(dist, Triangular):
        return dist.a == dist.b
    if isinstance(dist, Beta):
        return dist.alpha == dist.beta
    return False


def sufficient_moment_condition(dist: Distribution, j_max: int = DEFAULT_J_MAX) -> MomentCondition:
    """Check ``E[(X-mu)^{2j}]/(2j)! <= Var^j/(2^j j!)`` for ``j = 2..j_max`` in log space.

    Raises
    ------
    PreconditionError
        If the law is not symmetric.
    """
    if j_max < 2:
        raise ParameterError(f"j_max must be at least 2, got {j_max!r}")
    if not is_symmetric(dist):
        raise PreconditionError("the moment sufficient condition applies to symmetric laws only")
    _, c = central_moments_mp(dist, 2 * j_max)
    with mp.workdps(50):
        log_var = mp.log(c[2])
        holds, violated = 1, None
        for j in range(2, j_max + 1):
            m = c[2 * j]
            if m <= 0:
                holds = j
                continue
            lhs = mp.log(m) - mp.loggamma(2 * j + 1)
            rhs = j * log_var - j * mp.log(2) - mp.loggamma(j + 1)
            if lhs > rhs + mp.mpf("1e-12"):
                violated = j
                break
            holds = j
    cert = violated is None and _has_full_tail_proof(dist)
    return MomentCondition(holds_up_to=holds, violated_at=violated, certificate=cert)


def classify(dist: Distribution, opts: SolverOptions = SolverOptions()) -> StrictnessVerdict:
    """Strict / NotStrict / Inconclusive with the evidence that decided it.

    Steps: the cumulant conditions (a failure is decisive), then the location
    of the maximizer of h, then for symmetric laws the moment condition depth
    as corroboration.
    """
    t = moment_table(dist, 4)
    B = support_radius(dist)
    k3_ok, k4_ok = necessary_conditions(dist)
    res = solve_hmax(dist, opts)
    gap = res.sigma_opt_sq - t.variance
    gap_tol = gap_tolerance(t.variance)
    lo, hi = res.bracket
    lam_tol = LAMBDA_REL_TOL * (hi - lo)

    reasons: List[str] = []
    verdict: Optional[Verdict] = None
    if not k3_ok:
        reasons.append(f"kappa3 nonzero: {t.kappa3:.6g} (tolerance {NECESSARY_TOL * B ** 3:.3g})")
        verdict = Verdict.NOT_STRICT
    if not k4_ok:
        reasons.append(f"kappa4 positive: {t.kappa4:.6g} (tolerance {NECESSARY_TOL * B ** 4:.3g})")
        verdict = Verdict.NOT_STRICT
    if gap > gap_tol:
        reasons.append(f"sigma gap {gap:.6g} exceeds {gap_tol:.3g}; maximizer at lambda={res.lambda_star:.10g}")
        verdict = Verdict.NOT_STRICT
    elif verdict is None:
        if abs(res.lambda_star) <= lam_tol:
            reasons.append(f"maximum of h at lambda=0 (gap {gap:.3g} <= {gap_tol:.3g})")
            verdict = Verdict.STRICT
        else:
            reasons.append(f"gap {gap:.3g} within tolerance but maximizer at "
                           f"lambda={res.lambda_star:.6g} beyond {lam_tol:.3g}")
            verdict = Verdict.INCONCLUSIVE

    depth = None
    if is_symmetric(dist):
        mc = sufficient_moment_condition(dist)
        depth = mc.holds_up_to
        if mc.violated_at is not None:
            reasons.append(f"moment sufficient condition fails at j={mc.violated_at}")
        else:
            kind = "certificate" if mc.certificate else "evidence"
            reasons.append(f"moment sufficient condition holds up to j={depth} ({kind})")

    return StrictnessVerdict(verdict=verdict, kappa3=t.kappa3, kappa4=t.kappa4,
                             kurtosis=t.kurtosis, lambda_star=res.lambda_star, sigma_gap=gap,
                             sufficient_condition_depth=depth, reasons=tuple(reasons), solve=res)
