"""Bounded-support distributions: construction, JSON specs and exact moments.

Every distribution is an immutable (frozen, hashable) dataclass. Moments are
computed in multiple precision with :mod:`mpmath` and rounded once to float,
so tabulated values are correctly rounded up to the last bit in practice.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Tuple

import mpmath as mp

from .errors import MomentRangeError, ParameterError, SpecError

WEIGHT_SUM_TOL = 1e-12
MAX_MOMENT_ORDER = 2000


def _check_real(name: str, value, path: str = "$") -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise SpecError(f"{name} must be a real number, got {value!r}", path)
    if not math.isfinite(out):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return out


def _check_weights(weights, what: str) -> None:
    if len(weights) == 0:
        raise ParameterError(f"{what} needs at least one entry")
    for w in weights:
        if not (w > 0.0 and math.isfinite(w)):
            raise ParameterError(f"{what} weights must be strictly positive, got {w!r}")
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise ParameterError(f"{what} weights sum to {total!r}, expected 1")


class Distribution:
    """Common base of all distribution records."""

    family: str = ""

    # convenience accessors; the module-level functions are the real API
    def mean(self) -> float:
        return mean(self)

    def variance(self) -> float:
        return variance(self)

    def to_spec(self) -> Dict[str, Any]:
        return to_spec(self)


@dataclass(frozen=True)
class Bernoulli(Distribution):
    mu: float
    family = "bernoulli"

    def __post_init__(self):
        object.__setattr__(self, "mu", _check_real("mu", self.mu))
        if not 0.0 < self.mu < 1.0:
            raise ParameterError(f"Bernoulli mu must lie in (0, 1), got {self.mu!r}")


@dataclass(frozen=True)
class Binomial(Distribution):
    n: int
    mu: float
    family = "binomial"

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"Binomial n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "mu", _check_real("mu", self.mu))
        if not 0.0 < self.mu < 1.0:
            raise ParameterError(f"Binomial mu must lie in (0, 1), got {self.mu!r}")


@dataclass(frozen=True)
class Uniform(Distribution):
    a: float
    b: float
    family = "uniform"

    def __post_init__(self):
        object.__setattr__(self, "a", _check_real("a", self.a))
        object.__setattr__(self, "b", _check_real("b", self.b))
        if not self.a < self.b:
            raise ParameterError(f"Uniform needs a < b, got a={self.a!r}, b={self.b!r}")


@dataclass(frozen=True)
class Triangular(Distribution):
    """Triangular law on ``(-a, b)`` with its apex at 0."""

    a: float
    b: float
    family = "triangular"

    def __post_init__(self):
        object.__setattr__(self, "a", _check_real("a", self.a))
        object.__setattr__(self, "b", _check_real("b", self.b))
        if not (self.a > 0.0 and self.b > 0.0):
            raise ParameterError(f"Triangular needs a, b > 0, got a={self.a!r}, b={self.b!r}")


@dataclass(frozen=True)
class Beta(Distribution):
    alpha: float
    beta: float
    family = "beta"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_real("alpha", self.alpha))
        object.__setattr__(self, "beta", _check_real("beta", self.beta))
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ParameterError(f"Beta needs alpha, beta > 0, got {self.alpha!r}, {self.beta!r}")


@dataclass(frozen=True)
class Kumaraswamy(Distribution):
    """Kumaraswamy law on ``[0, 1]`` with CDF ``1 - (1 - x**alpha)**beta``."""

    alpha: float
    beta: float
    family = "kumaraswamy"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_real("alpha", self.alpha))
        object.__setattr__(self, "beta", _check_real("beta", self.beta))
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ParameterError(
                f"Kumaraswamy needs alpha, beta > 0, got {self.alpha!r}, {self.beta!r}")


@dataclass(frozen=True)
class DiracMixture(Distribution):
    """Finite law with ``atoms = ((location, weight), ...)``."""

    atoms: Tuple[Tuple[float, float], ...]
    family = "dirac_mixture"

    def __post_init__(self):
        atoms = tuple((_check_real("location", x), _check_real("weight", p))
                      for x, p in self.atoms)
        _check_weights([p for _, p in atoms], "DiracMixture")
        object.__setattr__(self, "atoms", atoms)

    @property
    def locations(self):
        return [x for x, _ in self.atoms]

    @property
    def weights(self):
        return [p for _, p in self.atoms]


@dataclass(frozen=True)
class Mixture(Distribution):
    """Convex combination ``components = ((weight, dist), ...)``."""

    components: Tuple[Tuple[float, Distribution], ...]
    family = "mixture"

    def __post_init__(self):
        comps = []
        for w, d in self.components:
            if not isinstance(d, Distribution):
                raise ParameterError(f"mixture component must be a Distribution, got {d!r}")
            comps.append((_check_real("weight", w), d))
        _check_weights([w for w, _ in comps], "Mixture")
        object.__setattr__(self, "components", tuple(comps))


@dataclass(frozen=True)
class Affine(Distribution):
    """Law of ``scale * inner + shift``."""

    scale: float
    shift: float
    inner: Distribution
    family = "affine"

    def __post_init__(self):
        object.__setattr__(self, "scale", _check_real("scale", self.scale))
        object.__setattr__(self, "shift", _check_real("shift", self.shift))
        if self.scale == 0.0:
            raise ParameterError("Affine scale must be nonzero")
        if not isinstance(self.inner, Distribution):
            raise ParameterError(f"Affine inner must be a Distribution, got {self.inner!r}")


@dataclass(frozen=True)
class IndependentSum(Distribution):
    terms: Tuple[Distribution, ...]
    family = "independent_sum"

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ParameterError("IndependentSum needs at least one term")
        for t in terms:
            if not isinstance(t, Distribution):
                raise ParameterError(f"sum term must be a Distribution, got {t!r}")
        object.__setattr__(self, "terms", terms)


def rademacher() -> DiracMixture:
    """The law uniform on ``{-1, +1}``."""
    return DiracMixture(((-1.0, 0.5), (1.0, 0.5)))


def symmetric_three_point(eta: float) -> DiracMixture:
    """Atoms ``-1, 0, 1`` with weights ``eta/2, 1 - eta, eta/2``; ``eta = 1`` is Rademacher."""
    if not 0.0 < eta <= 1.0:
        raise ParameterError(f"eta must lie in (0, 1], got {eta!r}")
    if eta == 1.0:
        return rademacher()
    return DiracMixture(((-1.0, eta / 2), (0.0, 1.0 - eta), (1.0, eta / 2)))


# ---------------------------------------------------------------------------
# JSON specs

_FAMILY_KEYS = {
    "bernoulli": ("mu",),
    "binomial": ("n", "mu"),
    "uniform": ("a", "b"),
    "triangular": ("a", "b"),
    "beta": ("alpha", "beta"),
    "kumaraswamy": ("alpha", "beta"),
    "dirac_mixture": ("atoms",),
    "mixture": ("components",),
    "affine": ("scale", "shift", "inner"),
    "independent_sum": ("terms",),
    "rademacher": (),
}
_ALIASES = {"dirac": "dirac_mixture", "sum": "independent_sum", "kuma": "kumaraswamy",
            "tri": "triangular", "ber": "bernoulli", "bin": "binomial"}


def _number(value, path: str) -> float:
    """Parse a JSON number or an exact ratio string such as ``"4/7"``."""
    if isinstance(value, bool):
        raise SpecError(f"expected a number, got {value!r}", path)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise SpecError(f"expected a number or ratio string, got {value!r}", path)


def _field(obj: dict, key: str, path: str):
    if key not in obj:
        raise SpecError(f"missing field '{key}'", path)
    return obj[key]


def from_spec(spec: Any, path: str = "$") -> Distribution:
    """Build a distribution from its JSON-compatible description.

    Parameters
    ----------
    spec : dict
        ``{"family": name, ...parameters}``. Families and fields::

            bernoulli        mu
            binomial         n, mu
            uniform          a, b
            triangular       a, b          (support (-a, b), apex at 0)
            beta             alpha, beta
            kumaraswamy      alpha, beta   (alpha may be "zero_skew")
            dirac_mixture    atoms: [[x, p], ...] or [{"x": x, "p": p}, ...]
            mixture          components: [{"weight": w, "dist": spec}, ...]
            affine           scale, shift, inner: spec
            independent_sum  terms: [spec, ...]
            rademacher       (no fields)

        Numbers may be given as ratio strings like ``"1/13"``.
    path : str
        JSON path prefix used in error messages.

    Raises
    ------
    SpecError
        Malformed structure; the message names the offending field path.
    """
    if not isinstance(spec, dict):
        raise SpecError(f"expected an object, got {type(spec).__name__}", path)
    fam = _field(spec, "family", path)
    if not isinstance(fam, str):
        raise SpecError("family must be a string", f"{path}.family")
    fam = _ALIASES.get(fam.lower(), fam.lower())
    if fam not in _FAMILY_KEYS:
        raise SpecError(f"unknown family {fam!r}", f"{path}.family")
    unknown = set(spec) - set(_FAMILY_KEYS[fam]) - {"family"}
    if unknown:
        raise SpecError(f"unexpected field(s) {sorted(unknown)} for family {fam!r}", path)

    def num(key):
        return _number(_field(spec, key, path), f"{path}.{key}")

    try:
        if fam == "bernoulli":
            return Bernoulli(num("mu"))
        if fam == "binomial":
            n = _field(spec, "n", path)
            if isinstance(n, bool) or not isinstance(n, int):
                raise SpecError(f"n must be an integer, got {n!r}", f"{path}.n")
            return Binomial(n, num("mu"))
        if fam in ("uniform", "triangular"):
            cls = Uniform if fam == "uniform" else Triangular
            return cls(num("a"), num("b"))
        if fam == "beta":
            return Beta(num("alpha"), num("beta"))
        if fam == "kumaraswamy":
            b = num("beta")
            a_raw = _field(spec, "alpha", path)
            if isinstance(a_raw, str) and a_raw.strip().lower() == "zero_skew":
                from .closed_forms import kumaraswamy_zero_skew_alpha
                return Kumaraswamy(kumaraswamy_zero_skew_alpha(b), b)
            return Kumaraswamy(_number(a_raw, f"{path}.alpha"), b)
        if fam == "rademacher":
            return rademacher()
        if fam == "dirac_mixture":
            raw = _field(spec, "atoms", path)
            if not isinstance(raw, list) or not raw:
                raise SpecError("atoms must be a nonempty list", f"{path}.atoms")
            atoms = []
            for i, item in enumerate(raw):
                p_i = f"{path}.atoms[{i}]"
                if isinstance(item, dict):
                    atoms.append((_number(_field(item, "x", p_i), f"{p_i}.x"),
                                  _number(_field(item, "p", p_i), f"{p_i}.p")))
                elif isinstance(item, (list, tuple)) and len(item) == 2:
                    atoms.append((_number(item[0], f"{p_i}[0]"), _number(item[1], f"{p_i}[1]")))
                else:
                    raise SpecError("atom must be [x, p] or {x, p}", p_i)
            return DiracMixture(tuple(atoms))
        if fam == "mixture":
            raw = _field(spec, "components", path)
            if not isinstance(raw, list) or not raw:
                raise SpecError("components must be a nonempty list", f"{path}.components")
            comps = []
            for i, item in enumerate(raw):
                p_i = f"{path}.components[{i}]"
                if not isinstance(item, dict):
                    raise SpecError("component must be {weight, dist}", p_i)
                comps.append((_number(_field(item, "weight", p_i), f"{p_i}.weight"),
                              from_spec(_field(item, "dist", p_i), f"{p_i}.dist")))
            return Mixture(tuple(comps))
        if fam == "affine":
            inner = from_spec(_field(spec, "inner", path), f"{path}.inner")
            return Affine(num("scale"), num("shift"), inner)
        raw = _field(spec, "terms", path)
        if not isinstance(raw, list) or not raw:
            raise SpecError("terms must be a nonempty list", f"{path}.terms")
        return IndependentSum(tuple(from_spec(t, f"{path}.terms[{i}]") for i, t in enumerate(raw)))
    except ParameterError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc), path) from exc


def parse_spec(text: str) -> Distribution:
    """Parse a JSON string into a distribution."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})")
    return from_spec(obj)


def to_spec(dist: Distribution) -> Dict[str, Any]:
    """Canonical JSON-compatible description; inverse of :func:`from_spec`."""
    if isinstance(dist, Bernoulli):
        return {"family": "bernoulli", "mu": dist.mu}
    if isinstance(dist, Binomial):
        return {"family": "binomial", "n": dist.n, "mu": dist.mu}
    if isinstance(dist, (Uniform, Triangular)):
        return {"family": dist.family, "a": dist.a, "b": dist.b}
    if isinstance(dist, (Beta, Kumaraswamy)):
        return {"family": dist.family, "alpha": dist.alpha, "beta": dist.beta}
    if isinstance(dist, DiracMixture):
        return {"family": "dirac_mixture", "atoms": [[x, p] for x, p in dist.atoms]}
    if isinstance(dist, Mixture):
        return {"family": "mixture",
                "components": [{"weight": w, "dist": to_spec(d)} for w, d in dist.components]}
    if isinstance(dist, Affine):
        return {"family": "affine", "scale": dist.scale, "shift": dist.shift,
                "inner": to_spec(dist.inner)}
    if isinstance(dist, IndependentSum):
        return {"family": "independent_sum", "terms": [to_spec(t) for t in dist.terms]}
    raise ParameterError(f"not a distribution: {dist!r}")


def fingerprint(dist: Distribution) -> str:
    """Stable short hash of the canonical spec."""
    blob = json.dumps(to_spec(dist), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# support

def support(dist: Distribution) -> Tuple[float, float]:
    """Closed interval containing the support."""
    if isinstance(dist, Bernoulli):
        return 0.0, 1.0
    if isinstance(dist, Binomial):
        return 0.0, float(dist.n)
    if isinstance(dist, Uniform):
        return dist.a, dist.b
    if isinstance(dist, Triangular):
        return -dist.a, dist.b
    if isinstance(dist, (Beta, Kumaraswamy)):
        return 0.0, 1.0
    if isinstance(dist, DiracMixture):
        xs = dist.locations
        return min(xs), max(xs)
    if isinstance(dist, Mixture):
        bounds = [support(d) for _, d in dist.components]
        return min(b[0] for b in bounds), max(b[1] for b in bounds)
    if isinstance(dist, Affine):
        lo, hi = support(dist.inner)
        ends = sorted((dist.scale * lo + dist.shift, dist.scale * hi + dist.shift))
        return ends[0], ends[1]
    if isinstance(dist, IndependentSum):
        bounds = [support(t) for t in dist.terms]
        return math.fsum(b[0] for b in bounds), math.fsum(b[1] for b in bounds)
    raise ParameterError(f"not a distribution: {dist!r}")


def support_radius(dist: Distribution) -> float:
    """``B = sup |x - mean|`` over the support."""
    m = mean(dist)
    if isinstance(dist, DiracMixture):
        return max(abs(x - m) for x in dist.locations)
    lo, hi = support(dist)
    return max(m - lo, hi - m)


# ---------------------------------------------------------------------------
# exact moments

def _binom_center(raw, kmax):
    """Central moments from raw moments ``raw[0..kmax]``."""
    m = raw[1]
    out = [mp.mpf(1)]
    for k in range(1, kmax + 1):
        acc = mp.mpf(0)
        for i in range(k + 1):
            acc += mp.binomial(k, i) * raw[i] * (-m) ** (k - i)
        out.append(acc)
    out[1] = mp.mpf(0)
    return out


def _convolve(c1, c2, kmax):
    """Central moments of an independent sum from those of the parts."""
    out = []
    for k in range(kmax + 1):
        out.append(mp.fsum(mp.binomial(k, i) * c1[i] * c2[k - i] for i in range(k + 1)))
    return out


@lru_cache(maxsize=4096)
def _central_mp(dist: Distribution, kmax: int, dps: int):
    """``(mean, (c_0, ..., c_kmax))`` as mpf at ``dps`` digits."""
    with mp.workdps(dps):
        if isinstance(dist, Bernoulli):
            mu = mp.mpf(dist.mu)
            c = [(1 - mu) * (-mu) ** k + mu * (1 - mu) ** k for k in range(kmax + 1)]
            c[1] = mp.mpf(0)
            return mu, tuple(c)
        if isinstance(dist, Binomial):
            mu_b, base = _central_mp(Bernoulli(dist.mu), kmax, dps)
            acc = None
            power = list(base)
            n = dist.n
            while n:
                if n & 1:
                    acc = power if acc is None else _convolve(acc, power, kmax)
                n >>= 1
                if n:
                    power = _convolve(power, power, kmax)
            return dist.n * mu_b, tuple(acc)
        if isinstance(dist, Uniform):
            a, b = mp.mpf(dist.a), mp.mpf(dist.b)
            half = (b - a) / 2
            c = [half ** k / (k + 1) if k % 2 == 0 else mp.mpf(0) for k in range(kmax + 1)]
            return (a + b) / 2, tuple(c)
        if isinstance(dist, Triangular):
            a, b = mp.mpf(dist.a), mp.mpf(dist.b)
            raw = [2 * ((-1) ** n * a ** (n + 1) + b ** (n + 1)) / ((a + b) * (n + 1) * (n + 2))
                   for n in range(kmax + 1)]
            return raw[1], tuple(_binom_center(raw, kmax))
        if isinstance(dist, Beta):
            al, be = mp.mpf(dist.alpha), mp.mpf(dist.beta)
            raw = [mp.mpf(1)]
            for i in range(kmax):
                raw.append(raw[-1] * (al + i) / (al + be + i))
            return raw[1], tuple(_binom_center(raw, kmax))
        if isinstance(dist, Kumaraswamy):
            al, be = mp.mpf(dist.alpha), mp.mpf(dist.beta)
            raw = [mp.mpf(1)] + [be * mp.beta(1 + n / al, be) for n in range(1, kmax + 1)]
            return raw[1], tuple(_binom_center(raw, kmax))
        if isinstance(dist, DiracMixture):
            xs = [mp.mpf(x) for x in dist.locations]
            ps = [mp.mpf(p) for p in dist.weights]
            tot = mp.fsum(ps)
            ps = [p / tot for p in ps]
            m = mp.fsum(p * x for p, x in zip(ps, xs))
            c = [mp.fsum(p * (x - m) ** k for p, x in zip(ps, xs)) for k in range(kmax + 1)]
            c[1] = mp.mpf(0)
            return m, tuple(c)
        if isinstance(dist, Mixture):
            parts = [_central_mp(d, kmax, dps) for _, d in dist.components]
            ws = [mp.mpf(w) for w, _ in dist.components]
            tot = mp.fsum(ws)
            ws = [w / tot for w in ws]
            m = mp.fsum(w * mj for w, (mj, _) in zip(ws, parts))
            c = []
            for k in range(kmax + 1):
                acc = []
                for w, (mj, cj) in zip(ws, parts):
                    sh = mj - m
                    acc.append(w * mp.fsum(mp.binomial(k, i) * cj[i] * sh ** (k - i)
                                           for i in range(k + 1)))
                c.append(mp.fsum(acc))
            c[1] = mp.mpf(0)
            return m, tuple(c)
        if isinstance(dist, Affine):
            mi, ci = _central_mp(dist.inner, kmax, dps)
            s = mp.mpf(dist.scale)
            return s * mi + dist.shift, tuple(s ** k * ci[k] for k in range(kmax + 1))
        if isinstance(dist, IndependentSum):
            m, acc = None, None
            for t in dist.terms:
                mt, ct = _central_mp(t, kmax, dps)
                m = mt if m is None else m + mt
                acc = list(ct) if acc is None else _convolve(acc, ct, kmax)
            return m, tuple(acc)
    raise ParameterError(f"not a distribution: {dist!r}")


def _working_dps(dist: Distribution, kmax: int) -> int:
    """Digits needed so that re-centering raw moments of order kmax keeps ~25 digits."""
    if kmax <= 4:
        return 40
    _, c = _central_mp(dist, 2, 40)
    sd = math.sqrt(float(c[2])) if c[2] > 0 else 1.0
    lo, hi = support(dist)
    scale = max(abs(lo), abs(hi), 1.0)
    per_order = max(1.0, math.log10(2.0 * scale / sd) + 1.0)
    return int(40 + kmax * per_order)


def _moments(dist: Distribution, kmax: int):
    if kmax > MAX_MOMENT_ORDER:
        raise MomentRangeError(f"moment order {kmax} exceeds the supported maximum {MAX_MOMENT_ORDER}")
    return _central_mp(dist, kmax, _working_dps(dist, kmax))


def _to_float(x, what: str) -> float:
    try:
        out = float(x)
    except OverflowError:
        out = math.inf
    if not math.isfinite(out):
        raise MomentRangeError(f"{what} overflows double precision")
    return out


def mean(dist: Distribution) -> float:
    """Exact mean, correctly rounded."""
    return _to_float(_central_mp(dist, 2, 40)[0], "mean")


def variance(dist: Distribution) -> float:
    return _to_float(_central_mp(dist, 2, 40)[1][2], "variance")


def central_moment(dist: Distribution, k: int) -> float:
    """``E[(X - mean)**k]``.

    Raises
    ------
    MomentRangeError
        If ``k`` is beyond the supported order or the value overflows.
    """
    if int(k) != k or k < 1:
        raise ParameterError(f"moment order must be an integer >= 1, got {k!r}")
    k = int(k)
    return _to_float(_moments(dist, max(k, 2))[1][k], f"central moment of order {k}")


def central_moments_mp(dist: Distribution, kmax: int):
    """Multiprecision ``(mean, (c_0, ..., c_kmax))`` for callers needing log-space work."""
    return _moments(dist, kmax)


@dataclass(frozen=True)
class MomentTable:
    """Mean, variance, central moments ``2..k_max`` and the third/fourth cumulants."""

    mean: float
    variance: float
    central_moments: Dict[int, float] = field(hash=False)
    kappa3: float
    kappa4: float

    @property
    def kurtosis(self) -> float:
        """Fourth standardized moment; 3 for a Gaussian."""
        return self.central_moments[4] / self.variance ** 2


def moment_table(dist: Distribution, k_max: int = 10) -> MomentTable:
    if k_max < 4:
        raise ParameterError(f"k_max must be at least 4, got {k_max!r}")
    m, c = _moments(dist, k_max)
    with mp.workdps(40):
        k4 = c[4] - 3 * c[2] ** 2
    cm = {k: _to_float(c[k], f"central moment of order {k}") for k in range(2, k_max + 1)}
    return MomentTable(mean=_to_float(m, "mean"), variance=cm[2], central_moments=cm,
                       kappa3=cm[3], kappa4=_to_float(k4, "kappa4"))


# ---------------------------------------------------------------------------
# symmetry

def _q(x: float) -> float:
    return round(x, 11) + 0.0


def _law_bag(dist: Distribution, c: float, d: float, w: float, bag: dict) -> None:
    """Accumulate weight per canonical law key for ``c * dist + d``.

    Keys identify laws up to the reflection identities of each family, so a
    bag and the bag of its reflection compare equal exactly when the mixture
    is symmetric.
    """
    if isinstance(dist, (Bernoulli, DiracMixture)):
        atoms = ((0.0, 1.0 - dist.mu), (1.0, dist.mu)) if isinstance(dist, Bernoulli) else dist.atoms
        for x, p in atoms:
            key = ("atom", _q(c * x + d))
            bag[key] = bag.get(key, 0.0) + w * p
        return
    if isinstance(dist, Mixture):
        for wj, dj in dist.components:
            _law_bag(dj, c, d, w * wj, bag)
        return
    if isinstance(dist, Affine):
        _law_bag(dist.inner, c * dist.scale, c * dist.shift + d, w, bag)
        return
    ac = abs(c)
    if isinstance(dist, Uniform) or (isinstance(dist, (Beta, Kumaraswamy))
                                     and dist.alpha == 1.0 and dist.beta == 1.0):
        lo, hi = support(dist)
        ends = sorted((c * lo + d, c * hi + d))
        key = ("uniform", _q(ends[0]), _q(ends[1]))
    elif isinstance(dist, Triangular):
        left, right = (dist.b, dist.a) if c < 0 else (dist.a, dist.b)
        key = ("triangular", _q(ac * left), _q(ac * right), _q(d))
    elif isinstance(dist, Beta):
        al, be, sh = (dist.beta, dist.alpha, c + d) if c < 0 else (dist.alpha, dist.beta, d)
        key = ("beta", al, be, _q(ac), _q(sh))
    elif isinstance(dist, Binomial):
        mu, sh = (1.0 - dist.mu, c * dist.n + d) if c < 0 else (dist.mu, d)
        key = ("binomial", dist.n, _q(mu), _q(ac), _q(sh))
    elif isinstance(dist, Kumaraswamy):
        # c < 0 gives |c| * (1 - K) + (c + d), which has no Kumaraswamy form
        tag = "kumaraswamy_reflected" if c < 0 else "kumaraswamy"
        key = (tag, dist.alpha, dist.beta, _q(ac), _q(c + d if c < 0 else d))
    elif is_symmetric(dist):
        key = ("symmetric", fingerprint(dist), _q(ac), _q(c * mean(dist) + d))
    else:
        key = ("opaque", fingerprint(dist), _q(c), _q(d))
    bag[key] = bag.get(key, 0.0) + w


def _bags_match(b1: dict, b2: dict, tol: float = 1e-12) -> bool:
    if set(b1) != set(b2):
        return False
    return all(abs(b1[k] - b2[k]) <= tol for k in b1)


def is_symmetric(dist: Distribution) -> bool:
    """Whether ``X`` and ``2 * mean - X`` have the same law (structural test)."""
    if isinstance(dist, (Bernoulli, Binomial)):
        return dist.mu == 0.5
    if isinstance(dist, Uniform):
        return True
    if isinstance(dist, Triangular):
        return dist.a == dist.b
    if isinstance(dist, Beta):
        return dist.alpha == dist.beta
    if isinstance(dist, Kumaraswamy):
        return dist.alpha == 1.0 and dist.beta == 1.0
    if isinstance(dist, Affine):
        return is_symmetric(dist.inner)
    if isinstance(dist, IndependentSum):
        return all(is_symmetric(t) for t in dist.terms)
    if isinstance(dist, (DiracMixture, Mixture)):
        m = mean(dist)
        direct, mirrored = {}, {}
        _law_bag(dist, 1.0, 0.0, 1.0, direct)
        _law_bag(dist, -1.0, 2.0 * m, 1.0, mirrored)
        return _bags_match(direct, mirrored)
    raise ParameterError(f"not a distribution: {dist!r}")
