import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from subgauss.distributions import (Affine, Bernoulli, Beta, Binomial, DiracMixture,
                                    IndependentSum, Kumaraswamy, Mixture, Triangular, Uniform,
                                    central_moment, fingerprint, from_spec, is_symmetric, mean,
                                    moment_table, parse_spec, rademacher, support, support_radius,
                                    symmetric_three_point, to_spec, variance)
from subgauss.errors import MomentRangeError, ParameterError, SpecError

from mp_oracle import mp_central, mp_raw, rel

ASYM = DiracMixture(((-2.0, 1 / 13), (-0.5, 4 / 7), (1.25, 32 / 91)))


def _exact_cumulants(atoms):
    """Mean, variance, kappa3, kappa4 of a finite law in exact rationals."""
    m = sum(p * x for x, p in atoms)
    c = [sum(p * (x - m) ** k for x, p in atoms) for k in range(5)]
    return m, c[2], c[3], c[4] - 3 * c[2] ** 2


class TestValidation:
    @pytest.mark.parametrize("make", [
        lambda: Bernoulli(0.0), lambda: Bernoulli(1.0), lambda: Bernoulli(1.5),
        lambda: Binomial(0, 0.3), lambda: Binomial(2.5, 0.3),
        lambda: Uniform(1.0, 1.0), lambda: Triangular(0.0, 1.0), lambda: Beta(-1.0, 2.0),
        lambda: Kumaraswamy(1.0, 0.0), lambda: DiracMixture(((0.0, 0.5), (1.0, 0.4))),
        lambda: Mixture(((0.5, Beta(2, 2)), (0.6, Uniform(0, 1)))),
        lambda: Affine(0.0, 1.0, Uniform(0, 1)), lambda: Bernoulli(float("nan")),
        lambda: IndependentSum(()),
    ])
    def test_rejects_invalid_parameters(self, make):
        with pytest.raises(ParameterError):
            make()

    def test_weights_within_tolerance_accepted(self):
        DiracMixture(((0.0, 0.5), (1.0, 0.5 + 5e-13)))

    def test_symmetric_three_point_endpoint_is_rademacher(self):
        assert symmetric_three_point(1.0) == rademacher()


class TestSpecParsing:
    def test_round_trip_every_family(self, family_zoo):
        for dist in family_zoo.values():
            again = from_spec(json.loads(json.dumps(to_spec(dist))))
            assert again == dist
            assert fingerprint(again) == fingerprint(dist)

    def test_ratio_strings_are_exact(self):
        d = parse_spec('{"family":"dirac","atoms":[[-2,"1/13"],[-0.5,"4/7"],[1.25,"32/91"]]}')
        assert d == ASYM

    def test_atom_object_form(self):
        d = from_spec({"family": "dirac_mixture", "atoms": [{"x": -1, "p": 0.5}, {"x": 1, "p": 0.5}]})
        assert d == rademacher()

    def test_zero_skew_alpha(self):
        d = from_spec({"family": "kumaraswamy", "alpha": "zero_skew", "beta": 2})
        assert d.alpha == pytest.approx(1 / (2 - math.sqrt(2)), rel=1e-15)

    @pytest.mark.parametrize("spec, path", [
        ({"family": "bernoulli"}, "$"),
        ({"family": "bernoulli", "mu": "abc"}, "$.mu"),
        ({"family": "nope"}, "$.family"),
        ({"family": "mixture", "components": [{"weight": 1.0, "dist": {"family": "beta", "alpha": 2}}]},
         "$.components[0].dist"),
        ({"family": "dirac", "atoms": [[0, 0.5], [1]]}, "$.atoms[1]"),
        ({"family": "binomial", "n": 2.5, "mu": 0.2}, "$.n"),
        ({"family": "uniform", "a": 0, "b": 1, "c": 2}, "$"),
    ])
    def test_errors_name_the_field(self, spec, path):
        with pytest.raises(SpecError) as info:
            from_spec(spec)
        assert info.value.path == path
        assert str(info.value).startswith(path)

    def test_invalid_json(self):
        with pytest.raises(SpecError):
            parse_spec("{not json")

    def test_fingerprint_distinguishes(self):
        assert fingerprint(Beta(2, 3)) != fingerprint(Beta(3, 2))


class TestMean:
    def test_bernoulli(self):
        assert mean(Bernoulli(0.3)) == 0.3

    def test_triangular_against_quadrature(self):
        assert rel(mean(Triangular(1.0, 2.0)), float(mp_raw(Triangular(1.0, 2.0), 1))) < 1e-15
        assert mean(Triangular(1.0, 2.0)) == pytest.approx(1 / 3, rel=1e-15)

    def test_asymmetric_mixture_mean_zero(self):
        assert sum(Fraction(x).limit_denominator(100) * Fraction(p).limit_denominator(100)
                   for x, p in ASYM.atoms) == 0
        assert abs(mean(ASYM)) < 1e-15


class TestCentralMoments:
    @pytest.mark.parametrize("a", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("j", [1, 2, 3, 5])
    def test_symmetric_triangular_even_moments(self, a, j):
        expected = 2 * a ** (2 * j) / ((2 * j + 1) * (2 * j + 2))
        assert rel(central_moment(Triangular(a, a), 2 * j), expected) < 1e-13

    def test_bernoulli_half_third_moment(self):
        assert central_moment(Bernoulli(0.5), 3) == 0.0

    def test_uniform_fourth_moment(self):
        assert rel(central_moment(Uniform(0.0, 1.0), 4), 1 / 80) < 1e-15

    def test_against_mpmath_all_families(self, family_zoo):
        for name, dist in family_zoo.items():
            for k in (2, 3, 4, 7, 10):
                ref = float(mp_central(dist, k))
                scale = float(mp_central(dist, 2)) ** (k / 2)
                assert abs(central_moment(dist, k) - ref) <= 1e-12 * scale, (name, k)

    def test_order_limit(self):
        with pytest.raises(MomentRangeError):
            central_moment(Uniform(0, 1), 5000)

    def test_rejects_bad_order(self):
        with pytest.raises(ParameterError):
            central_moment(Uniform(0, 1), 0)


class TestMomentTable:
    @pytest.mark.parametrize("eta", [0.1, 0.25, 0.3, 0.4])
    def test_three_point_kappa4(self, eta):
        assert abs(moment_table(symmetric_three_point(eta)).kappa4 - eta * (1 - 3 * eta)) < 1e-15

    def test_asymmetric_mixture_cumulants(self):
        exact = _exact_cumulants([(Fraction(-2), Fraction(1, 13)), (Fraction(-1, 2), Fraction(4, 7)),
                                  (Fraction(5, 4), Fraction(32, 91))])
        assert exact == (0, 1, 0, Fraction(-7, 8))
        t = moment_table(ASYM)
        assert abs(t.mean) < 1e-12 and abs(t.variance - 1) < 1e-12
        assert abs(t.kappa3) < 1e-12 and abs(t.kappa4 + 0.875) < 1e-12

    def test_triangular_kappa3(self):
        assert rel(moment_table(Triangular(1.0, 2.0)).kappa3, 2 / 27) < 1e-14

    def test_kurtosis_definition(self):
        t = moment_table(Beta(2.0, 5.0))
        assert rel(t.kurtosis, t.central_moments[4] / t.variance ** 2) < 1e-15
        assert rel(t.kappa4, t.central_moments[4] - 3 * t.variance ** 2) < 1e-13


class TestSupport:
    @pytest.mark.parametrize("dist, radius", [
        (Bernoulli(0.3), 0.7), (Uniform(0.0, 1.0), 0.5), (Triangular(1.0, 2.0), 5 / 3),
    ])
    def test_radius(self, dist, radius):
        assert support_radius(dist) == pytest.approx(radius, rel=1e-15)

    def test_composite_support(self):
        assert support(Affine(-2.0, 1.0, Uniform(0.0, 1.0))) == (-1.0, 1.0)
        assert support(IndependentSum((Uniform(0, 1), Uniform(0, 2)))) == (0.0, 3.0)

    @given(st.floats(0.05, 20), st.floats(0.05, 20))
    def test_moments_bounded_by_radius(self, a, b):
        d = Beta(a, b)
        B = support_radius(d)
        for k in (2, 4, 6):
            assert central_moment(d, k) <= B ** k * (1 + 1e-12)


class TestSymmetry:
    @pytest.mark.parametrize("dist, expected", [
        (Beta(2.0, 2.0), True), (Kumaraswamy(1.7071, 2.0), False),
        (DiracMixture(((-1.0, 0.2), (0.0, 0.6), (1.0, 0.2))), True),
        (Kumaraswamy(1.0, 1.0), True), (Bernoulli(0.5), True), (Bernoulli(0.3), False),
        (Triangular(1.0, 1.0), True), (Triangular(1.0, 2.0), False), (ASYM, False),
        (Binomial(5, 0.5), True),
        (Mixture(((0.1, Beta(1.5, 1.5)), (0.9, Beta(9.0, 9.0)))), True),
        (Mixture(((0.5, Beta(2.0, 5.0)), (0.5, Beta(5.0, 2.0)))), True),
        (Mixture(((0.5, Beta(2.0, 5.0)), (0.5, Kumaraswamy(2.0, 5.0)))), False),
        (IndependentSum((Beta(2.0, 2.0), Uniform(0.0, 3.0))), True),
        (Affine(-1.0, 3.0, Triangular(2.0, 2.0)), True),
    ])
    def test_examples(self, dist, expected):
        assert is_symmetric(dist) is expected

    @given(st.floats(0.2, 10), st.floats(0.2, 10))
    def test_beta_symmetric_iff_equal(self, a, b):
        assert is_symmetric(Beta(a, b)) == (a == b)

    @given(st.floats(0.2, 10))
    def test_symmetric_law_has_zero_odd_moments(self, a):
        d = Beta(a, a)
        for k in (3, 5, 7):
            assert abs(central_moment(d, k)) <= 1e-14 * support_radius(d) ** k


class TestVarianceInvariants:
    @given(st.floats(-5, 5), st.floats(0.1, 5).flatmap(lambda s: st.sampled_from([s, -s])),
           st.floats(0.3, 8), st.floats(0.3, 8))
    def test_affine_scaling(self, shift, scale, a, b):
        inner = Beta(a, b)
        d = Affine(scale, shift, inner)
        assert rel(variance(d), scale ** 2 * variance(inner)) < 1e-13
        assert abs(moment_table(d).kappa3 - scale ** 3 * moment_table(inner).kappa3) \
            <= 1e-13 * abs(scale) ** 3 * support_radius(inner) ** 3

    @given(st.floats(0.05, 0.95), st.floats(0.3, 5), st.floats(0.3, 5))
    def test_sum_cumulants_add(self, mu, a, b):
        x, y = Bernoulli(mu), Beta(a, b)
        s = moment_table(IndependentSum((x, y)))
        tx, ty = moment_table(x), moment_table(y)
        assert rel(s.variance, tx.variance + ty.variance) < 1e-13
        assert abs(s.kappa4 - tx.kappa4 - ty.kappa4) < 1e-13
