import math

import pytest
from hypothesis import given, strategies as st

from subgauss.closed_forms import (ASYM_STRICT_ATOMS, bernoulli_proxy, beta_mixture,
                                   binomial_proxy, catalog_by_name, counterexample_catalog,
                                   kumaraswamy_kappa3, kumaraswamy_third_moment_root,
                                   kumaraswamy_zero_skew_alpha, triangular_kappa3,
                                   uniform_sum_proxy)
from subgauss.distributions import Beta, Kumaraswamy, Triangular, moment_table, variance
from subgauss.errors import ParameterError
from subgauss.strictness import Verdict, classify

from mp_oracle import mp_central


class TestBernoulli:
    def test_examples(self):
        s, l = bernoulli_proxy(0.1)
        assert s == pytest.approx(0.4 / math.log(9), rel=1e-15)
        assert l == pytest.approx(2 * math.log(9), rel=1e-15)
        assert bernoulli_proxy(0.5) == (0.25, 0.0)
        s9, l9 = bernoulli_proxy(0.9)
        assert s9 == pytest.approx(s, rel=1e-14) and l9 == pytest.approx(-l, rel=1e-14)

    @given(st.floats(1e-6, 1 - 1e-6))
    def test_continuous_near_half(self, mu):
        s, _ = bernoulli_proxy(mu)
        assert mu * (1 - mu) * (1 - 1e-15) <= s <= 0.25

    def test_rejects(self):
        with pytest.raises(ParameterError):
            bernoulli_proxy(1.0)


class TestOtherClosedForms:
    def test_binomial(self):
        assert binomial_proxy(1, 0.3) == bernoulli_proxy(0.3)[0]
        assert binomial_proxy(10, 0.1) == pytest.approx(1.8204785, abs=1e-7)
        assert binomial_proxy(4, 0.5) == 1.0

    def test_uniform_sum(self):
        assert uniform_sum_proxy([(0, 1)]) == pytest.approx(1 / 12)
        assert uniform_sum_proxy([(0, 1), (0, 2)]) == pytest.approx(5 / 12)
        assert uniform_sum_proxy([(3, 4)]) == pytest.approx(1 / 12)

    def test_triangular_kappa3(self):
        assert triangular_kappa3(1, 1) == 0.0
        assert triangular_kappa3(1, 2) == pytest.approx(2 / 27, rel=1e-15)
        assert triangular_kappa3(2, 1) == pytest.approx(-2 / 27, rel=1e-15)

    @given(st.floats(0.1, 5), st.floats(0.1, 5))
    def test_triangular_kappa3_matches_moments(self, a, b):
        assert triangular_kappa3(a, b) == pytest.approx(moment_table(Triangular(a, b)).kappa3,
                                                        rel=1e-12, abs=1e-15)


class TestKumaraswamyLocus:
    def test_alpha_values(self):
        assert kumaraswamy_zero_skew_alpha(1.0) == 1.0
        assert kumaraswamy_zero_skew_alpha(2.0) == pytest.approx(1 / (2 - math.sqrt(2)), rel=1e-15)
        assert kumaraswamy_zero_skew_alpha(0.5) == pytest.approx(0.4, rel=1e-15)

    @pytest.mark.parametrize("beta", [0.5, 2.0, 3.0])
    def test_locus_is_mode_equals_median(self, beta):
        a = kumaraswamy_zero_skew_alpha(beta)
        if a > 1 and beta > 1:
            mode = ((a - 1) / (a * beta - 1)) ** (1 / a)
        else:
            # for a < 1 the density has no interior mode; check the median identity only
            mode = None
        median = (1 - 2 ** (-1 / beta)) ** (1 / a)
        if mode is not None:
            assert mode == pytest.approx(median, rel=1e-12)
        assert kumaraswamy_kappa3(a, beta) != 0.0

    @pytest.mark.parametrize("beta, alpha", [(0.5, 0.412986), (2.0, 1.738119), (3.0, 2.158448)])
    def test_exact_third_moment_root(self, beta, alpha):
        a = kumaraswamy_third_moment_root(beta)
        assert a == pytest.approx(alpha, abs=1e-6)
        assert abs(float(mp_central(Kumaraswamy(a, beta), 3))) < 1e-15

    def test_kappa3_oracle(self):
        assert kumaraswamy_kappa3(2.0, 3.0) == pytest.approx(
            float(mp_central(Kumaraswamy(2.0, 3.0), 3)), rel=1e-12)

    def test_rejects_undefined(self):
        with pytest.raises(ParameterError):
            kumaraswamy_zero_skew_alpha(0.0)


class TestCatalog:
    def test_contents(self):
        cat = catalog_by_name()
        assert len(cat) >= 6
        assert cat["asym-strict"].dist.weights == [w for _, w in ASYM_STRICT_ATOMS]
        assert [p for _, p in ASYM_STRICT_ATOMS] == [1 / 13, 4 / 7, 32 / 91]
        assert cat["beta-mixture"].dist == beta_mixture(0.1, 1.5, 9.0)
        assert cat["rademacher"].expected_sigma == 1.0 == variance(cat["rademacher"].dist)

    def test_names_unique_and_serialisable(self):
        cases = counterexample_catalog()
        assert len({c.name for c in cases}) == len(cases)
        for c in cases:
            d = c.to_dict()
            assert d["expected_verdict"] in ("Strict", "NotStrict")

    def test_every_case_classifies_as_expected(self):
        for c in counterexample_catalog():
            v = classify(c.dist)
            assert v.verdict is c.expected_verdict, c.name
            if c.expected_sigma is not None:
                assert v.solve.sigma_opt_sq == pytest.approx(c.expected_sigma, rel=1e-12), c.name

    def test_beta_mixture_kurtosis(self):
        k4 = moment_table(beta_mixture()).kappa4
        assert k4 > 0
        assert classify(beta_mixture()).verdict is Verdict.NOT_STRICT
        assert Beta(1.5, 1.5) in [d for _, d in beta_mixture().components]
