"""End-to-end acceptance checks at their stated tolerances.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""
import csv
import math
import time

import numpy as np
import pytest

from subgauss.cgf import cgf_centered
from subgauss.cli import main
from subgauss.closed_forms import (ASYM_STRICT_ATOMS, bernoulli_proxy, beta_mixture,
                                   counterexample_catalog, kumaraswamy_zero_skew_alpha)
from subgauss.distributions import (Bernoulli, Beta, Binomial, DiracMixture, IndependentSum,
                                    Kumaraswamy, Triangular, Uniform, central_moment, moment_table,
                                    support_radius, symmetric_three_point)
from subgauss.oracle import mc_mgf, quad_abs_moment, quad_moment, verify_inequality
from subgauss.solver import bracket_bound, solve_delta, solve_hmax, stationarity_residual
from subgauss.strictness import Verdict, classify

from conftest import record_acceptance

BERNOULLI_MUS = [round(0.05 * i, 2) for i in range(1, 20) if i != 10]

# CLI sweeps over one family parameter: (name, template, sweep, symmetric values)
PARAMETER_SWEEPS = [
    ("bernoulli", '{"family":"bernoulli","mu":"$mu"}', "mu=0.05:0.95:19", {0.5}),
    ("triangular-a-a", '{"family":"triangular","a":"$a","b":"$a"}', "a=0.2:2:10", "all"),
    ("triangular-1-a", '{"family":"triangular","a":1,"b":"$a"}', "a=0.1:2:20", {1.0}),
    ("kumaraswamy-locus", '{"family":"kumaraswamy","alpha":"zero_skew","beta":"$beta"}',
     "beta=0.25:5:20", {1.0}),
    ("beta-a-a", '{"family":"beta","alpha":"$a","beta":"$a"}', "a=0.2:1.8:9", "all"),
    ("beta-a-2-a", '{"family":"beta","alpha":"$a","beta":"2-$a"}', "a=0.2:1.8:9", {1.0}),
]


def _sweep_distributions():
    out = [Bernoulli(m) for m in BERNOULLI_MUS] + [Bernoulli(0.5)]
    out += [Triangular(a, a) for a in np.round(np.linspace(0.2, 2, 10), 12)]
    out += [Triangular(1.0, b) for b in np.round(np.linspace(0.1, 2, 20), 12)]
    out += [Kumaraswamy(kumaraswamy_zero_skew_alpha(b), b) for b in np.round(np.linspace(0.25, 5, 20), 12)]
    out += [Beta(a, a) for a in np.round(np.linspace(0.2, 1.8, 9), 12)]
    out += [Beta(a, 2 - a) for a in np.round(np.linspace(0.2, 1.8, 9), 12)]
    out += [Beta(a, a) for a in (0.5, 1.0, 2.0, 5.0)] + [Triangular(a, a) for a in (0.5, 1.0, 2.0, 5.0)]
    out += [Beta(2.0, 5.0), Triangular(1.0, 2.0), Bernoulli(0.3), Kumaraswamy(2.0, 3.0)]
    return out


@pytest.fixture(scope="module")
def all_distributions():
    return [c.dist for c in counterexample_catalog()] + _sweep_distributions()


class TestAcceptance:
    def test_01_bernoulli_closed_form(self):
        t0 = time.perf_counter()
        worst_s, worst_l = 0.0, 0.0
        for mu in BERNOULLI_MUS:
            r = solve_hmax(Bernoulli(mu))
            sig = (0.5 - mu) / math.log(1 / mu - 1)
            lam = 2 * math.log((1 - mu) / mu)
            worst_s = max(worst_s, abs(r.sigma_opt_sq - sig) / sig)
            worst_l = max(worst_l, abs(r.lambda_star - lam))
        elapsed = time.perf_counter() - t0
        ok = worst_s <= 1e-8 and worst_l <= 1e-6 and elapsed < 5
        record_acceptance(1, "Bernoulli closed form", ok,
                          f"max rel sigma err {worst_s:.2e}, max lambda err {worst_l:.2e}, {elapsed:.2f} s")
        assert ok

    def test_02_binomial_additivity(self):
        b = solve_hmax(Binomial(10, 0.3)).sigma_opt_sq
        one = solve_hmax(Bernoulli(0.3)).sigma_opt_sq
        err = abs(b - 10 * one) / (10 * one)
        record_acceptance(2, "binomial additivity", err <= 1e-8, f"rel err {err:.2e}")
        assert err <= 1e-8

    def test_03_uniform_strictness(self):
        u = classify(Uniform(0.0, 1.0))
        s = classify(IndependentSum((Uniform(0.0, 1.0), Uniform(0.0, 2.0))))
        e1 = abs(u.solve.sigma_opt_sq - 1 / 12)
        e2 = abs(s.solve.sigma_opt_sq - 5 / 12) / (5 / 12)
        ok = (u.verdict is Verdict.STRICT and e1 <= 1e-9
              and s.verdict is Verdict.STRICT and e2 <= 1e-8)
        record_acceptance(3, "uniform strictness and sums", ok,
                          f"U(0,1) abs err {e1:.1e} {u.verdict}; U(0,1)+U(0,2) rel err {e2:.1e} {s.verdict}")
        assert ok

    def test_04_symmetry_sweep(self):
        cases = [(Beta(a, a), Verdict.STRICT) for a in (0.5, 1.0, 2.0, 5.0)]
        cases += [(Triangular(a, a), Verdict.STRICT) for a in (0.5, 1.0, 2.0, 5.0)]
        cases += [(d, Verdict.NOT_STRICT) for d in (Beta(2.0, 5.0), Triangular(1.0, 2.0),
                                                     Bernoulli(0.3), Kumaraswamy(2.0, 3.0))]
        hits = sum(classify(d).verdict is v for d, v in cases)
        record_acceptance(4, "strict iff symmetric sweep", hits == len(cases),
                          f"{hits}/{len(cases)} verdicts agree")
        assert hits == len(cases)

    def test_05_symmetric_not_strict(self):
        rows, ok = [], True
        for eta in (0.1, 0.25, 0.3):
            v = classify(symmetric_three_point(eta))
            err = abs(moment_table(symmetric_three_point(eta)).kappa4 - eta * (1 - 3 * eta))
            ok &= v.verdict is Verdict.NOT_STRICT and err <= 1e-14
            rows.append(f"eta={eta} {v.verdict} (k4 err {err:.0e})")
        for eta in (0.4, 1.0):
            v = classify(symmetric_three_point(eta))
            ok &= v.verdict is Verdict.STRICT
            rows.append(f"eta={eta} {v.verdict}")
        record_acceptance(5, "symmetric three-point law", ok, "; ".join(rows))
        assert ok

    def test_06_asymmetric_strict(self):
        d = DiracMixture(ASYM_STRICT_ATOMS)
        t = moment_table(d)
        v = classify(d)
        errs = [abs(t.mean), abs(t.variance - 1), abs(t.kappa3), abs(t.kappa4 + 7 / 8)]
        gap = v.solve.sigma_opt_sq - 1
        ok = max(errs) <= 1e-12 and v.verdict is Verdict.STRICT and gap <= 1e-9
        record_acceptance(6, "asymmetric strict three-point law", ok,
                          f"max moment err {max(errs):.1e}, {v.verdict}, sigma-1 = {gap:.1e}")
        assert ok

    def test_07_beta_mixture(self):
        m = beta_mixture()
        k4 = moment_table(m).kappa4
        # independent quadrature estimate of the fourth cumulant
        k4_quad = quad_moment(m, 4) - 3 * quad_moment(m, 2) ** 2
        v = classify(m)
        ok = k4 > 0 and v.verdict is Verdict.NOT_STRICT and abs(k4 - k4_quad) <= 1e-10
        record_acceptance(7, "beta mixture", ok,
                          f"kappa4 = {k4:.4e} (quadrature {k4_quad:.4e}), {v.verdict}")
        assert ok

    def test_08_kumaraswamy_locus(self):
        rows, ok = [], True
        for beta in (0.5, 2.0, 3.0):
            d = Kumaraswamy(kumaraswamy_zero_skew_alpha(beta), beta)
            t = moment_table(d)
            B = support_radius(d)
            v = classify(d)
            k3_ok = abs(t.kappa3) <= 1e-9 * B ** 3
            ok &= k3_ok and t.kappa4 < 0 and v.verdict is Verdict.NOT_STRICT
            rows.append(f"beta={beta}: |k3|={abs(t.kappa3):.2e} "
                        f"({'<=' if k3_ok else '>'} {1e-9 * B ** 3:.1e}), k4={t.kappa4:.2e}, {v.verdict}")
        u = classify(Kumaraswamy(kumaraswamy_zero_skew_alpha(1.0), 1.0))
        ok &= u.verdict is Verdict.STRICT
        rows.append(f"beta=1: {u.verdict}")
        record_acceptance(8, "Kumaraswamy zero-skew locus", ok, "; ".join(rows))
        assert ok

    def test_09_method_agreement(self, all_distributions):
        worst = 0.0
        for d in all_distributions:
            a, b = solve_hmax(d).sigma_opt_sq, solve_delta(d).sigma_opt_sq
            worst = max(worst, abs(a - b) / a)
        record_acceptance(9, "h-maximum vs Delta bisection", worst <= 1e-6,
                          f"max rel diff {worst:.2e} over {len(all_distributions)} laws")
        assert worst <= 1e-6

    def test_10_stationarity(self, all_distributions):
        worst, n = 0.0, 0
        for d in all_distributions:
            r = solve_hmax(d)
            if r.lambda_star != 0.0:
                n += 1
                K = cgf_centered(d, r.lambda_star)
                worst = max(worst, abs(stationarity_residual(d, r.lambda_star)) / (1 + abs(K)))
        record_acceptance(10, "stationarity at interior maximizers", worst <= 1e-8,
                          f"max scaled residual {worst:.2e} over {n} maximizers")
        assert worst <= 1e-8

    def test_11_minimality(self):
        bad = []
        for case in counterexample_catalog():
            d = case.dist
            r = solve_hmax(d)
            lo, hi = bracket_bound(d)
            grid = np.sort(np.append(np.linspace(lo, hi, 4001), [r.lambda_star, -r.lambda_star]))
            var = moment_table(d).variance
            above = verify_inequality(d, r.sigma_opt_sq * (1 + 1e-6), grid)[0]
            below = verify_inequality(d, r.sigma_opt_sq - 1e-4 * var, grid)[0]
            if not above or below:
                bad.append(case.name)
        n = len(counterexample_catalog())
        record_acceptance(11, "minimality of the optimal proxy", not bad,
                          f"{n - len(bad)}/{n} catalog laws" + (f"; failing {bad}" if bad else ""))
        assert not bad

    def test_12_oracle_consistency(self, family_zoo):
        worst_z, worst_q = 0.0, 0.0
        for d in family_zoo.values():
            for lam in (-2.0, -0.5, 0.5, 2.0):
                r = mc_mgf(d, lam, n=1_000_000, seed=0)
                worst_z = max(worst_z, abs(r.value - math.exp(cgf_centered(d, lam))) / r.std_error)
        continuous = [d for k, d in family_zoo.items()
                      if k not in ("bernoulli", "binomial", "dirac", "sum")]
        for d in continuous:
            for k in range(2, 11):
                err = abs(quad_moment(d, k) - central_moment(d, k)) / quad_abs_moment(d, k)
                worst_q = max(worst_q, err)
        ok = worst_z <= 4 and worst_q <= 1e-8
        record_acceptance(12, "Monte-Carlo and quadrature oracles", ok,
                          f"max |z| {worst_z:.2f} (n=1e6, seed 0); max quadrature moment err {worst_q:.1e}")
        assert ok

    def test_13_parameter_sweeps(self, tmp_path):
        rows, ok = [], True
        for name, template, sweep, symmetric in PARAMETER_SWEEPS:
            outdir = tmp_path / name
            assert main(["curve", "--dist", template, "--family-sweep", sweep,
                         "--out", str(outdir)]) == 0
            with open(outdir / "maxima.csv") as fh:
                maxima = list(csv.DictReader(fh))
            params = [float(r["param"]) for r in maxima]
            at_zero = {p for p, r in zip(params, maxima) if abs(float(r["lambda_star"])) <= 1e-6}
            expected = set(params) if symmetric == "all" else symmetric
            good = at_zero == expected and len(list(outdir.glob("h_*.csv"))) == len(params)
            ok &= good
            rows.append(f"{name} zero at {sorted(at_zero) if symmetric != 'all' else 'all'}")
        record_acceptance(13, "parameter sweeps", ok, "; ".join(rows))
        assert ok
