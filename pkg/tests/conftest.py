import pytest
from hypothesis import HealthCheck, settings

from subgauss.distributions import (Affine, Bernoulli, Beta, Binomial, DiracMixture,
                                    IndependentSum, Kumaraswamy, Mixture, Triangular, Uniform)

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def family_zoo():
    """One instance of every family, including composites."""
    return {
        "bernoulli": Bernoulli(0.3),
        "binomial": Binomial(6, 0.2),
        "uniform": Uniform(-1.0, 2.0),
        "triangular": Triangular(1.0, 2.0),
        "beta": Beta(2.0, 5.0),
        "beta-u": Beta(0.5, 0.7),
        "kumaraswamy": Kumaraswamy(2.0, 3.0),
        "kumaraswamy-small": Kumaraswamy(0.6, 0.8),
        "dirac": DiracMixture(((-2.0, 1 / 13), (-0.5, 4 / 7), (1.25, 32 / 91))),
        "mixture": Mixture(((0.1, Beta(1.5, 1.5)), (0.9, Beta(9.0, 9.0)))),
        "affine": Affine(-2.0, 1.0, Beta(2.0, 3.0)),
        "sum": IndependentSum((Uniform(0.0, 1.0), Bernoulli(0.2))),
    }



# one line per acceptance check, printed after the run
ACCEPTANCE_LINES = {}


def record_acceptance(number, title, ok, detail):
    ACCEPTANCE_LINES[number] = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance summary")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
