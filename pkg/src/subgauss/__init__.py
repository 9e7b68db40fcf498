"""Optimal sub-Gaussian proxy variance and strict sub-Gaussianity of bounded laws."""

__version__ = "0.1.0"

from .distributions import (Affine, Bernoulli, Beta, Binomial, DiracMixture, Distribution,
                            IndependentSum, Kumaraswamy, MomentTable, Mixture, Triangular, Uniform,
                            central_moment, fingerprint, from_spec, is_symmetric, mean,
                            moment_table, parse_spec, rademacher, support, support_radius,
                            symmetric_three_point, to_spec, variance)
from .cgf import cgf_centered, cgf_derivative, cgf_derivs, cgf_second_derivative
from .hfunc import HCurve, h_curve, h_eval, h_series, ode_rhs_second, series_switch
from .solver import (SolveResult, SolverOptions, bracket_bound, solve_delta, solve_hmax,
                     stationarity_residual)
from .strictness import (StrictnessVerdict, Verdict, classify, necessary_conditions,
                         sufficient_moment_condition)
from .closed_forms import (NamedCase, bernoulli_proxy, binomial_proxy, counterexample_catalog,
                           kumaraswamy_third_moment_root, kumaraswamy_zero_skew_alpha,
                           triangular_kappa3, uniform_sum_proxy)
from .oracle import McEstimate, mc_mgf, quad_moment, verify_inequality
from .errors import (ConvergenceError, DegenerateDistributionError, EvaluationError,
                     MomentRangeError, ParameterError, PreconditionError, SpecError,
                     SubGaussError)
from .kernels import BACKEND

__all__ = [
    "__version__", "Affine", "Bernoulli", "Beta", "Binomial", "DiracMixture", "Distribution",
    "IndependentSum", "Kumaraswamy", "MomentTable", "Mixture", "Triangular", "Uniform",
    "central_moment", "fingerprint", "from_spec", "is_symmetric", "mean", "moment_table",
    "parse_spec", "rademacher", "support", "support_radius", "symmetric_three_point", "to_spec",
    "variance", "cgf_centered", "cgf_derivative", "cgf_derivs", "cgf_second_derivative", "HCurve",
    "h_curve", "h_eval", "h_series", "ode_rhs_second", "series_switch", "SolveResult",
    "SolverOptions", "bracket_bound", "solve_delta", "solve_hmax", "stationarity_residual",
    "StrictnessVerdict", "Verdict", "classify", "necessary_conditions",
    "sufficient_moment_condition", "NamedCase", "bernoulli_proxy", "binomial_proxy",
    "counterexample_catalog", "kumaraswamy_third_moment_root", "kumaraswamy_zero_skew_alpha",
    "triangular_kappa3", "uniform_sum_proxy", "McEstimate", "mc_mgf", "quad_moment",
    "verify_inequality", "ConvergenceError", "DegenerateDistributionError", "EvaluationError",
    "MomentRangeError", "ParameterError", "PreconditionError", "SpecError", "SubGaussError",
    "BACKEND",
]
