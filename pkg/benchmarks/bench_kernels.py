"""Time the compiled CGF kernels against the numpy fallback.

Run ``python benchmarks/bench_kernels.py``; prints per-kernel timings, the
speed-up and the largest relative disagreement between the two backends.
"""
import argparse
import timeit

import numpy as np

from subgauss import _pykernels
from subgauss.cgf import _beta_logr, _terms_needed

try:
    from subgauss import _ckernels
except ImportError:
    _ckernels = None


def _cases(n_grid):
    lam = np.linspace(-60.0, 60.0, n_grid)
    rng = np.random.default_rng(0)
    x = rng.uniform(-1.0, 1.0, 64)
    p = rng.dirichlet(np.ones(64))
    d = x - p @ x
    s = float(p @ d)
    lam_pos = np.linspace(0.0, 60.0, n_grid)
    logr = _beta_logr(2.0, 5.0, _terms_needed(60.0))
    return {
        "tilted_cgf (64 atoms)": (lambda m: m.tilted_cgf(d, p, s, lam)),
        "series_cgf (Beta(2,5))": (lambda m: m.series_cgf(logr, 2.0 / 7.0, lam_pos)),
    }


def _rel_diff(a, b):
    return max(float(np.max(np.abs(x - y) / np.maximum(np.abs(y), 1e-300)))
               for x, y in zip(a[:3], b[:3]))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid", type=int, default=4097, help="lambda points per call")
    parser.add_argument("--repeat", type=int, default=5, help="best-of repeats")
    args = parser.parse_args(argv)

    if _ckernels is None:
        print("compiled extension not built; only the numpy backend is available")
    print(f"{'kernel':<26}{'python ms':>12}{'cython ms':>12}{'speed-up':>10}{'max rel diff':>14}")
    for name, call in _cases(args.grid).items():
        t_py = min(timeit.repeat(lambda: call(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:<26}{1e3 * t_py:>12.2f}{'-':>12}{'-':>10}{'-':>14}")
            continue
        t_c = min(timeit.repeat(lambda: call(_ckernels), number=1, repeat=args.repeat))
        diff = _rel_diff(call(_ckernels), call(_pykernels))
        print(f"{name:<26}{1e3 * t_py:>12.2f}{1e3 * t_c:>12.2f}{t_py / t_c:>10.1f}{diff:>14.2e}")


if __name__ == "__main__":
    main()
