"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``SUBGAUSS_PURE_PYTHON=1`` before import to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
tilted_cgf = _pykernels.tilted_cgf
series_cgf = _pykernels.series_cgf

if os.environ.get("SUBGAUSS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        tilted_cgf = _ckernels.tilted_cgf
        series_cgf = _ckernels.series_cgf
