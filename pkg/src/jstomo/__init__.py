"""Spin, symplectic, photon-number and Wigner tomograms linked through the Jordan-Schwinger map.

Modules: ``specfun`` (special functions), ``hilbert`` (states and the
two-mode embedding), ``tomography`` (tomograms and reconstructions),
``kernels`` (closed-form transition kernels), ``transforms`` (kernel-based
conversions between tomograms), ``oracle`` (independent verification) and
``cli``.
"""
from .errors import (ConsistencyError, CutoffError, DegenerateFrameError, DomainError, EmptySectorError,
                     JstomoError, QuadratureError)
from .hilbert import DensityMatrix, js_forward, js_inverse, make_paper_state, random_spin_state

__version__ = "0.1.0"

__all__ = ["ConsistencyError", "CutoffError", "DegenerateFrameError", "DensityMatrix", "DomainError",
           "EmptySectorError", "JstomoError", "QuadratureError", "js_forward", "js_inverse", "make_paper_state",
           "random_spin_state"]
