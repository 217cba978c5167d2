"""Exact-arithmetic toolkit for natural density, statistical convergence of
real sequences and statistical convergence modes of step functions on [0,1)."""

from __future__ import annotations

from .core import Verdict
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["Verdict", "BACKEND", "__version__"]
