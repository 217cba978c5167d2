"""Backend selection for the integer counting kernels.

The compiled extension is used when it was built; setting
``STATCONV_PURE_PYTHON=1`` forces the fallback. Wrappers below guard the
int64 range the compiled code assumes and route oversized inputs to the
pure-Python implementation, so results never depend on the backend.
"""

from __future__ import annotations

import os
from array import array
from fractions import Fraction
from typing import Sequence

from . import _kernels_py

_LIMIT = 1 << 31

if os.environ.get("STATCONV_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "cython"


def prefix_counts(mask, ladder: Sequence[int]) -> list[int]:
    ladder = list(ladder)
    if ladder and ladder[-1] > len(mask):
        raise ValueError(f"ladder point {ladder[-1]} exceeds mask length {len(mask)}")
    if isinstance(mask, (list, tuple)):
        mask = bytes(1 if m else 0 for m in mask)
    return _impl.prefix_counts(mask, ladder)


def two_adic_valuations(n: int) -> array:
    return _impl.two_adic_valuations(n)


def count_less(values: Sequence[Fraction], threshold: Fraction, ladder: Sequence[int]) -> list[int]:
    """Counts of ``k <= n`` with ``values[k-1] < threshold`` at each ladder point."""
    ladder = list(ladder)
    if ladder and ladder[-1] > len(values):
        raise ValueError(f"ladder point {ladder[-1]} exceeds {len(values)} values")
    threshold = Fraction(threshold)
    m = ladder[-1] if ladder else 0
    nums = [v.numerator for v in values[:m]]
    dens = [v.denominator for v in values[:m]]
    small = all(-_LIMIT < x < _LIMIT for x in nums) and all(d < _LIMIT for d in dens)
    small = small and -_LIMIT < threshold.numerator < _LIMIT and threshold.denominator < _LIMIT
    impl = _impl if small else _kernels_py
    if small:
        nums, dens = array("q", nums), array("q", dens)
    return impl.count_less(nums, dens, threshold.numerator, threshold.denominator, ladder)


def typewriter_hit_counts(x: Fraction, ladder: Sequence[int]) -> list[int]:
    x = Fraction(x)
    ladder = list(ladder)
    top = ladder[-1] if ladder else 1
    impl = _impl if x.denominator < _LIMIT and top < (1 << 30) else _kernels_py
    return impl.typewriter_hit_counts(x.numerator, x.denominator, ladder)


def block_union_count(los: Sequence[int], his: Sequence[int], n: int) -> int:
    if los and max(his[-1], n) < (1 << 62):
        return _impl.block_union_count(array("q", los), array("q", his), n)
    return _kernels_py.block_union_count(los, his, n)
