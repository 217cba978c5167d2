"""Pure-Python integer kernels.

Every function here has a compiled twin in ``_ckernels.pyx`` with the same
signature and bit-identical results. Inputs are plain ints, ``bytes``-like
0/1 masks and ``array('q')`` buffers; no rationals cross this boundary.
"""

from __future__ import annotations

from array import array
from typing import Sequence


def prefix_counts(mask, ladder: Sequence[int]) -> list[int]:
    """Number of set entries of ``mask`` among indices ``1..n`` for each ``n`` in ``ladder``.

    ``mask[i]`` holds the membership of index ``i + 1``; ``ladder`` must be
    non-decreasing and bounded by ``len(mask)``.
    """
    out = []
    total = 0
    pos = 0
    for n in ladder:
        while pos < n:
            if mask[pos]:
                total += 1
            pos += 1
        out.append(total)
    return out


def two_adic_valuations(n: int) -> array:
    """``v[k-1]`` is the exponent of 2 in ``k`` for ``k = 1..n``."""
    out = array("q", bytes(8 * n))
    for k in range(1, n + 1):
        v = 0
        m = k
        while not m & 1:
            m >>= 1
            v += 1
        out[k - 1] = v
    return out


def count_less(nums: array, dens: array, t_num: int, t_den: int, ladder: Sequence[int]) -> list[int]:
    """Counts of ``k <= n`` with ``nums[k-1]/dens[k-1] < t_num/t_den`` along ``ladder``.

    Denominators must be positive.
    """
    out = []
    total = 0
    pos = 0
    for n in ladder:
        while pos < n:
            if nums[pos] * t_den < t_num * dens[pos]:
                total += 1
            pos += 1
        out.append(total)
    return out


def typewriter_hit_counts(x_num: int, x_den: int, ladder: Sequence[int]) -> list[int]:
    """For ``x = x_num/x_den`` in [0, 1), count ``k <= n`` whose dyadic sweep interval holds ``x``.

    Index ``k`` lives in block ``b`` with ``k = 2^b - 2 + j``, ``1 <= j <= 2^b``, and
    covers ``[(j-1)/2^b, j/2^b)``.
    """
    out = []
    total = 0
    k = 1
    for n in ladder:
        while k <= n:
            b = (k + 1).bit_length() - 1
            j = k + 2 - (1 << b)
            # (j-1)/2^b <= x < j/2^b
            if (j - 1) * x_den <= (x_num << b) < j * x_den:
                total += 1
            k += 1
        out.append(total)
    return out


def block_union_count(los: array, his: array, n: int) -> int:
    """Size of ``[1, n]`` intersected with the union of disjoint sorted blocks ``[los[i], his[i]]``."""
    total = 0
    for i in range(len(los)):
        lo = los[i]
        if lo > n:
            break
        hi = his[i]
        total += (hi if hi < n else n) - lo + 1
    return total
