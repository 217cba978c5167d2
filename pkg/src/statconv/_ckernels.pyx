# cython: language_level=3
"""Compiled twins of ``_kernels_py``. Callers guarantee operands fit in int64."""

from array import array

from libc.stdint cimport int64_t


def prefix_counts(const unsigned char[:] mask, ladder):
    cdef Py_ssize_t pos = 0, n
    cdef int64_t total = 0
    out = []
    for n in ladder:
        while pos < n:
            total += mask[pos] != 0
            pos += 1
        out.append(total)
    return out


def two_adic_valuations(Py_ssize_t n):
    out = array("q", bytes(8 * n))
    cdef int64_t[:] v = out
    cdef int64_t k, m, e
    for k in range(1, n + 1):
        e = 0
        m = k
        while not (m & 1):
            m >>= 1
            e += 1
        v[k - 1] = e
    return out


def count_less(const int64_t[:] nums, const int64_t[:] dens, int64_t t_num, int64_t t_den, ladder):
    cdef Py_ssize_t pos = 0, n
    cdef int64_t total = 0
    out = []
    for n in ladder:
        while pos < n:
            if nums[pos] * t_den < t_num * dens[pos]:
                total += 1
            pos += 1
        out.append(total)
    return out


def typewriter_hit_counts(int64_t x_num, int64_t x_den, ladder):
    cdef int64_t total = 0, k = 1, j, n, t
    cdef int b
    out = []
    for n in ladder:
        while k <= n:
            b = 0
            t = k + 1
            while t > 1:
                t >>= 1
                b += 1
            j = k + 2 - ((<int64_t>1) << b)
            if (j - 1) * x_den <= (x_num << b) and (x_num << b) < j * x_den:
                total += 1
            k += 1
        out.append(total)
    return out


def block_union_count(const int64_t[:] los, const int64_t[:] his, int64_t n):
    cdef int64_t total = 0, lo, hi
    cdef Py_ssize_t i
    for i in range(los.shape[0]):
        lo = los[i]
        if lo > n:
            break
        hi = his[i]
        total += (hi if hi < n else n) - lo + 1
    return total
