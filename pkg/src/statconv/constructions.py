"""Function-sequence constructions with block metadata for exact checkpoint work."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from . import index_sets as ix
from . import kernels
from .conv_modes import FnSeq
from .core import StatconvError, q, qstr
from .step_space import IntervalSet, StepFn, dyadic_interval, indicator, interval_indicator

TYPEWRITER_MAX_BLOCK = 20
EXAMPLE24_DEPTH_CAP = 12


class DepthCapError(StatconvError, ValueError):
    pass


class DegenerateSetError(StatconvError, ValueError):
    pass


class NotACheckpoint(StatconvError, ValueError):
    pass


# -- typewriter -------------------------------------------------------------------


def typewriter_index(k: int) -> tuple[int, int]:
    """``k = 2 + 4 + ... + 2^(n-1) + j`` with ``1 <= j <= 2^n``; returns ``(n, j)``."""
    if k < 1:
        raise ValueError("k >= 1")
    n = (k + 1).bit_length() - 1
    return n, k + 2 - (1 << n)


def typewriter_k(n: int, j: int) -> int:
    if n < 1 or not 1 <= j <= 1 << n:
        raise ValueError(f"need n >= 1 and 1 <= j <= 2^n, got n={n}, j={j}")
    return (1 << n) - 2 + j


def typewriter_block(n: int) -> tuple[int, int]:
    """Index range of block ``n``."""
    return (1 << n) - 1, (1 << (n + 1)) - 2


def typewriter_interval(k: int) -> IntervalSet:
    n, j = typewriter_index(k)
    return dyadic_interval(n, j)


def _typewriter_hits(x, eps, f, points):
    """Closed-form hit counts for the limit 0 through the integer kernel."""
    if any(v != 0 for v in f.values) or not 0 < eps <= 1:
        return None
    return kernels.typewriter_hit_counts(q(x), list(points))


def typewriter(max_block: int = TYPEWRITER_MAX_BLOCK) -> FnSeq:
    """Indicators of ``[(j-1)/2^n, j/2^n)`` sweeping ``[0,1)`` block by block."""

    def gen(k: int) -> StepFn:
        n, j = typewriter_index(k)
        if n > max_block:
            raise DepthCapError(f"typewriter index {k} lies in block {n} > cap {max_block}")
        return interval_indicator(Fraction(j - 1, 1 << n), Fraction(j, 1 << n))

    top = typewriter_block(max_block)[1]
    anchors = [typewriter_block(n)[0] for n in range(1, max_block + 1)]
    return FnSeq(gen, "typewriter", {"max_block": max_block}, anchors=anchors,
                 checkpoints=[typewriter_block(n)[1] for n in range(1, max_block + 1)],
                 hit_counter=_typewriter_hits, block_of=typewriter_index, budget=top)


# -- the anchored sweep ---------------------------------------------------------------


@dataclass(frozen=True)
class Example24Params:
    """Per block ``n``: ``m_{n-1} < k_1 < ... < k_{2^n} < m_n`` (``m_0 = 0``)."""

    k: tuple[tuple[int, ...], ...]
    m: tuple[int, ...]

    @property
    def n_max(self) -> int:
        return len(self.k)

    def check(self) -> list[tuple[int, str, bool]]:
        """The three defining inequalities, per block, as exact rational facts."""
        out = []
        for n in range(1, self.n_max + 1):
            ks, m_prev, m_n = self.k[n - 1], self.m[n - 1], self.m[n]
            out.append((n, "first", Fraction(ks[0] - m_prev, ks[0]) > Fraction(1, 2)))
            out.append((n, "gaps", all(Fraction(b - a, b) > Fraction(1, 2) for a, b in zip(ks, ks[1:]))))
            out.append((n, "last", Fraction(ks[-1], m_n) < Fraction(1, 3)))
            out.append((n, "order", m_prev < ks[0] and all(a < b for a, b in zip(ks, ks[1:])) and ks[-1] < m_n))
        return out

    def segments(self) -> Iterator[tuple[int, int, int, int]]:
        """``(lo, hi, n, j)`` runs; ``j = 0`` marks the zero stretch ``(k_{2^n}, m_n]``."""
        for n in range(1, self.n_max + 1):
            prev = self.m[n - 1]
            for j, kj in enumerate(self.k[n - 1], start=1):
                yield prev + 1, kj, n, j
                prev = kj
            yield prev + 1, self.m[n], n, 0

    def to_json(self) -> dict:
        return {"m": [str(v) for v in self.m], "k": [[str(v) for v in ks] for ks in self.k]}


def default_example24(n_max: int, cap: int = EXAMPLE24_DEPTH_CAP) -> tuple[Example24Params, FnSeq]:
    """Anchors ``k_1 = 2 m_{n-1} + 1``, ``k_{j+1} = 2 k_j + 1``, ``m_n = 3 k_{2^n} + 1``.

    ``f_k`` is the indicator of ``I_j = [(j-1)/2^n, j/2^n)`` for
    ``k_{j-1} < k <= k_j`` (with ``k_0 = m_{n-1}``) and ``0`` on ``(k_{2^n}, m_n]``.
    """
    if not 1 <= n_max <= cap:
        raise DepthCapError(f"depth {n_max} outside 1..{cap}")
    ks, ms = [], [0]
    for n in range(1, n_max + 1):
        row = [2 * ms[-1] + 1]
        for _ in range((1 << n) - 1):
            row.append(2 * row[-1] + 1)
        ks.append(tuple(row))
        ms.append(3 * row[-1] + 1)
    params = Example24Params(tuple(ks), tuple(ms))
    runs = list(params.segments())
    los = [r[0] for r in runs]
    zero = StepFn.constant(0)

    def fn_for(n: int, j: int) -> StepFn:
        return zero if j == 0 else interval_indicator(Fraction(j - 1, 1 << n), Fraction(j, 1 << n))

    def gen(k: int) -> StepFn:
        if not 1 <= k <= ms[-1]:
            raise ValueError(f"index {k} outside the constructed range 1..m_{n_max}")
        lo, hi, n, j = runs[bisect.bisect_right(los, k) - 1]
        return fn_for(n, j)

    def segments(lo: int, hi: int):
        if hi > ms[-1]:
            raise ValueError(f"index {hi} outside the constructed range 1..m_{n_max}")
        i = bisect.bisect_right(los, lo) - 1
        while i < len(runs) and runs[i][0] <= hi:
            a, b, n, j = runs[i]
            yield max(a, lo), min(b, hi), fn_for(n, j)
            i += 1

    anchors = sorted({kj for row in ks for kj in row} | set(ms[1:]))
    seq = FnSeq(gen, "example24", {"n_max": n_max}, segments=segments, checkpoints=anchors, anchors=anchors)
    return params, seq


def example24_checkpoint_for(params: Example24Params, x, n: int) -> int:
    """``k_{j_n}^{(n)}`` where ``I_{j_n}^{(n)}`` contains ``x``."""
    x = q(x)
    j = (x.numerator << n) // x.denominator + 1
    return params.k[n - 1][j - 1]


def example24_running_density(params: Example24Params, x, eps, checkpoint: int) -> Fraction:
    """``|{k <= C : f_k(x) >= eps}| / C`` at an anchor ``C``, summed block by block."""
    x, eps = q(x), q(eps)
    anchors = {kj for row in params.k for kj in row} | set(params.m[1:])
    if checkpoint not in anchors:
        raise NotACheckpoint(f"{checkpoint} is not a stored anchor")
    if not 0 <= x < 1:
        raise ValueError("x must lie in [0,1)")
    if eps > 1:
        return Fraction(0)
    if eps <= 0:
        return Fraction(1)
    count = 0
    for n in range(1, params.n_max + 1):
        if params.m[n - 1] >= checkpoint:
            break
        j = (x.numerator << n) // x.denominator + 1
        lo = params.m[n - 1] if j == 1 else params.k[n - 1][j - 2]
        hi = params.k[n - 1][j - 1]
        if checkpoint > lo:
            count += min(hi, checkpoint) - lo
    return Fraction(count, checkpoint)


# -- sets of intervals picked by an index set -----------------------------------------


def example36_Cn(Kprime: ix.IndexSet, n: int) -> IntervalSet:
    """Union of the typewriter intervals ``A_k`` over ``k`` in ``Kprime`` within block ``n``."""
    lo, hi = typewriter_block(n)
    return IntervalSet(
        (Fraction(j - 1, 1 << n), Fraction(j, 1 << n))
        for j in range(1, (1 << n) + 1)
        if Kprime.contains(lo + j - 1)
    )


def example38(A: IntervalSet, K: ix.IndexSet) -> FnSeq:
    """``f_n = chi_A`` on ``K`` and ``0`` elsewhere."""
    if A.measure() == 0:
        raise DegenerateSetError("A must have positive measure")
    chi = indicator(A)
    zero = StepFn.constant(0)
    return FnSeq(lambda n: chi if K.contains(n) else zero, "example38",
                 {"A": A.to_json(), "K": K.describe()}, checkpoints=K.checkpoints)


def _next_member(S: ix.IndexSet, m: int, hi: int) -> int | None:
    """Smallest element of ``S`` in ``(m, hi]``, by bisection on ``count_upto``."""
    base = S.count_upto(m)
    if S.count_upto(hi) == base:
        return None
    lo = m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if S.count_upto(mid) > base:
            hi = mid
        else:
            lo = mid
    return hi


def _left_cut(f: StepFn) -> Fraction | None:
    """``r`` when ``f`` is the indicator of ``[0, r)``, else ``None``."""
    if f.values == (ONE,):
        return ONE
    if f.values == (ONE, 0) and f.breaks[0] == 0:
        return f.breaks[1]
    return None


ONE = Fraction(1)


def au_example(disturbance: ix.IndexSet | None = None) -> FnSeq:
    """``chi_[0,1/k)`` off a density-zero set ``S`` and ``chi_[0,1)`` on it (squares by default)."""
    S = ix.squares() if disturbance is None else disturbance
    full = StepFn.constant(1)

    def gen(k: int) -> StepFn:
        if S.contains(k):
            return full
        return interval_indicator(Fraction(0), Fraction(1, k))

    def bad_runs(ref: StepFn, eps: Fraction, depth: int, lo: int, hi: int):
        # |f_n - ref| is the indicator of the gap between two left cuts
        r = _left_cut(ref)
        if r is None or not 0 < eps <= 1:
            return None
        scale = 1 << depth

        def cells(c: Fraction) -> tuple[int, ...]:
            a, b = min(r, c), max(r, c)
            if a == b:
                return ()
            return tuple(range((a.numerator * scale) // a.denominator,
                               -((-b.numerator * scale) // b.denominator)))

        on_S = cells(ONE)
        # past ``scale`` both cuts of a non-S index fall in cell 0 or beyond it,
        # so the bad cells are constant apart from the one index with 1/n = r
        cut = scale
        special = r.denominator if r.numerator == 1 and r.denominator > cut else None
        runs = []
        for n in range(lo, min(hi, cut) + 1):
            runs.append((n, n, on_S if S.contains(n) else cells(Fraction(1, n))))
        if hi > cut:
            tail = cells(Fraction(1, hi if special != hi else hi + 1))
            pos = max(lo, cut + 1)
            while pos <= hi:
                m = _next_member(S, pos - 1, hi)
                if special is not None and pos <= special <= hi and (m is None or special < m):
                    m, bad_m = special, cells(Fraction(1, special))
                else:
                    bad_m = on_S
                end = hi if m is None else m - 1
                if end >= pos:
                    runs.append((pos, end, tail))
                if m is None:
                    break
                runs.append((m, m, bad_m))
                pos = m + 1
        return runs

    return FnSeq(gen, "au_example", {"S": S.describe()}, bad_runs=bad_runs)


# -- small helpers used by suites and the CLI -------------------------------------------


def constant_seq(f: StepFn) -> FnSeq:
    return FnSeq(lambda k: f, "constant", {"f": f.to_json()},
                 segments=lambda lo, hi: iter([(lo, hi, f)]))


def alternating_halves() -> FnSeq:
    a = indicator(IntervalSet([(0, Fraction(1, 2))]))
    b = indicator(IntervalSet([(Fraction(1, 2), 1)]))
    return FnSeq(lambda k: a if k % 2 else b, "alternating_halves")


def describe_typewriter(k: int) -> dict:
    n, j = typewriter_index(k)
    I = dyadic_interval(n, j)
    a, b = I.intervals[0]
    return {"k": k, "block": n, "position": j, "interval": [qstr(a), qstr(b)]}


CONSTRUCTIONS = ("typewriter", "example24", "example36", "example38", "au_example")
