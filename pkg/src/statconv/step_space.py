"""Exact step functions on [0,1) and finite unions of half-open intervals."""

from __future__ import annotations

import bisect
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .core import StatconvError, exact_sum, q, qstr

ZERO = Fraction(0)
ONE = Fraction(1)


class FullCoverError(StatconvError, ValueError):
    pass


class IntervalSet:
    """Disjoint sorted half-open intervals ``[a, b)`` inside [0,1).

    Touching and overlapping inputs are merged, empty ones dropped.
    """

    __slots__ = ("intervals", "_hash")

    def __init__(self, intervals: Iterable[tuple] = ()):
        parts = []
        for a, b in intervals:
            a, b = q(a), q(b)
            if not (0 <= a <= b <= 1):
                raise ValueError(f"interval [{a}, {b}) not inside [0,1)")
            if a < b:
                parts.append((a, b))
        parts.sort()
        merged: list[tuple[Fraction, Fraction]] = []
        for a, b in parts:
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        self.intervals = tuple(merged)
        self._hash = hash(self.intervals)

    @classmethod
    def empty(cls) -> IntervalSet:
        return cls()

    @classmethod
    def full(cls) -> IntervalSet:
        return cls([(ZERO, ONE)])

    def measure(self) -> Fraction:
        return exact_sum([b - a for a, b in self.intervals])

    def contains(self, x) -> bool:
        x = q(x)
        i = bisect.bisect_right(self.intervals, (x, Fraction(2))) - 1
        return i >= 0 and self.intervals[i][0] <= x < self.intervals[i][1]

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def __or__(self, other: IntervalSet) -> IntervalSet:
        return IntervalSet(self.intervals + other.intervals)

    def complement(self) -> IntervalSet:
        out, pos = [], ZERO
        for a, b in self.intervals:
            out.append((pos, a))
            pos = b
        out.append((pos, ONE))
        return IntervalSet(out)

    def __and__(self, other: IntervalSet) -> IntervalSet:
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append((lo, hi))
        return IntervalSet(out)

    def __sub__(self, other: IntervalSet) -> IntervalSet:
        return self & other.complement()

    def issubset(self, other: IntervalSet) -> bool:
        return (self - other).measure() == 0

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __repr__(self) -> str:
        body = " u ".join(f"[{a},{b})" for a, b in self.intervals) or "{}"
        return f"IntervalSet({body})"

    def to_json(self) -> dict:
        return {"intervals": [[qstr(a), qstr(b)] for a, b in self.intervals]}

    @classmethod
    def from_json(cls, data: dict) -> IntervalSet:
        return cls((Fraction(a), Fraction(b)) for a, b in data["intervals"])


def dyadic_interval(n: int, j: int) -> IntervalSet:
    """``[(j-1)/2^n, j/2^n)`` for ``1 <= j <= 2^n``."""
    if not 1 <= j <= 1 << n:
        raise ValueError(f"j={j} outside 1..2^{n}")
    return IntervalSet([(Fraction(j - 1, 1 << n), Fraction(j, 1 << n))])


class StepFn:
    """Piecewise constant ``f`` on [0,1) with value ``values[i]`` on ``[breaks[i], breaks[i+1])``.

    Stored canonically (adjacent equal values merged), so equality is
    equality almost everywhere.
    """

    __slots__ = ("breaks", "values", "_hash")

    def __init__(self, breaks: Sequence, values: Sequence):
        bs = [q(b) for b in breaks]
        vs = [q(v) for v in values]
        if len(bs) != len(vs) + 1 or not vs:
            raise ValueError("need len(breaks) == len(values) + 1 >= 2")
        if bs[0] != 0 or bs[-1] != 1 or any(b <= a for a, b in zip(bs, bs[1:])):
            raise ValueError(f"breakpoints must rise strictly from 0 to 1: {bs}")
        cb, cv = [bs[0]], []
        for i, v in enumerate(vs):
            if cv and cv[-1] == v:
                cb[-1] = bs[i + 1]
            else:
                cv.append(v)
                cb.append(bs[i + 1])
        self.breaks = tuple(cb)
        self.values = tuple(cv)
        self._hash = hash((self.breaks, self.values))

    @classmethod
    def _canonical(cls, breaks: list, values: list) -> StepFn:
        """Build from already validated pieces, merging equal neighbours."""
        cb, cv = [breaks[0]], []
        for i, v in enumerate(values):
            if cv and cv[-1] == v:
                cb[-1] = breaks[i + 1]
            else:
                cv.append(v)
                cb.append(breaks[i + 1])
        obj = object.__new__(cls)
        obj.breaks = tuple(cb)
        obj.values = tuple(cv)
        obj._hash = hash((obj.breaks, obj.values))
        return obj

    @classmethod
    def constant(cls, c) -> StepFn:
        return cls((ZERO, ONE), (q(c),))

    def pieces(self):
        """``(a, b, v)`` per piece."""
        return zip(self.breaks, self.breaks[1:], self.values)

    def __call__(self, x) -> Fraction:
        x = q(x)
        if not 0 <= x < 1:
            raise ValueError(f"{x} outside [0,1)")
        return self.values[bisect.bisect_right(self.breaks, x) - 1]

    def _combine(self, other: StepFn, op: Callable[[Fraction, Fraction], Fraction]) -> StepFn:
        bs, vals = [ZERO], []
        for a, b, u, v in merged_pieces(self, other):
            vals.append(op(u, v))
            bs.append(b)
        return StepFn._canonical(bs, vals)

    def map(self, fn: Callable[[Fraction], Fraction]) -> StepFn:
        return StepFn._canonical(list(self.breaks), [fn(v) for v in self.values])

    def __add__(self, other):
        if not isinstance(other, StepFn):
            other = StepFn.constant(other)
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, StepFn):
            other = StepFn.constant(other)
        return self._combine(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return StepFn.constant(other) - self

    def __neg__(self):
        return self.map(lambda v: -v)

    def __mul__(self, other):
        if isinstance(other, StepFn):
            return self._combine(other, lambda a, b: a * b)
        c = q(other)
        return self.map(lambda v: v * c)

    __rmul__ = __mul__

    def __abs__(self):
        return self.map(abs)

    def max_abs(self) -> Fraction:
        return max(abs(v) for v in self.values)

    def levels(self) -> list[Fraction]:
        """Distinct values of ``|f|``, ascending."""
        return sorted({abs(v) for v in self.values})

    def __eq__(self, other) -> bool:
        return isinstance(other, StepFn) and self.breaks == other.breaks and self.values == other.values

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "StepFn(" + ", ".join(f"[{a},{b})->{v}" for a, b, v in self.pieces()) + ")"

    def to_json(self) -> dict:
        return {"breakpoints": [qstr(b) for b in self.breaks], "values": [qstr(v) for v in self.values]}

    @classmethod
    def from_json(cls, data: dict) -> StepFn:
        return cls([Fraction(b) for b in data["breakpoints"]], [Fraction(v) for v in data["values"]])


def merged_pieces(g: StepFn, h: StepFn):
    """``(a, b, g_value, h_value)`` over the common refinement of both partitions."""
    gb, gv, hb, hv = g.breaks, g.values, h.breaks, h.values
    i = j = 0
    a = ZERO
    while a < 1:
        gn, hn = gb[i + 1], hb[j + 1]
        b = gn if gn < hn else hn
        yield a, b, gv[i], hv[j]
        if gn == b:
            i += 1
        if hn == b:
            j += 1
        a = b


def diff_level_measure(g: StepFn, h: StepFn, c, strict: bool = False) -> Fraction:
    """``level_measure(g - h, c, strict)`` without building the difference."""
    c = q(c)
    total = ZERO
    for a, b, u, v in merged_pieces(g, h):
        d = abs(u - v)
        if d > c or (not strict and d == c):
            total += b - a
    return total


def indicator(I: IntervalSet) -> StepFn:
    bs, vs, pos = [ZERO], [], ZERO
    for a, b in I.intervals:
        if a > pos:
            vs.append(ZERO)
            bs.append(a)
        vs.append(ONE)
        bs.append(b)
        pos = b
    if pos < 1:
        vs.append(ZERO)
        bs.append(ONE)
    return StepFn._canonical(bs, vs)


def interval_indicator(a: Fraction, b: Fraction) -> StepFn:
    """Indicator of a single ``[a, b)`` with ``0 <= a < b <= 1``."""
    bs, vs = [ZERO], []
    if a > 0:
        bs.append(a)
        vs.append(ZERO)
    bs.append(b)
    vs.append(ONE)
    if b < 1:
        bs.append(ONE)
        vs.append(ZERO)
    return StepFn._canonical(bs, vs)


def zero() -> StepFn:
    return StepFn.constant(0)


def level_set(h: StepFn, c, strict: bool = False) -> IntervalSet:
    """``{|h| >= c}`` (or ``> c``) as an interval set."""
    c = q(c)
    return IntervalSet((a, b) for a, b, v in h.pieces() if (abs(v) > c if strict else abs(v) >= c))


def level_measure(h: StepFn, c, strict: bool = False) -> Fraction:
    """``lambda(|h| >= c)``, or ``lambda(|h| > c)`` when ``strict``."""
    c = q(c)
    return exact_sum([b - a for a, b, v in h.pieces() if (abs(v) > c if strict else abs(v) >= c)])


def rho(f: StepFn, g: StepFn) -> Fraction:
    """``inf_{eps > 0} eps + lambda(|f - g| >= eps)`` in closed form.

    Between consecutive levels of ``|f - g|`` the objective rises with eps, so
    the infimum is approached just above a level ``v`` (or above 0), where it
    equals ``v + lambda(|f - g| > v)``.
    """
    h = f - g
    return min(v + level_measure(h, v, strict=True) for v in [ZERO, *h.levels()])


def rho_objective(h: StepFn, eps) -> Fraction:
    """``eps + lambda(|h| >= eps)`` evaluated piece by piece."""
    eps = q(eps)
    return eps + sum((b - a for a, b, v in h.pieces() if abs(v) >= eps), ZERO)


def integral(f: StepFn) -> Fraction:
    return exact_sum([v * (b - a) for a, b, v in f.pieces()])


def truncate(f: StepFn, M) -> StepFn:
    """Clamp ``f`` to ``[-M, M]``."""
    M = q(M)
    if M <= 0:
        raise ValueError("M must be positive")
    return f.map(lambda v: max(-M, min(M, v)))


def pos_neg_parts(f: StepFn) -> tuple[StepFn, StepFn]:
    return f.map(lambda v: max(v, ZERO)), f.map(lambda v: max(-v, ZERO))


def sup_outside(h: StepFn, D: IntervalSet) -> Fraction:
    """Largest ``|h|`` on a piece meeting ``[0,1) \\ D`` in positive length."""
    rest = D.complement()
    if not rest:
        raise FullCoverError("D covers [0,1); nothing outside it")
    best = ZERO
    j = 0
    cells = rest.intervals
    for a, b, v in h.pieces():
        while j < len(cells) and cells[j][1] <= a:
            j += 1
        k = j
        while k < len(cells) and cells[k][0] < b:
            if min(b, cells[k][1]) > max(a, cells[k][0]):
                best = max(best, abs(v))
                break
            k += 1
    return best
