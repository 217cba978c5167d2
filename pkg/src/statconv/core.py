"""Shared value types: verdicts, rational parsing/rendering, exact summation, errors."""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Iterable, Sequence

DEFAULT_TOLERANCE = Fraction(1, 1000)
DEFAULT_MARGIN = Fraction(1, 10)


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


class StatconvError(Exception):
    pass


class BudgetExceeded(StatconvError):
    """Enumeration would pass the configured index budget."""


class InconclusiveError(StatconvError):
    def __init__(self, message: str, k: int | None = None):
        super().__init__(message)
        self.k = k


def q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to ``Fraction``. Floats are refused."""
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}; pass an int, Fraction or 'p/q' string")
    if type(x) is Fraction:
        return x
    return Fraction(x)


def qstr(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_q_list(text: str) -> list[Fraction]:
    return [q(part.strip()) for part in text.split(",") if part.strip()]


def exact_sum(values: Sequence[Fraction]) -> Fraction:
    """Pairwise sum; keeps intermediate denominators small for long harmonic-like runs."""
    vals = list(values)
    if not vals:
        return Fraction(0)
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return Fraction(vals[0])


def combine(verdicts: Iterable[Verdict]) -> Verdict:
    """All hold -> Holds; any fails -> Fails; otherwise Inconclusive."""
    vs = list(verdicts)
    if any(v is Verdict.FAILS for v in vs):
        return Verdict.FAILS
    if vs and all(v is Verdict.HOLDS for v in vs):
        return Verdict.HOLDS
    return Verdict.INCONCLUSIVE


def last_quarter(points: Sequence) -> Sequence:
    """Final quarter of a ladder, never fewer than two entries."""
    m = max(2, -(-len(points) // 4))
    return points[-m:]


def last_half(points: Sequence) -> Sequence:
    m = max(2, -(-len(points) // 2))
    return points[-m:]


def non_increasing(values: Sequence[Fraction]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))


def check_ladder(ladder: Sequence[int]) -> list[int]:
    ladder = [int(n) for n in ladder]
    if not ladder:
        raise ValueError("empty ladder")
    if ladder[0] < 1 or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError(f"ladder must be strictly increasing positive integers: {ladder}")
    return ladder


def tail_start(n: int) -> int:
    """Last index before the final quarter ``(3n/4, n]`` of ``1..n``."""
    return 3 * n // 4


def certify(ladder: Sequence[int], means: Sequence[Fraction], window_mean: Fraction,
            tolerance: Fraction = DEFAULT_TOLERANCE, margin: Fraction = DEFAULT_MARGIN) -> Verdict:
    """Finite-truncation verdict for a quantity that should tend to zero.

    Holds: final running mean within ``tolerance`` and non-increasing over the
    last half of the ladder. Fails: both the final running mean and the mean
    over the final quarter of indices reach ``margin``.
    """
    if means[-1] <= tolerance and non_increasing(last_half(list(means))):
        return Verdict.HOLDS
    if means[-1] >= margin and window_mean >= margin:
        return Verdict.FAILS
    return Verdict.INCONCLUSIVE


def jsonable(obj):
    """Recursively render rationals as "p/q" and objects through their ``to_json``."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return qstr(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialise {type(obj).__name__}")
