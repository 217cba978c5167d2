"""Exact subsets of the positive integers: membership, counting, density calculus.

An :class:`IndexSet` is immutable. ``count_upto`` uses closed forms where the
structure allows (progressions, block unions, intersections with either) and
falls back to enumeration under an index budget otherwise.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, NamedTuple, Sequence

from . import kernels
from .core import BudgetExceeded, StatconvError, check_ladder, last_quarter, q, qstr

DEFAULT_BUDGET = 10**6
DEFAULT_HORIZON = 10**7

EXISTS_SPREAD = Fraction(1, 50)
NOT_EXISTS_SPREAD = Fraction(1, 10)


class UnsupportedStructure(StatconvError):
    pass


class InvalidBounds(StatconvError, ValueError):
    pass


class ProfilePoint(NamedTuple):
    n: int
    count: int
    ratio: Fraction


def _merge_checkpoints(*groups: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted({c for g in groups for c in g}))


class IndexSet:
    """Base class; subclasses are frozen dataclasses."""

    @property
    def checkpoints(self) -> tuple[int, ...]:
        return ()

    def contains(self, k: int) -> bool:
        raise NotImplementedError

    def __contains__(self, k: int) -> bool:
        return self.contains(k)

    def count_upto(self, n: int) -> int:
        return self._enumerated_counts([n])[0]

    def count_many(self, ladder: Sequence[int]) -> list[int]:
        return [self.count_upto(n) for n in ladder]

    def exact_density(self) -> Fraction | None:
        return None

    def elements_upto(self, n: int) -> Iterator[int]:
        return (k for k in range(1, n + 1) if self.contains(k))

    # closed forms override this; it is the one enumeration path
    def _enumerated_counts(self, ladder: Sequence[int], budget: int = DEFAULT_BUDGET) -> list[int]:
        top = max(ladder) if ladder else 0
        if top > budget:
            raise BudgetExceeded(f"counting {self.describe()} up to {top} exceeds index budget {budget}")
        mask = bytes(1 if self.contains(k) else 0 for k in range(1, top + 1))
        return kernels.prefix_counts(mask, sorted(ladder))

    def describe(self) -> str:
        return type(self).__name__

    def to_json(self) -> dict:
        raise NotImplementedError

    def __or__(self, other: IndexSet) -> IndexSet:
        return Union(self, other)

    def __and__(self, other: IndexSet) -> IndexSet:
        return Intersection(self, other)

    def __sub__(self, other: IndexSet) -> IndexSet:
        return Difference(self, other)

    def __invert__(self) -> IndexSet:
        return Complement(self)


@dataclass(frozen=True)
class ArithmeticProgression(IndexSet):
    first: int
    step: int

    def __post_init__(self):
        if self.first < 1 or self.step < 1:
            raise ValueError(f"progression needs first >= 1 and step >= 1, got {self.first}, {self.step}")

    def contains(self, k: int) -> bool:
        return k >= self.first and (k - self.first) % self.step == 0

    def count_upto(self, n: int) -> int:
        return (n - self.first) // self.step + 1 if n >= self.first else 0

    def exact_density(self) -> Fraction:
        return Fraction(1, self.step)

    def elements_upto(self, n: int) -> Iterator[int]:
        return iter(range(self.first, n + 1, self.step))

    def describe(self) -> str:
        return f"AP({self.first},{self.step})"

    def to_json(self) -> dict:
        return {"variant": "ArithmeticProgression", "first": self.first, "step": self.step}


@dataclass(frozen=True)
class FiniteSet(IndexSet):
    elements: tuple[int, ...] = ()

    def __post_init__(self):
        elems = tuple(sorted(set(int(e) for e in self.elements)))
        if elems and elems[0] < 1:
            raise ValueError("finite sets live in the positive integers")
        object.__setattr__(self, "elements", elems)

    def contains(self, k: int) -> bool:
        import bisect

        i = bisect.bisect_left(self.elements, k)
        return i < len(self.elements) and self.elements[i] == k

    def count_upto(self, n: int) -> int:
        import bisect

        return bisect.bisect_right(self.elements, n)

    def exact_density(self) -> Fraction:
        return Fraction(0)

    def elements_upto(self, n: int) -> Iterator[int]:
        return (e for e in self.elements if e <= n)

    def describe(self) -> str:
        return f"FiniteSet({len(self.elements)})"

    def to_json(self) -> dict:
        return {"variant": "FiniteSet", "elements": list(self.elements)}


@dataclass(frozen=True, eq=False)
class BlockUnion(IndexSet):
    """Union of disjoint integer intervals ``[lo, hi]`` streamed in increasing order.

    ``blocks`` is a zero-argument factory returning a fresh iterator, so the set
    stays stateless. ``family`` = (name, params, part) marks sets cut from one
    shared partition; different parts of one family are disjoint.
    """

    blocks: Callable[[], Iterator[tuple[int, int]]]
    tag: str = "blocks"
    params: dict = field(default_factory=dict)
    stored_checkpoints: tuple[int, ...] = ()
    family: tuple | None = None
    # blocks seen so far, extended on demand; holds nothing the factory would not reproduce
    _seen: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False, compare=False)

    @property
    def checkpoints(self) -> tuple[int, ...]:
        return self.stored_checkpoints

    def _cover(self, k: int) -> tuple[list[int], list[int]]:
        """Cached block bounds, extended until a block starts beyond ``k`` or the blocks run out."""
        with self._lock:
            seen = self._seen
            if not seen:
                seen.update(los=[], his=[], it=self.blocks(), done=False)
            los, his = seen["los"], seen["his"]
            while not seen["done"] and (not los or los[-1] <= k):
                nxt = next(seen["it"], None)
                if nxt is None:
                    seen["done"] = True
                else:
                    los.append(nxt[0])
                    his.append(nxt[1])
            return los, his

    def blocks_upto(self, n: int) -> list[tuple[int, int]]:
        out = []
        prev_hi = 0
        for lo, hi in self.blocks():
            if lo > n:
                break
            if lo <= prev_hi or hi < lo:
                raise ValueError(f"blocks must be disjoint and increasing: [{lo},{hi}] after {prev_hi}")
            out.append((lo, hi))
            prev_hi = hi
        return out

    def contains(self, k: int) -> bool:
        los, his = self._cover(k)
        i = bisect.bisect_right(los, k) - 1
        return i >= 0 and k <= his[i]

    def count_upto(self, n: int) -> int:
        bl = self.blocks_upto(n)
        return kernels.block_union_count([b[0] for b in bl], [b[1] for b in bl], n)

    def describe(self) -> str:
        return f"BlockUnion[{self.tag}]"

    def to_json(self) -> dict:
        return {
            "variant": "BlockUnion",
            "tag": self.tag,
            "params": _json_params(self.params),
            "checkpoints": list(self.stored_checkpoints),
        }


@dataclass(frozen=True, eq=False)
class Predicate(IndexSet):
    rule: Callable[[int], bool]
    tag: str = "predicate"
    params: dict = field(default_factory=dict)
    budget: int = DEFAULT_BUDGET
    counter: Callable[[int], int] | None = None
    stored_checkpoints: tuple[int, ...] = ()
    bulk_counter: Callable[[list[int]], list[int]] | None = None

    @property
    def checkpoints(self) -> tuple[int, ...]:
        return self.stored_checkpoints

    def contains(self, k: int) -> bool:
        return bool(self.rule(k))

    def count_upto(self, n: int) -> int:
        return self.count_many([n])[0]

    def count_many(self, ladder: Sequence[int]) -> list[int]:
        if self.counter is not None:
            return [self.counter(n) for n in ladder]
        ladder = list(ladder)
        if ladder and max(ladder) > self.budget:
            raise BudgetExceeded(f"counting {self.describe()} up to {max(ladder)} exceeds index budget {self.budget}")
        if self.bulk_counter is not None and ladder == sorted(ladder):
            return self.bulk_counter(ladder)
        return self._enumerated_counts(ladder, self.budget)

    def describe(self) -> str:
        return f"Predicate[{self.tag}]"

    def to_json(self) -> dict:
        return {"variant": "Predicate", "tag": self.tag, "params": _json_params(self.params),
                "budget": self.budget, "checkpoints": list(self.stored_checkpoints)}


@dataclass(frozen=True, eq=False)
class Complement(IndexSet):
    operand: IndexSet

    @property
    def checkpoints(self):
        return self.operand.checkpoints

    def contains(self, k: int) -> bool:
        return not self.operand.contains(k)

    def count_upto(self, n: int) -> int:
        return n - self.operand.count_upto(n)

    def count_many(self, ladder):
        return [n - c for n, c in zip(ladder, self.operand.count_many(ladder))]

    def exact_density(self):
        d = self.operand.exact_density()
        return None if d is None else 1 - d

    def describe(self):
        return f"~{self.operand.describe()}"

    def to_json(self):
        return {"variant": "Complement", "operand": self.operand.to_json()}


@dataclass(frozen=True, eq=False)
class Union(IndexSet):
    left: IndexSet
    right: IndexSet

    @property
    def checkpoints(self):
        return _merge_checkpoints(self.left.checkpoints, self.right.checkpoints)

    def contains(self, k):
        return self.left.contains(k) or self.right.contains(k)

    def count_upto(self, n):
        both = 0 if structurally_disjoint(self.left, self.right) else Intersection(self.left, self.right).count_upto(n)
        return self.left.count_upto(n) + self.right.count_upto(n) - both

    def exact_density(self):
        a, b = self.left.exact_density(), self.right.exact_density()
        if a is None or b is None:
            return None
        if structurally_disjoint(self.left, self.right):
            return a + b
        ab = Intersection(self.left, self.right).exact_density()
        return None if ab is None else a + b - ab

    def describe(self):
        return f"({self.left.describe()} | {self.right.describe()})"

    def to_json(self):
        return {"variant": "Union", "operands": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True, eq=False)
class Intersection(IndexSet):
    left: IndexSet
    right: IndexSet

    @property
    def checkpoints(self):
        return _merge_checkpoints(self.left.checkpoints, self.right.checkpoints)

    def contains(self, k):
        return self.left.contains(k) and self.right.contains(k)

    def _ap_meet(self) -> IndexSet | None:
        a, b = self.left, self.right
        if not (isinstance(a, ArithmeticProgression) and isinstance(b, ArithmeticProgression)):
            return None
        return _progression_meet(a, b)

    def count_upto(self, n):
        a, b = self.left, self.right
        if structurally_disjoint(a, b):
            return 0
        for fin, other in ((a, b), (b, a)):
            if isinstance(fin, FiniteSet):
                return sum(1 for e in fin.elements if e <= n and other.contains(e))
        meet = self._ap_meet()
        if meet is not None:
            return meet.count_upto(n)
        for blk, other in ((a, b), (b, a)):
            if isinstance(blk, BlockUnion) and _has_closed_count(other):
                return sum(other.count_upto(min(hi, n)) - other.count_upto(lo - 1) for lo, hi in blk.blocks_upto(n))
        if isinstance(b, Complement) and _has_closed_count(a) and _has_closed_count(b.operand):
            return a.count_upto(n) - Intersection(a, b.operand).count_upto(n)
        return self._enumerated_counts([n])[0]

    def exact_density(self):
        if structurally_disjoint(self.left, self.right):
            return Fraction(0)
        meet = self._ap_meet()
        if meet is not None:
            return meet.exact_density()
        a, b = self.left.exact_density(), self.right.exact_density()
        if a == 0 or b == 0:
            return Fraction(0)
        # a density-one operand only removes a density-zero part of the other
        if a == 1:
            return b
        if b == 1:
            return a
        return None

    def describe(self):
        return f"({self.left.describe()} & {self.right.describe()})"

    def to_json(self):
        return {"variant": "Intersection", "operands": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True, eq=False)
class Difference(IndexSet):
    left: IndexSet
    right: IndexSet

    @property
    def checkpoints(self):
        return _merge_checkpoints(self.left.checkpoints, self.right.checkpoints)

    def contains(self, k):
        return self.left.contains(k) and not self.right.contains(k)

    def count_upto(self, n):
        return self.left.count_upto(n) - Intersection(self.left, self.right).count_upto(n)

    def exact_density(self):
        return Intersection(self.left, Complement(self.right)).exact_density()

    def describe(self):
        return f"({self.left.describe()} - {self.right.describe()})"

    def to_json(self):
        return {"variant": "Difference", "operands": [self.left.to_json(), self.right.to_json()]}


def _has_closed_count(s: IndexSet) -> bool:
    if isinstance(s, (ArithmeticProgression, FiniteSet, BlockUnion)):
        return True
    if isinstance(s, Predicate):
        return s.counter is not None
    if isinstance(s, Complement):
        return _has_closed_count(s.operand)
    if isinstance(s, (Union, Intersection, Difference)):
        return _has_closed_count(s.left) and _has_closed_count(s.right)
    return False


def _progression_meet(a: ArithmeticProgression, b: ArithmeticProgression) -> IndexSet:
    g = math.gcd(a.step, b.step)
    if (a.first - b.first) % g:
        return FiniteSet(())
    lcm = a.step // g * b.step
    # smallest x >= max(first) with x = a.first mod a.step, x = b.first mod b.step
    m = b.step // g
    t = ((b.first - a.first) // g * pow(a.step // g, -1, m)) % m if m > 1 else 0
    x = a.first + a.step * t
    start = max(a.first, b.first)
    if x < start:
        x += -(-(start - x) // lcm) * lcm
    return ArithmeticProgression(x, lcm)


def structurally_disjoint(a: IndexSet, b: IndexSet) -> bool:
    """True only when disjointness follows from structure alone (never by sampling)."""
    if isinstance(a, ArithmeticProgression) and isinstance(b, ArithmeticProgression):
        return (a.first - b.first) % math.gcd(a.step, b.step) != 0
    if isinstance(a, Complement) and a.operand is b or isinstance(b, Complement) and b.operand is a:
        return True
    if isinstance(a, Difference) and a.right is b or isinstance(b, Difference) and b.right is a:
        return True
    if isinstance(a, BlockUnion) and isinstance(b, BlockUnion) and a.family and b.family:
        return a.family[:2] == b.family[:2] and a.family[2] != b.family[2]
    if isinstance(a, FiniteSet):
        return not any(b.contains(e) for e in a.elements)
    if isinstance(b, FiniteSet):
        return structurally_disjoint(b, a)
    for x, y in ((a, b), (b, a)):
        if isinstance(x, Union):
            return structurally_disjoint(x.left, y) and structurally_disjoint(x.right, y)
        if isinstance(x, Intersection) and (structurally_disjoint(x.left, y) or structurally_disjoint(x.right, y)):
            return True
        if isinstance(x, Difference) and structurally_disjoint(x.left, y):
            return True
    return False


# -- operations ---------------------------------------------------------------


def contains(A: IndexSet, k: int) -> bool:
    if k < 1:
        raise ValueError(f"indices start at 1, got {k}")
    return A.contains(k)


def count_upto(A: IndexSet, n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return A.count_upto(n)


def density_profile(A: IndexSet, ladder: Sequence[int]) -> list[ProfilePoint]:
    ladder = check_ladder(ladder)
    counts = A.count_many(ladder)
    return [ProfilePoint(n, c, Fraction(c, n)) for n, c in zip(ladder, counts)]


def exact_density(A: IndexSet) -> Fraction | None:
    return A.exact_density()


@dataclass(frozen=True)
class DensityVerdict:
    """``kind`` is Exists, NotExists or Inconclusive; estimates are exact rationals."""

    kind: str
    profile: tuple[ProfilePoint, ...]
    value: Fraction | None = None
    lower: Fraction | None = None
    upper: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("Exists", "NotExists", "Inconclusive"):
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        if any(not 0 <= p.ratio <= 1 for p in self.profile):
            raise ValueError("profile ratios must lie in [0, 1]")
        if self.kind == "NotExists" and not (self.lower is not None and self.lower < self.upper):
            raise ValueError("NotExists needs lower < upper")
        if self.kind == "Exists" and not (self.value is not None and 0 <= self.value <= 1):
            raise ValueError("Exists needs a value in [0, 1]")

    @property
    def spread(self) -> Fraction:
        tail = [p.ratio for p in last_quarter(self.profile)]
        return max(tail) - min(tail)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "profile": profile_to_json(self.profile)}
        for key in ("value", "lower", "upper"):
            v = getattr(self, key)
            if v is not None:
                out[key] = qstr(v)
        return out


def assess_profile(profile: Sequence[ProfilePoint], exists_spread: Fraction = EXISTS_SPREAD,
                   not_exists_spread: Fraction = NOT_EXISTS_SPREAD) -> DensityVerdict:
    """Verdict from the spread of ratios over the final quarter of the ladder."""
    profile = tuple(profile)
    tail = [p.ratio for p in last_quarter(profile)]
    lo, hi = min(tail), max(tail)
    if hi - lo <= exists_spread:
        return DensityVerdict("Exists", profile, value=profile[-1].ratio)
    if hi - lo >= not_exists_spread:
        return DensityVerdict("NotExists", profile, lower=lo, upper=hi)
    return DensityVerdict("Inconclusive", profile)


# -- constructors -------------------------------------------------------------


def naturals() -> ArithmeticProgression:
    return ArithmeticProgression(1, 1)


def odds() -> ArithmeticProgression:
    return ArithmeticProgression(1, 2)


def dyadic_class(n: int) -> ArithmeticProgression:
    """``{2^(n-1) * k : k odd}``: the integers whose 2-adic valuation is ``n - 1``."""
    if n < 1:
        raise ValueError("n >= 1")
    return ArithmeticProgression(1 << (n - 1), 1 << n)


def squares() -> Predicate:
    return Predicate(lambda k: math.isqrt(k) ** 2 == k, "squares", counter=math.isqrt)


def powers_of_two() -> Predicate:
    return Predicate(lambda k: k & (k - 1) == 0, "powers_of_two", counter=lambda n: n.bit_length() if n > 0 else 0)


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _chase_blocks(low: Fraction, high: Fraction) -> Iterator[tuple[int, int]]:
    # Alternate an "in" run that lifts the running ratio to the high target with
    # an "out" run that drops it to the low target. Endpoint targets 0 and 1 are
    # approached through 1/2^(i+1) steps.
    n, c, i = 0, 0, 0
    while True:
        top = high if high < 1 else 1 - Fraction(1, 2 ** (i + 1))
        bottom = low if low > 0 else high / 2 ** (i + 1)
        end = max(_ceil((n - c) / (1 - top)), n + 1)
        yield n + 1, end
        c += end - n
        n = max(_ceil(c / bottom), end + 1)
        i += 1


def _chase_checkpoints(low: Fraction, high: Fraction, horizon: int) -> tuple[int, ...]:
    out = []
    for lo, hi in _chase_blocks(low, high):
        if lo > 1:
            out.append(lo - 1)
        if hi > horizon:
            break
        out.append(hi)
    return tuple(c for c in out if c <= horizon)


def make_densityless(low, high, horizon: int = DEFAULT_HORIZON) -> BlockUnion:
    """A block union whose counting ratio swings between ``low`` and ``high``.

    Checkpoints are the block ends (peaks) and the ends of the gaps (troughs)
    up to ``horizon``.
    """
    low, high = q(low), q(high)
    if not (0 <= low < high <= 1):
        raise InvalidBounds(f"need 0 <= low < high <= 1, got {low}, {high}")
    return BlockUnion(
        lambda: _chase_blocks(low, high),
        tag="densityless",
        params={"low": low, "high": high},
        stored_checkpoints=_chase_checkpoints(low, high, horizon),
    )


def phase_boundaries(horizon: int) -> list[int]:
    """``1, 4, 32, 512, ...``: phase ``l`` ends at ``2^(l+1)`` times the previous end."""
    out = [1]
    ell = 1
    while out[-1] <= horizon:
        out.append(out[-1] << (ell + 1))
        ell += 1
    return out


def _phase_blocks(part: int) -> Iterator[tuple[int, int]]:
    prev, end, ell = 0, 1, 0
    while True:
        if ell % 2 == part:
            yield prev + 1, end
        prev, end = end, end << (ell + 2)
        ell += 1


def phase_part(part: int, horizon: int = DEFAULT_HORIZON) -> BlockUnion:
    """Even (part 0) or odd (part 1) phases of the shared super-geometric partition."""
    if part not in (0, 1):
        raise ValueError("part is 0 or 1")
    return BlockUnion(
        lambda: _phase_blocks(part),
        tag="phases",
        params={"part": part},
        stored_checkpoints=tuple(b for b in phase_boundaries(horizon) if b <= horizon),
        family=("phases", (), part),
    )


def split_densityless(A: IndexSet, horizon: int = DEFAULT_HORIZON) -> tuple[IndexSet, IndexSet]:
    """Split a set with positive exact density into two disjoint parts without density.

    The parts collect the elements of ``A`` lying in alternate phases of a
    partition whose phase lengths grow super-geometrically, so each part's
    counting ratio swings between near 0 and near ``d(A)``.
    """
    d = A.exact_density()
    if d is None or d == 0:
        raise UnsupportedStructure(f"{A.describe()} has no positive exact density to split")
    return Intersection(A, phase_part(0, horizon)), Intersection(A, phase_part(1, horizon))


# -- serialization ------------------------------------------------------------


def _json_params(params: dict) -> dict:
    return {k: (qstr(v) if isinstance(v, Fraction) else v) for k, v in params.items()}


def profile_to_json(profile: Sequence[ProfilePoint]) -> list[dict]:
    return [{"n": p.n, "count": p.count, "ratio": qstr(p.ratio)} for p in profile]


def profile_to_csv(profile: Sequence[ProfilePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "count", "ratio_num", "ratio_den"])
    for p in profile:
        w.writerow([p.n, p.count, p.ratio.numerator, p.ratio.denominator])
    return buf.getvalue()


_PREDICATES = {"squares": squares, "powers_of_two": powers_of_two}


def from_json(data: dict) -> IndexSet:
    variant = data["variant"]
    if variant == "ArithmeticProgression":
        return ArithmeticProgression(data["first"], data["step"])
    if variant == "FiniteSet":
        return FiniteSet(tuple(data["elements"]))
    if variant == "Complement":
        return Complement(from_json(data["operand"]))
    if variant in ("Union", "Intersection", "Difference"):
        cls = {"Union": Union, "Intersection": Intersection, "Difference": Difference}[variant]
        left, right = (from_json(d) for d in data["operands"])
        return cls(left, right)
    if variant == "BlockUnion":
        params = data.get("params", {})
        horizon = max(data.get("checkpoints") or [DEFAULT_HORIZON])
        if data["tag"] == "densityless":
            return make_densityless(params["low"], params["high"], horizon)
        if data["tag"] == "phases":
            return phase_part(params["part"], horizon)
    if variant == "Predicate" and data["tag"] in _PREDICATES:
        return _PREDICATES[data["tag"]]()
    raise UnsupportedStructure(f"cannot rebuild {variant} from its description: {data}")
