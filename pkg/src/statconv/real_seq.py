"""Statistical limits, statistical Cauchyness, Cesaro means and measurability scans
for sequences of exact rationals, plus the real-sequence constructions."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import index_sets as ix
from . import kernels
from .core import (
    DEFAULT_MARGIN,
    DEFAULT_TOLERANCE,
    InconclusiveError,
    StatconvError,
    Verdict,
    check_ladder,
    combine,
    certify,
    exact_sum,
    q,
    qstr,
    tail_start,
)

DEFAULT_N_LADDER = (2**8, 2**10, 2**12, 2**15)
DEFAULT_EPS = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))
CAUCHY_POOL_BUDGET = 64


class PartitionError(StatconvError, ValueError):
    pass


class RealSeq:
    """A deterministic map ``n -> a_n`` (n >= 1) into the rationals.

    Values are memoised behind a lock; the memo only ever holds values the
    rule produced, so concurrent callers see identical results.
    """

    def __init__(self, rule: Callable[[int], Fraction], tag: str = "custom", params: dict | None = None,
                 checkpoints: Sequence[int] = (), bulk: Callable[[int], list[Fraction]] | None = None):
        self.rule = rule
        self.tag = tag
        self.params = dict(params or {})
        self.checkpoints = tuple(checkpoints)
        self._bulk = bulk
        self._memo: list[Fraction] = []
        self._lock = threading.Lock()

    def __call__(self, n: int) -> Fraction:
        if n < 1:
            raise ValueError(f"sequences are indexed from 1, got {n}")
        memo = self._memo
        if n <= len(memo):
            return memo[n - 1]
        return Fraction(self.rule(n))

    def values(self, n: int) -> list[Fraction]:
        """``[a_1, ..., a_n]``."""
        with self._lock:
            have = len(self._memo)
            if n > have:
                if self._bulk is not None:
                    fresh = self._bulk(n)[have:]
                else:
                    fresh = [Fraction(self.rule(k)) for k in range(have + 1, n + 1)]
                self._memo = self._memo + fresh
            return self._memo[:n]

    def map(self, fn: Callable[[Fraction], Fraction], tag: str) -> RealSeq:
        return RealSeq(lambda n: fn(self(n)), tag, {"of": self.tag}, self.checkpoints)

    def abs(self) -> RealSeq:
        return self.map(abs, f"abs({self.tag})")

    def recipe(self) -> dict:
        return {"tag": self.tag, "params": {k: (qstr(v) if isinstance(v, Fraction) else v)
                                            for k, v in self.params.items()}}

    def __repr__(self) -> str:
        return f"RealSeq({self.tag})"


@dataclass(frozen=True)
class EpsilonLadder:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(q(v) for v in self.values)
        if not vals:
            raise ValueError("epsilon ladder is empty")
        if any(v <= 0 for v in vals) or any(b >= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"epsilons must be positive and strictly decreasing: {vals}")
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def as_ladder(eps) -> EpsilonLadder:
    return eps if isinstance(eps, EpsilonLadder) else EpsilonLadder(tuple(eps))


@dataclass(frozen=True)
class EpsilonReport:
    eps: Fraction
    profile: tuple[ix.ProfilePoint, ...]
    window_ratio: Fraction
    verdict: Verdict

    def to_json(self) -> dict:
        return {"eps": qstr(self.eps), "profile": ix.profile_to_json(self.profile),
                "window_ratio": qstr(self.window_ratio), "verdict": self.verdict.value}


@dataclass(frozen=True)
class StLimitReport:
    limit: Fraction
    entries: tuple[EpsilonReport, ...]
    verdict: Verdict

    def to_json(self) -> dict:
        return {"limit": qstr(self.limit), "verdict": self.verdict.value,
                "entries": [e.to_json() for e in self.entries]}


# -- basic sequences ----------------------------------------------------------


def constant(c) -> RealSeq:
    c = q(c)
    return RealSeq(lambda n: c, "constant", {"c": c})


def harmonic() -> RealSeq:
    return RealSeq(lambda n: Fraction(1, n), "harmonic")


def alternating() -> RealSeq:
    return RealSeq(lambda n: Fraction(-1 if n % 2 else 1), "alternating")


def indicator_seq(A: ix.IndexSet) -> RealSeq:
    return RealSeq(lambda n: Fraction(1 if A.contains(n) else 0), "indicator", {"set": A.describe()},
                   A.checkpoints)


# -- operations ---------------------------------------------------------------


def exceptional_set(seq: RealSeq, a, eps) -> ix.Predicate:
    """``{n : |a_n - a| >= eps}``."""
    a, eps = q(a), q(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return ix.Predicate(lambda n: abs(seq(n) - a) >= eps, "exceptional",
                        {"seq": seq.tag, "center": a, "eps": eps}, stored_checkpoints=seq.checkpoints)


def _profile_with_window(A: ix.IndexSet, ladder: list[int]) -> tuple[list[ix.ProfilePoint], Fraction]:
    n = ladder[-1]
    t = tail_start(n)
    points = sorted(set(ladder) | ({t} if t >= 1 else set()))
    counts = dict(zip(points, A.count_many(points)))
    profile = [ix.ProfilePoint(m, counts[m], Fraction(counts[m], m)) for m in ladder]
    window = Fraction(counts[n] - counts.get(t, 0), n - t)
    return profile, window


def _center_report(seq: RealSeq, center: Fraction, eps_ladder: EpsilonLadder, ladder: list[int],
                   tolerance: Fraction, margin: Fraction) -> StLimitReport:
    seq.values(ladder[-1])
    entries = []
    for eps in eps_ladder:
        profile, window = _profile_with_window(exceptional_set(seq, center, eps), ladder)
        verdict = certify(ladder, [p.ratio for p in profile], window, tolerance, margin)
        entries.append(EpsilonReport(eps, tuple(profile), window, verdict))
    return StLimitReport(center, tuple(entries), combine(e.verdict for e in entries))


def st_limit_check(seq: RealSeq, a, eps_ladder=DEFAULT_EPS, n_ladder: Sequence[int] = DEFAULT_N_LADDER,
                   tolerance: Fraction = DEFAULT_TOLERANCE, margin: Fraction = DEFAULT_MARGIN) -> StLimitReport:
    """Certificate that ``a_n -> a`` statistically, one density profile per epsilon."""
    return _center_report(seq, q(a), as_ladder(eps_ladder), check_ladder(n_ladder), tolerance, margin)


@dataclass(frozen=True)
class CauchyReport:
    eps: Fraction
    verdict: Verdict
    anchor: int | None
    tried: tuple[int, ...]
    report: StLimitReport | None

    def to_json(self) -> dict:
        return {"eps": qstr(self.eps), "verdict": self.verdict.value, "anchor": self.anchor,
                "tried": list(self.tried), "report": self.report.to_json() if self.report else None}


def cauchy_pool(n_ladder: Sequence[int], budget: int = CAUCHY_POOL_BUDGET) -> list[int]:
    """Candidate anchors: ladder points plus powers of two below the top, largest first."""
    top = n_ladder[-1]
    pool = set(n_ladder)
    p = 1
    while p <= top:
        pool.add(p)
        p *= 2
    return sorted(pool, reverse=True)[:budget]


def st_cauchy_check(seq: RealSeq, eps, n_ladder: Sequence[int] = DEFAULT_N_LADDER,
                    budget: int = CAUCHY_POOL_BUDGET, tolerance: Fraction = DEFAULT_TOLERANCE,
                    margin: Fraction = DEFAULT_MARGIN) -> CauchyReport:
    """Search an anchor ``n0`` whose ``eps``-exceptional set has vanishing density.

    Fails only when every candidate anchor is refuted; an exhausted pool with
    mixed evidence is Inconclusive.
    """
    eps = q(eps)
    ladder = check_ladder(n_ladder)
    seq.values(ladder[-1])
    tried, verdicts, last = [], [], None
    for n0 in cauchy_pool(ladder, budget):
        rep = _center_report(seq, seq(n0), EpsilonLadder((eps,)), ladder, tolerance, margin)
        tried.append(n0)
        verdicts.append(rep.verdict)
        last = rep
        if rep.verdict is Verdict.HOLDS:
            return CauchyReport(eps, Verdict.HOLDS, n0, tuple(tried), rep)
    verdict = Verdict.FAILS if verdicts and all(v is Verdict.FAILS for v in verdicts) else Verdict.INCONCLUSIVE
    return CauchyReport(eps, verdict, None, tuple(tried), last)


def cesaro_mean(seq: RealSeq, n: int) -> Fraction:
    if n < 1:
        raise ValueError("n >= 1")
    return exact_sum(seq.values(n)) / n


def cesaro_gap_bound(seq: RealSeq, a, eps, n: int, bound) -> Fraction:
    """Upper bound on ``|cesaro_mean(seq, n) - a|`` from the exceptional-set count.

    With ``|a_k - a| <= bound`` for all k: the gap is at most
    ``eps + bound * |{k <= n : |a_k - a| >= eps}| / n``.
    """
    a, eps, bound = q(a), q(eps), q(bound)
    return eps + bound * Fraction(exceptional_set(seq, a, eps).count_upto(n), n)


def extract_density1_subseq(seq: RealSeq, a, k_max: int = 8, budget: int = ix.DEFAULT_BUDGET) -> ix.Predicate:
    """Index set ``K`` of density one along which ``a_n -> a``.

    Block ``k`` collects ``n`` after the previous block end with
    ``|a_n - a| < 1/k``; it closes at the first such ``n`` where the block's
    size exceeds ``(1 - 1/k) * n``. Beyond the last block the tolerance
    ``1/k_max`` is kept. Block ends are the checkpoints of ``K``.
    """
    a = q(a)
    ends: list[int] = []
    prev = 0
    for k in range(1, k_max + 1):
        tol = Fraction(1, k)
        size = 0
        n = prev
        end = None
        while n < budget:
            n += 1
            if abs(seq(n) - a) < tol:
                size += 1
                if Fraction(size, n) > 1 - tol:
                    end = n
                    break
        if end is None:
            raise InconclusiveError(f"block {k} did not close within index budget {budget}", k)
        ends.append(end)
        prev = end
    ends_t = tuple(ends)

    def member(n: int) -> bool:
        import bisect

        k = min(bisect.bisect_left(ends_t, n) + 1, k_max)
        return abs(seq(n) - a) < Fraction(1, k)

    return ix.Predicate(member, "density1_subseq", {"seq": seq.tag, "limit": a, "k_max": k_max},
                        budget=budget, stored_checkpoints=ends_t)


def below_set(seq: RealSeq, a) -> ix.Predicate:
    """``{n : a_n < a}``, counted in bulk by the comparison kernel."""
    a = q(a)
    return ix.Predicate(lambda n: seq(n) < a, "below", {"seq": seq.tag, "threshold": a},
                        bulk_counter=lambda ladder: kernels.count_less(seq.values(ladder[-1]), a, ladder),
                        stored_checkpoints=seq.checkpoints)


def measurability_scan(seq: RealSeq, thresholds: Sequence, n_ladder: Sequence[int] | None = None,
                       exists_spread: Fraction = ix.EXISTS_SPREAD,
                       not_exists_spread: Fraction = ix.NOT_EXISTS_SPREAD) -> list[tuple[Fraction, ix.DensityVerdict]]:
    """Per-threshold density verdicts for ``{n : a_n < a}``.

    The ladder defaults to the sequence's own checkpoints. An empty threshold
    list gives an empty report.
    """
    if not thresholds:
        return []
    ladder = check_ladder(n_ladder if n_ladder is not None else seq.checkpoints)
    seq.values(ladder[-1])
    out = []
    for a in thresholds:
        a = q(a)
        profile = ix.density_profile(below_set(seq, a), ladder)
        out.append((a, ix.assess_profile(profile, exists_spread, not_exists_spread)))
    return out


def scan_to_json(scan: Sequence[tuple[Fraction, ix.DensityVerdict]]) -> list[dict]:
    out = []
    for a, v in scan:
        row = {"threshold": qstr(a), "profile": [{"n": p.n, "count": p.count} for p in v.profile],
               "verdict": v.kind}
        if v.value is not None:
            row["value"] = qstr(v.value)
        if v.kind == "NotExists":
            row["lower"], row["upper"] = qstr(v.lower), qstr(v.upper)
        out.append(row)
    return out


# -- constructions ------------------------------------------------------------


def _interp(n: int, r: int) -> Fraction:
    lo, hi = Fraction(1, n + 1), Fraction(1, n)
    return lo + (hi - lo) * Fraction(r, r + 1)


def example21_seq(horizon: int = ix.DEFAULT_HORIZON) -> RealSeq:
    """Sequence that is 1/n on the first half of the split of ``{2^(n-1) * odd}`` and
    rises from above 1/(n+1) towards 1/n on the second half.

    The split uses the shared phase partition, so every level's halves swing
    at the same checkpoints (the phase ends).
    """
    bounds = ix.phase_boundaries(horizon)
    odd_phase = ix.phase_part(1, horizon)

    def phase_parity(m: int) -> int:
        import bisect

        return bisect.bisect_left(bounds, m) % 2

    def rule(m: int) -> Fraction:
        n = ((m & -m).bit_length() - 1) + 1
        if phase_parity(m) == 0:
            return Fraction(1, n)
        rank = ix.Intersection(ix.dyadic_class(n), odd_phase).count_upto(m)
        return _interp(n, rank)

    def bulk(count: int) -> list[Fraction]:
        vals = kernels.two_adic_valuations(count)
        ranks: dict[int, int] = {}
        out = []
        for m in range(1, count + 1):
            n = vals[m - 1] + 1
            if phase_parity(m) == 0:
                out.append(Fraction(1, n))
            else:
                r = ranks.get(n, 0) + 1
                ranks[n] = r
                out.append(_interp(n, r))
        return out

    cps = tuple(b for b in bounds if b <= horizon)
    return RealSeq(rule, "example21", {"horizon": horizon}, cps, bulk)


def example21_parts(n: int, horizon: int = ix.DEFAULT_HORIZON) -> tuple[ix.IndexSet, ix.IndexSet]:
    """The two density-less halves of ``{2^(n-1) * odd}`` used by :func:`example21_seq`."""
    return ix.split_densityless(ix.dyadic_class(n), horizon)


def remark22_signed_seq(A: ix.IndexSet, B: ix.IndexSet, check_upto: int = 10**4) -> RealSeq:
    """``n/(n+1)`` on ``A`` and ``-n/(n+1)`` on ``B``; ``A`` and ``B`` must partition the naturals."""
    for n in range(1, check_upto + 1):
        if A.contains(n) == B.contains(n):
            raise PartitionError(f"index {n} is {'in both sets' if A.contains(n) else 'in neither set'}")

    def rule(n: int) -> Fraction:
        v = Fraction(n, n + 1)
        return v if A.contains(n) else -v

    return RealSeq(rule, "remark22_signed", {"A": A.describe(), "B": B.describe()},
                   ix._merge_checkpoints(A.checkpoints, B.checkpoints))


def remark22_limit_seq(A: ix.IndexSet, limit) -> RealSeq:
    """Equals ``limit`` on ``A`` and ``limit - 1/n`` elsewhere: a statistical limit whose
    level set ``{a_n < limit}`` need not have a density."""
    limit = q(limit)
    return RealSeq(lambda n: limit if A.contains(n) else limit - Fraction(1, n), "remark22_limit",
                   {"A": A.describe(), "limit": limit}, A.checkpoints)
