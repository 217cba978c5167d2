"""Certificate-producing checkers for convergence modes of step-function sequences,
and the two subsequence extractions (density-one blocks in measure, and the
nested a.u.-Cauchy induction)."""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from . import index_sets as ix
from .core import (
    DEFAULT_MARGIN,
    DEFAULT_TOLERANCE,
    BudgetExceeded,
    InconclusiveError,
    StatconvError,
    Verdict,
    check_ladder,
    certify,
    combine,
    jsonable,
    last_half,
    non_increasing,
    q,
    tail_start,
)
from .real_seq import EpsilonLadder, as_ladder
from .step_space import (
    IntervalSet,
    StepFn,
    diff_level_measure,
    integral,
    level_measure,
    merged_pieces,
    pos_neg_parts,
    sup_outside,
)

DEFAULT_DEPTH = 6
POOL_BUDGET = 64
ZERO = Fraction(0)

Segment = tuple[int, int, StepFn]


class DominationError(StatconvError, ValueError):
    def __init__(self, message: str, k: int):
        super().__init__(message)
        self.k = k


class FnSeq:
    """Sequence ``k -> f_k`` of step functions, ``k >= 1``.

    ``segments(lo, hi)``, when given, yields maximal runs ``(a, b, f)`` with
    ``f_k = f`` for ``a <= k <= b``; checkers only ever walk segments, so
    sequences indexed far beyond the budget stay usable at their anchors.
    ``hit_counter(x, eps, f, points)`` may return closed-form counts of
    ``{k <= p : |f_k(x) - f(x)| >= eps}`` or ``None`` to decline.
    ``bad_runs(ref, eps, depth, lo, hi)`` may likewise return closed-form
    ``(a, b, bad_cells)`` runs for the a.u. searches.
    """

    def __init__(self, generator: Callable[[int], StepFn], tag: str = "custom", params: dict | None = None,
                 segments: Callable[[int, int], Iterator[Segment]] | None = None,
                 checkpoints: Sequence[int] = (), anchors: Sequence[int] = (),
                 null_points: Sequence = (), hit_counter=None, bad_runs=None, block_of: Callable[[int], tuple] | None = None,
                 budget: int = ix.DEFAULT_BUDGET):
        self._gen = functools.lru_cache(maxsize=1 << 16)(generator)
        self.tag = tag
        self.params = dict(params or {})
        self._segments = segments
        self.checkpoints = tuple(checkpoints)
        self.anchors = tuple(anchors)
        self.null_points = frozenset(q(x) for x in null_points)
        self.hit_counter = hit_counter
        self.bad_runs = bad_runs
        self.block_of = block_of
        self.budget = budget

    def __call__(self, k: int) -> StepFn:
        if k < 1:
            raise ValueError(f"sequences are indexed from 1, got {k}")
        return self._gen(k)

    def segments(self, lo: int, hi: int) -> Iterator[Segment]:
        if lo > hi:
            return iter(())
        if self._segments is not None:
            return self._segments(lo, hi)
        if hi > self.budget:
            raise BudgetExceeded(f"walking {self.tag} up to {hi} exceeds index budget {self.budget}")
        return ((k, k, self(k)) for k in range(lo, hi + 1))

    def recipe(self) -> dict:
        return {"tag": self.tag, "params": jsonable(self.params)}

    def __repr__(self) -> str:
        return f"FnSeq({self.tag})"


@dataclass(frozen=True)
class ModeVerdict:
    mode: str
    params: dict
    verdict: Verdict
    profiles: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"mode": self.mode, "params": jsonable(self.params), "verdict": self.verdict.value,
                "profiles": jsonable(self.profiles), "witness": jsonable(self.witness)}

    def profile_csv(self, key: str) -> str:
        lines = ["n,value_num,value_den"]
        for n, v in self.profiles[key]:
            v = Fraction(v)
            lines.append(f"{n},{v.numerator},{v.denominator}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ExtractionResult:
    B: ix.IndexSet
    blocks: tuple[tuple[int, ...], ...]
    ends: tuple[int, ...]
    exceptional: tuple[IntervalSet, ...] = ()
    anchors: tuple[int, ...] = ()
    thresholds: tuple[int, ...] = ()
    horizon: int | None = None
    certificate: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ends": list(self.ends), "block_sizes": [len(b) for b in self.blocks],
                "exceptional": [c.to_json() for c in self.exceptional], "anchors": list(self.anchors),
                "thresholds": list(self.thresholds), "horizon": self.horizon,
                "certificate": jsonable(self.certificate)}


# -- shared machinery -----------------------------------------------------------


def default_samples() -> list[Fraction]:
    """``(2i+1)/32`` for ``i = 0..15``."""
    return [Fraction(2 * i + 1, 32) for i in range(16)]


def _sums_at(seq: FnSeq, value: Callable[[StepFn], Fraction], points: Sequence[int]) -> dict[int, Fraction]:
    """``sum_{k <= p} value(f_k)`` for each of the sorted ``points``, segment by segment."""
    cache: dict[StepFn, Fraction] = {}
    out: dict[int, Fraction] = {}
    pts = sorted(set(points))
    i, total = 0, ZERO
    for a, b, fn in seq.segments(1, pts[-1]):
        v = cache.get(fn)
        if v is None:
            v = cache[fn] = Fraction(value(fn))
        while i < len(pts) and pts[i] <= b:
            out[pts[i]] = total + v * (pts[i] - a + 1)
            i += 1
        total += v * (b - a + 1)
    for p in pts[i:]:
        out[p] = total
    return out


def _cesaro(seq: FnSeq, value: Callable[[StepFn], Fraction], ladder: list[int]):
    """Running means at the ladder and the mean over the final quarter ``(3N/4, N]``."""
    n = ladder[-1]
    t = tail_start(n)
    sums = _sums_at(seq, value, ladder + ([t] if t >= 1 else []))
    means = [sums[m] / m for m in ladder]
    window = (sums[n] - sums.get(t, ZERO)) / (n - t)
    return means, window


def candidate_pool(seq: FnSeq, ladder: Sequence[int], budget: int = POOL_BUDGET) -> list[int]:
    """Anchors ``n0``: ladder points, their left neighbours and realized block anchors, largest first.

    The neighbours guard against a ladder that sits entirely inside a sparse
    disturbance set (powers of two are all squares of powers of two, say).
    """
    top = ladder[-1]
    pool = set(ladder) | {p - 1 for p in ladder if p > 1} | {a for a in seq.anchors if 1 <= a <= top}
    return sorted(pool, reverse=True)[:budget]


def _nudge(seq: FnSeq, x: Fraction) -> Fraction:
    if x not in seq.null_points:
        return x
    m = 10
    while x + Fraction(1, 1 << m) in seq.null_points or x + Fraction(1, 1 << m) >= 1:
        m += 1
    y = x + Fraction(1, 1 << m)
    warnings.warn(f"sample {x} lies in the declared null set of {seq.tag}; moved to {y}", stacklevel=3)
    return y


# -- classical and statistical modes ------------------------------------------------


def check_conv_in_measure(seq: FnSeq, f: StepFn, eps, N: int,
                          tolerance: Fraction = DEFAULT_TOLERANCE) -> ModeVerdict:
    """Holds when ``lambda(|f_k - f| >= eps) <= tolerance`` throughout ``(3N/4, N]``."""
    eps = q(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    t = tail_start(N)
    worst, worst_k = ZERO, None
    cache: dict[StepFn, Fraction] = {}
    for a, b, fn in seq.segments(t + 1, N):
        m = cache.get(fn)
        if m is None:
            m = cache[fn] = diff_level_measure(fn, f, eps)
        if worst_k is None or m > worst:
            worst, worst_k = m, a
    verdict = Verdict.HOLDS if worst <= tolerance else Verdict.FAILS
    return ModeVerdict("in_measure", {"eps": eps, "N": N, "tolerance": tolerance}, verdict,
                       witness={"k": worst_k, "measure": worst})


def check_st_lambda(seq: FnSeq, f: StepFn, eps_ladder=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)),
                    n_ladder: Sequence[int] = (2**8, 2**10, 2**12, 2**15),
                    tolerance: Fraction = DEFAULT_TOLERANCE, margin: Fraction = DEFAULT_MARGIN) -> ModeVerdict:
    """Running means of ``lambda(|f_k - f| >= eps_j)``; bounded terms make this the statistical test."""
    ladder = check_ladder(n_ladder)
    eps_ladder = as_ladder(eps_ladder)
    profiles, verdicts, witness = {}, [], {}
    for eps in eps_ladder:
        means, window = _cesaro(seq, lambda fn, e=eps: diff_level_measure(fn, f, e), ladder)
        v = certify(ladder, means, window, tolerance, margin)
        profiles[f"eps={eps}"] = list(zip(ladder, means))
        verdicts.append(v)
        if v is Verdict.FAILS and not witness:
            witness = {"eps": eps, "final_mean": means[-1], "window_mean": window}
    return ModeVerdict("st_lambda", {"eps": list(eps_ladder), "n_ladder": ladder, "tolerance": tolerance,
                                     "margin": margin}, combine(verdicts), profiles, witness)


def _pointwise_counts(seq: FnSeq, f: StepFn, samples: list[Fraction], eps_list: list[Fraction],
                      points: list[int]) -> dict[tuple[int, int], dict[int, int]]:
    """``{(sample_idx, eps_idx): {p: #{k <= p : |f_k(x) - f(x)| >= eps}}}``."""
    out: dict[tuple[int, int], dict[int, int]] = {}
    todo = []
    for i, x in enumerate(samples):
        for j, eps in enumerate(eps_list):
            counts = seq.hit_counter(x, eps, f, points) if seq.hit_counter else None
            if counts is None:
                todo.append((i, j))
            else:
                out[(i, j)] = dict(zip(points, counts))
    if not todo:
        return out
    fx = [f(x) for x in samples]
    cache: dict[StepFn, tuple] = {}
    totals = {key: 0 for key in todo}
    snaps = {key: {} for key in todo}
    pi = 0
    for a, b, fn in seq.segments(1, points[-1]):
        diffs = cache.get(fn)
        if diffs is None:
            diffs = cache[fn] = tuple(abs(fn(x) - v) for x, v in zip(samples, fx))
        while pi < len(points) and points[pi] <= b:
            p = points[pi]
            for i, j in todo:
                snaps[(i, j)][p] = totals[(i, j)] + ((p - a + 1) if diffs[i] >= eps_list[j] else 0)
            pi += 1
        span = b - a + 1
        for i, j in todo:
            if diffs[i] >= eps_list[j]:
                totals[(i, j)] += span
    out.update(snaps)
    return out


def check_st_ae(seq: FnSeq, f: StepFn, samples: Sequence | None = None,
                eps_ladder=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)),
                n_ladder: Sequence[int] = (2**8, 2**10, 2**12, 2**15),
                tolerance: Fraction = DEFAULT_TOLERANCE, margin: Fraction = DEFAULT_MARGIN) -> ModeVerdict:
    """Per sample point, running means of the hit indicators ``|f_k(x) - f(x)| >= eps_j``."""
    ladder = check_ladder(n_ladder)
    eps_list = list(as_ladder(eps_ladder))
    xs = [_nudge(seq, q(x)) for x in (default_samples() if samples is None else samples)]
    if any(not 0 <= x < 1 for x in xs):
        raise ValueError("samples must lie in [0,1)")
    n = ladder[-1]
    t = tail_start(n)
    points = sorted(set(ladder) | ({t} if t >= 1 else set()))
    counts = _pointwise_counts(seq, f, xs, eps_list, points)
    profiles, verdicts, witness, per_sample = {}, [], {}, []
    for i, x in enumerate(xs):
        for j, eps in enumerate(eps_list):
            c = counts[(i, j)]
            means = [Fraction(c[m], m) for m in ladder]
            window = Fraction(c[n] - c.get(t, 0), n - t)
            v = certify(ladder, means, window, tolerance, margin)
            verdicts.append(v)
            profiles[f"x={x},eps={eps}"] = list(zip(ladder, means))
            per_sample.append({"x": x, "eps": eps, "verdict": v, "final_mean": means[-1]})
            if v is Verdict.FAILS and not witness:
                witness = {"x": x, "eps": eps, "running_density": means[-1], "window_mean": window}
    return ModeVerdict("st_ae", {"samples": xs, "eps": eps_list, "n_ladder": ladder, "tolerance": tolerance,
                                 "margin": margin, "per_sample": per_sample},
                       combine(verdicts), profiles, witness)


def check_conv_ae(seq: FnSeq, f: StepFn, samples: Sequence | None = None, eps=Fraction(1, 2),
                  N: int = 2**15) -> ModeVerdict:
    """Classical pointwise test: Fails at ``x`` when some ``k`` in ``(N/2, N]`` has ``|f_k(x) - f(x)| >= eps``."""
    eps = q(eps)
    xs = [_nudge(seq, q(x)) for x in (default_samples() if samples is None else samples)]
    fx = [f(x) for x in xs]
    last_hit: list[int | None] = [None] * len(xs)
    for a, b, fn in seq.segments(N // 2 + 1, N):
        for i, x in enumerate(xs):
            if abs(fn(x) - fx[i]) >= eps:
                last_hit[i] = b
    per_sample = [{"x": x, "verdict": Verdict.HOLDS if h is None else Verdict.FAILS, "hit": h}
                  for x, h in zip(xs, last_hit)]
    verdict = combine(p["verdict"] for p in per_sample)
    witness = next(({"x": p["x"], "k": p["hit"]} for p in per_sample if p["hit"] is not None), {})
    return ModeVerdict("ae", {"eps": eps, "N": N, "per_sample": per_sample}, verdict, witness=witness)


def check_st_cauchy_measure(seq: FnSeq, eps, delta, n_ladder: Sequence[int] = (2**8, 2**10, 2**12, 2**15),
                            budget: int = POOL_BUDGET, tolerance: Fraction = DEFAULT_TOLERANCE,
                            margin: Fraction = DEFAULT_MARGIN) -> ModeVerdict:
    """Search ``n0`` with ``{n : lambda(|f_n - f_n0| >= eps) >= delta}`` of vanishing density."""
    eps, delta = q(eps), q(delta)
    if eps <= 0 or delta <= 0:
        raise ValueError("eps and delta must be positive")
    ladder = check_ladder(n_ladder)
    tried, outcomes = [], []
    for n0 in candidate_pool(seq, ladder, budget):
        g = seq(n0)
        means, window = _cesaro(seq, lambda fn: 1 if diff_level_measure(fn, g, eps) >= delta else 0, ladder)
        v = certify(ladder, means, window, tolerance, margin)
        tried.append(n0)
        outcomes.append(v)
        if v is Verdict.HOLDS:
            return ModeVerdict("st_cauchy_measure", {"eps": eps, "delta": delta, "n_ladder": ladder, "tried": tried},
                               v, {"n0": list(zip(ladder, means))}, {"n0": n0})
    verdict = Verdict.FAILS if outcomes and all(v is Verdict.FAILS for v in outcomes) else Verdict.INCONCLUSIVE
    return ModeVerdict("st_cauchy_measure", {"eps": eps, "delta": delta, "n_ladder": ladder, "tried": tried},
                       verdict, witness={"refuted": tried} if verdict is Verdict.FAILS else {})


# -- almost-uniform machinery ---------------------------------------------------------


def _floor_cell(x: Fraction, scale: int) -> int:
    return x.numerator * scale // x.denominator


def _ceil_cell(x: Fraction, scale: int) -> int:
    return -((-x.numerator * scale) // x.denominator)


def bad_cells(g: StepFn, h: StepFn, eps: Fraction, depth: int) -> tuple[int, ...]:
    """Depth-``depth`` dyadic cells meeting ``{|g - h| >= eps}`` in positive length."""
    scale = 1 << depth
    cells: list[int] = []
    for a, b, u, v in merged_pieces(g, h):
        if abs(u - v) >= eps:
            lo, hi = _floor_cell(a, scale), _ceil_cell(b, scale)
            if cells and cells[-1] >= lo:
                lo = cells[-1] + 1
            cells.extend(range(lo, hi))
    return tuple(cells)


def cells_to_intervals(cells: Sequence[int], depth: int) -> IntervalSet:
    scale = 1 << depth
    return IntervalSet((Fraction(c, scale), Fraction(c + 1, scale)) for c in cells)


def max_cells(lambda_budget: Fraction, depth: int) -> int:
    """Largest ``c`` with ``c / 2^depth < lambda_budget``."""
    return min(_ceil_cell(lambda_budget, 1 << depth) - 1, 1 << depth)


def cell_weights(bad_runs: Sequence[tuple[int, tuple[int, ...]]]) -> tuple[dict[int, Fraction], int]:
    """Fractional weights ``w(c) = sum 1/|bad(n)|`` over runs ``(multiplicity, bad)``; also the empty count."""
    w: dict[int, Fraction] = {}
    empty = 0
    for mult, bad in bad_runs:
        if not bad:
            empty += mult
            continue
        share = Fraction(mult, len(bad))
        for c in bad:
            w[c] = w.get(c, ZERO) + share
    return w, empty


def good_upper_bound(bad_runs, cmax: int) -> Fraction:
    """Upper bound, valid for every union ``D`` of at most ``cmax`` cells, on ``#{n : bad(n) within D}``.

    Two bounds, the smaller returned. Spreading one unit of mass evenly over
    the bad cells of each index shows the good count is at most the weight
    of the cells in ``D``. Charging each index to its least frequent bad cell
    instead works the same way and is sharper when many indices share cells.
    """
    w, empty = cell_weights(bad_runs)
    spread = empty + sum(sorted(w.values(), reverse=True)[:cmax], ZERO)
    freq: dict[int, int] = {}
    for mult, bad in bad_runs:
        for c in bad:
            freq[c] = freq.get(c, 0) + mult
    charge: dict[int, int] = {}
    for mult, bad in bad_runs:
        if bad:
            c = min(bad, key=lambda c: (freq[c], c))
            charge[c] = charge.get(c, 0) + mult
    single = empty + sum(sorted(charge.values(), reverse=True)[:cmax])
    return min(spread, Fraction(single))


def greedy_cover(bad_runs, cmax: int) -> tuple[int, ...]:
    w, _ = cell_weights(bad_runs)
    ranked = sorted(w.items(), key=lambda cw: (-cw[1], cw[0]))
    return tuple(sorted(c for c, _ in ranked[:cmax]))


def _bad_segments(seq: FnSeq, ref: StepFn, eps: Fraction, depth: int, top: int):
    if seq.bad_runs is not None:
        runs = seq.bad_runs(ref, eps, depth, 1, top)
        if runs is not None:
            return runs
    cache: dict[StepFn, tuple[int, ...]] = {}
    runs = []
    for a, b, fn in seq.segments(1, top):
        bad = cache.get(fn)
        if bad is None:
            bad = cache[fn] = bad_cells(fn, ref, eps, depth)
        runs.append((a, b, bad))
    return runs


def _clip_runs(runs, lo: int, hi: int):
    out = []
    for a, b, bad in runs:
        a2, b2 = max(a, lo), min(b, hi)
        if a2 <= b2:
            out.append((b2 - a2 + 1, bad))
    return out


def check_st_au_cauchy(seq: FnSeq, lambda_budget=Fraction(2, 5),
                       eps_ladder=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)),
                       n_ladder: Sequence[int] = (2**8, 2**10, 2**12), depth: int = DEFAULT_DEPTH,
                       budget: int = POOL_BUDGET, tolerance: Fraction = DEFAULT_TOLERANCE,
                       margin: Fraction = DEFAULT_MARGIN) -> ModeVerdict:
    """Search ``D`` (unions of depth-``depth`` dyadic cells, ``lambda(D) < lambda_budget``) and ``n0``
    with ``{n : sup_{x not in D} |f_n - f_n0| >= eps'}`` of vanishing density.

    Fails for an ``eps'`` only when every candidate ``n0`` is refuted for every
    ``D`` in the family at once, through the fractional cell-weight bound.
    """
    lambda_budget = q(lambda_budget)
    if not 0 < lambda_budget < 1:
        raise ValueError("lambda_budget must lie in (0, 1)")
    ladder = check_ladder(n_ladder)
    eps_list = list(as_ladder(eps_ladder))
    cmax = max_cells(lambda_budget, depth)
    n = ladder[-1]
    t = tail_start(n)
    points = sorted(set(ladder) | ({t} if t >= 1 else set()))
    pool = candidate_pool(seq, ladder, budget)
    verdicts, witness, profiles = [], {}, {}
    for eps in eps_list:
        refuted, found = [], None
        for n0 in pool:
            runs = _bad_segments(seq, seq(n0), eps, depth, n)
            D = greedy_cover(_clip_runs(runs, 1, n), cmax)
            Dset = set(D)
            counts, total, pi = {}, 0, 0
            for a, b, bad in runs:
                hit = any(c not in Dset for c in bad)
                while pi < len(points) and points[pi] <= b:
                    counts[points[pi]] = total + ((points[pi] - a + 1) if hit else 0)
                    pi += 1
                if hit:
                    total += b - a + 1
            means = [Fraction(counts[m], m) for m in ladder]
            window = Fraction(counts[n] - counts.get(t, 0), n - t)
            v = certify(ladder, means, window, tolerance, margin)
            if v is Verdict.HOLDS:
                found = (n0, cells_to_intervals(D, depth), means)
                break
            good_all = good_upper_bound(_clip_runs(runs, 1, n), cmax)
            good_win = good_upper_bound(_clip_runs(runs, t + 1, n), cmax)
            low_all = (n - good_all) / n
            low_win = (n - t - good_win) / (n - t)
            if low_all >= margin and low_win >= margin:
                refuted.append({"n0": n0, "exceptional_lower": low_all, "window_lower": low_win})
        if found:
            n0, Dint, means = found
            verdicts.append(Verdict.HOLDS)
            witness[f"eps={eps}"] = {"n0": n0, "D": Dint, "lambda_D": Dint.measure()}
            profiles[f"eps={eps}"] = list(zip(ladder, means))
        elif len(refuted) == len(pool):
            verdicts.append(Verdict.FAILS)
            witness[f"eps={eps}"] = {"refuted": refuted}
        else:
            verdicts.append(Verdict.INCONCLUSIVE)
    return ModeVerdict("st_au_cauchy", {"lambda_budget": lambda_budget, "eps": eps_list, "n_ladder": ladder,
                                        "depth": depth, "max_cells": cmax, "pool": pool},
                       combine(verdicts), profiles, witness)


def au_block_refutation(seq: FnSeq, blocks: Sequence[tuple[int, int]], lambda_budget=Fraction(2, 5),
                        depth: int = DEFAULT_DEPTH, f: StepFn | None = None, level=Fraction(1)) -> list[dict]:
    """For each index block, a bound valid for every ``D`` in the dyadic family with
    ``lambda(D) < lambda_budget``: at least ``forced`` indices have
    ``sup_{x not in D} |f_k - f| >= level``."""
    ref = f if f is not None else StepFn.constant(0)
    cmax = max_cells(q(lambda_budget), depth)
    out = []
    for lo, hi in blocks:
        runs = [(b - a + 1, bad_cells(fn, ref, q(level), depth)) for a, b, fn in seq.segments(lo, hi)]
        bound = good_upper_bound(runs, cmax)
        size = hi - lo + 1
        forced = size - bound
        out.append({"block": (lo, hi), "size": size, "good_bound": bound, "forced": forced,
                    "at_least_half": 2 * forced >= size})
    return out


# -- integrals -----------------------------------------------------------------------------


def _check_domination(seq: FnSeq, g: StepFn, top: int) -> None:
    seen = set()
    for a, b, fn in seq.segments(1, top):
        if fn in seen:
            continue
        seen.add(fn)
        slack = g - abs(fn)
        if min(slack.values) < 0:
            raise DominationError(f"|f_{a}| exceeds the dominating function", a)


def st_dominated_integral_check(seq: FnSeq, f: StepFn, g: StepFn,
                                n_ladder: Sequence[int] = (2**8, 2**10, 2**12, 2**15),
                                tolerance: Fraction = DEFAULT_TOLERANCE,
                                margin: Fraction = DEFAULT_MARGIN) -> ModeVerdict:
    """Running means of ``int f_k^+`` and ``int f_k^-`` against ``int f^+`` and ``int f^-``."""
    ladder = check_ladder(n_ladder)
    _check_domination(seq, g, ladder[-1])
    fp, fm = pos_neg_parts(f)
    verdicts, profiles, witness = [], {}, {}
    for name, pick, target in (("plus", 0, integral(fp)), ("minus", 1, integral(fm))):
        means, window = _cesaro(seq, lambda fn, i=pick: integral(pos_neg_parts(fn)[i]), ladder)
        gaps = [abs(m - target) for m in means]
        wgap = abs(window - target)
        v = certify(ladder, gaps, wgap, tolerance, margin)
        verdicts.append(v)
        profiles[f"mean_{name}"] = list(zip(ladder, means))
        profiles[f"gap_{name}"] = list(zip(ladder, gaps))
        if v is Verdict.FAILS and not witness:
            witness = {"part": name, "final_gap": gaps[-1], "window_gap": wgap}
    means_total = [a - b for (_, a), (_, b) in zip(profiles["mean_plus"], profiles["mean_minus"])]
    profiles["mean_integral"] = list(zip(ladder, means_total))
    return ModeVerdict("st_dominated_integral", {"n_ladder": ladder, "tolerance": tolerance, "margin": margin,
                                                 "target": integral(f)}, combine(verdicts), profiles, witness)


def check_integral_limit(seq: FnSeq, n_ladder: Sequence[int] = (2**8, 2**10, 2**12, 2**15),
                         tolerance: Fraction = DEFAULT_TOLERANCE, margin: Fraction = DEFAULT_MARGIN) -> ModeVerdict:
    """Ordinary convergence of ``int f_k``: spread of the integrals over ``(N/2, N]`` at each ladder point."""
    ladder = check_ladder(n_ladder)
    spreads, extremes = [], []
    for N in ladder:
        lo_v = hi_v = None
        lo_k = hi_k = None
        cache: dict[StepFn, Fraction] = {}
        for a, b, fn in seq.segments(N // 2 + 1, N):
            v = cache.get(fn)
            if v is None:
                v = cache[fn] = integral(fn)
            if lo_v is None or v < lo_v:
                lo_v, lo_k = v, a
            if hi_v is None or v > hi_v:
                hi_v, hi_k = v, a
        spreads.append(hi_v - lo_v)
        extremes.append({"N": N, "min": lo_v, "at": lo_k, "max": hi_v, "at_max": hi_k})
    if spreads[-1] <= tolerance and non_increasing(last_half(spreads)):
        verdict = Verdict.HOLDS
    elif all(s >= margin for s in last_half(spreads)):
        verdict = Verdict.FAILS
    else:
        verdict = Verdict.INCONCLUSIVE
    return ModeVerdict("integral_limit", {"n_ladder": ladder}, verdict, {"spread": list(zip(ladder, spreads))},
                       {"windows": extremes} if verdict is Verdict.FAILS else {})


# -- extractions -----------------------------------------------------------------------------


def extract_st_lambda_blocks(seq: FnSeq, f: StepFn, k_max: int = 8, budget: int = ix.DEFAULT_BUDGET) -> ExtractionResult:
    """Blocks ``B_k`` after the previous block's end with ``lambda(|f_n - f| >= 1/k) < 1/k``, each closed
    at the first member ``e`` where ``|B_k| / e > 1 - 1/k``."""
    blocks, ends = [], []
    prev = 0
    cache: dict[tuple[StepFn, int], Fraction] = {}
    for k in range(1, k_max + 1):
        tol = Fraction(1, k)
        members: list[int] = []
        n = prev
        end = None
        while n < budget:
            n += 1
            fn = seq(n)
            key = (fn, k)
            m = cache.get(key)
            if m is None:
                m = cache[key] = diff_level_measure(fn, f, tol)
            if m < tol:
                members.append(n)
                if Fraction(len(members), n) > 1 - tol:
                    end = n
                    break
        if end is None:
            raise InconclusiveError(f"block {k} did not close within index budget {budget}", k)
        blocks.append(tuple(members))
        ends.append(end)
        prev = end
    B = ix.FiniteSet(tuple(e for blk in blocks for e in blk))
    return ExtractionResult(B, tuple(blocks), tuple(ends), horizon=ends[-1])


def verify_st_lambda_blocks(result: ExtractionResult, seq: FnSeq, f: StepFn) -> dict:
    """Re-check both block inequalities and the metric bound from the blocks alone."""
    from .step_space import rho

    ok_measure = ok_ratio = ok_rho = ok_order = True
    prev_max = 0
    for k, blk in enumerate(result.blocks, start=1):
        tol = Fraction(1, k)
        ok_order &= bool(blk) and blk[0] > prev_max
        prev_max = blk[-1] if blk else prev_max
        ok_ratio &= Fraction(len(blk), blk[-1]) > 1 - tol
        for n in blk:
            h = seq(n) - f
            ok_measure &= level_measure(h, tol) < tol
            ok_rho &= rho(seq(n), f) <= 2 * tol
    return {"ordered": ok_order, "measure": ok_measure, "ratio": ok_ratio, "rho": ok_rho}


def _au_level(seq: FnSeq, members: list[int], n_k: int, k: int, depth: int, horizon: int):
    eps = Fraction(1, k)
    ref = seq(n_k)
    cache: dict[StepFn, tuple[int, ...]] = {}
    bads = []
    for n in members:
        fn = seq(n)
        bad = cache.get(fn)
        if bad is None:
            bad = cache[fn] = bad_cells(fn, ref, eps, depth)
        bads.append(bad)
    cmax = (1 << (depth - k)) - 1
    D = greedy_cover([(1, b) for b in bads], cmax)
    Dset = set(D)
    kept = [n for n, bad in zip(members, bads) if all(c in Dset for c in bad)]
    return kept, D


def _density_threshold(kept: list[int], after: int, k: int, horizon: int) -> int | None:
    """Smallest ``m`` in ``kept`` beyond ``after`` with ``|kept ∩ [1,n]| / n > 1 - 1/(k+1)`` for all ``n`` in ``[m, horizon]``."""
    floor = 1 - Fraction(1, k + 1)
    mask = bytearray(horizon + 1)
    for n in kept:
        mask[n] = 1
    count, last_bad = 0, 0
    for n in range(1, horizon + 1):
        count += mask[n]
        if not Fraction(count, n) > floor:
            last_bad = n
    start = max(after, last_bad)
    import bisect

    i = bisect.bisect_right(kept, start)
    return kept[i] if i < len(kept) else None


def extract_au_subsequence(seq: FnSeq, k_max: int = 5, horizon: int = 2**12, base_depth: int = DEFAULT_DEPTH,
                           candidates: int = 12) -> ExtractionResult:
    """Replay of the nested a.u.-Cauchy induction up to ``horizon``.

    Level ``k`` picks an anchor ``n_k`` in ``B_{k-1}`` beyond ``n'_k``, a union
    ``C_k`` of depth ``base_depth + k`` dyadic cells with ``lambda(C_k) < 2^-k``
    (greedy on fractional cell weights), keeps
    ``B_k = {n in B_{k-1} : sup_{x not in C_k} |f_n - f_{n_k}| < 1/k}`` and
    records the threshold ``n'_{k+1}`` past which ``B_k`` has counting ratio
    above ``1 - 1/(k+1)``. Levels run to ``k_max + 1`` so the assembled set
    ``B`` can use ``n_{k+2}`` for every ``k < k_max``.
    """
    members = list(range(1, horizon + 1))
    anchors, thresholds, Cs, Bs, depths = [], [], [], [], []
    after = 0
    for k in range(1, k_max + 2):
        depth = base_depth + k
        tried, chosen = [], None
        target = after + 1
        import bisect

        while len(tried) < candidates and target <= horizon // 2:
            i = bisect.bisect_left(members, target)
            if i >= len(members):
                break
            n_k = members[i]
            if n_k not in tried:
                tried.append(n_k)
                kept, D = _au_level(seq, members, n_k, k, depth, horizon)
                nxt = _density_threshold(kept, n_k, k, horizon)
                if nxt is not None and nxt <= horizon // 2:
                    chosen = (n_k, kept, D, nxt)
                    break
            target = 2 * max(target, n_k) + 1
        if chosen is None:
            raise InconclusiveError(f"level {k}: no anchor among {tried} gives a density-one B_{k}", k)
        n_k, kept, D, nxt = chosen
        anchors.append(n_k)
        thresholds.append(nxt)
        Cs.append(cells_to_intervals(D, depth))
        Bs.append(tuple(kept))
        depths.append(depth)
        members = kept
        after = nxt
    pieces = set()
    for j in range(1, k_max):
        pieces.update(n for n in Bs[j - 1] if n <= anchors[j + 1])
    pieces.update(Bs[k_max - 1])
    B = ix.FiniteSet(tuple(pieces))
    result = ExtractionResult(B, tuple(Bs), tuple(thresholds), tuple(Cs), tuple(anchors), tuple(thresholds),
                              horizon, {"depths": depths, "k_max": k_max})
    return result


def verify_au_extraction(result: ExtractionResult, seq: FnSeq, samples_per_level: int = 64) -> dict:
    """Exact re-check of the induction's four conditions and of the uniform-Cauchy certificate on ``B``."""
    H = result.horizon
    k_max = result.certificate["k_max"]
    Bs, Cs, ns, nps = result.blocks, result.exceptional, result.anchors, result.thresholds
    out = {"measure": [], "anchor_in_block": [], "nested": [], "sup_in_block": [], "density": [], "uniform": [],
           "uniform_from_anchor": []}
    prev: frozenset[int] | None = None
    for idx, (B_k, C_k, n_k, thr) in enumerate(zip(Bs, Cs, ns, nps)):
        k = idx + 1
        Bset = frozenset(B_k)
        out["measure"].append(C_k.measure() < Fraction(1, 2**k))
        out["anchor_in_block"].append(n_k in Bset and (prev is None or n_k in prev)
                                      and (idx == 0 or n_k > nps[idx - 1]))
        out["nested"].append(prev is None or Bset <= prev)
        step = max(1, len(B_k) // samples_per_level)
        ref = seq(n_k)
        out["sup_in_block"].append(all(sup_outside(seq(n) - ref, C_k) < Fraction(1, k) for n in B_k[::step]))
        floor = 1 - Fraction(1, k + 1)
        count = sum(1 for n in B_k if n < thr)
        ok = True
        for n in range(thr, H + 1):
            if n in Bset:
                count += 1
            ok &= Fraction(count, n) > floor
        out["density"].append(ok)
        prev = Bset
    Bsorted = sorted(result.B.elements)
    for k in range(1, k_max + 1):
        D = Cs[k - 1]
        for C in Cs[k:]:
            D = D | C
        ref = seq(ns[k - 1])
        beyond_next = [n for n in Bsorted if n >= ns[k]]
        beyond = [n for n in Bsorted if n >= ns[k - 1]]
        step1 = max(1, len(beyond_next) // samples_per_level)
        step2 = max(1, len(beyond) // samples_per_level)
        out["uniform"].append(all(sup_outside(seq(n) - ref, D) < Fraction(1, k) for n in beyond_next[::step1]))
        out["uniform_from_anchor"].append(all(sup_outside(seq(n) - ref, D) < Fraction(1, k) for n in beyond[::step2]))
    return out
