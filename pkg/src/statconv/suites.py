"""Named verification suites with expected verdicts, and their reports."""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Callable

from . import constructions as C
from . import conv_modes as M
from . import index_sets as ix
from . import real_seq as R
from .core import (
    DEFAULT_MARGIN,
    DEFAULT_TOLERANCE,
    StatconvError,
    Verdict,
    jsonable,
    parse_q_list,
    q,
    qstr,
)
from .step_space import (
    IntervalSet,
    StepFn,
    indicator,
    integral,
    interval_indicator,
    rho,
    rho_objective,
    truncate,
    zero,
)

SCHEMA = 1
SUITES = ("steinhaus16", "strengthened23", "riesz35", "egorov36", "dominated37",
          "example21", "example24", "rho-metric", "extraction33")

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


class UnknownSuite(StatconvError, LookupError):
    pass


class ConfigError(StatconvError, ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    n_ladder: tuple[int, ...] = (2**8, 2**10, 2**12, 2**15)
    eps_ladder: tuple[Fraction, ...] = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))
    tolerance: Fraction = DEFAULT_TOLERANCE
    margin: Fraction = DEFAULT_MARGIN
    depth: int = M.DEFAULT_DEPTH
    lambda_budget: Fraction = Fraction(2, 5)
    budget: int = ix.DEFAULT_BUDGET
    seed: int = 0
    fuzz_count: int = 50
    random_pairs: int = 200

    def to_json(self) -> dict:
        return jsonable({f.name: getattr(self, f.name) for f in fields(self)})

    def replace(self, **changes) -> SuiteConfig:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        return SuiteConfig(**data)


_PARSERS: dict[str, Callable[[str], object]] = {
    "n_ladder": lambda s: tuple(int(v) for v in s.split(",") if v.strip()),
    "eps_ladder": lambda s: tuple(parse_q_list(s)),
    "tolerance": q,
    "margin": q,
    "depth": int,
    "lambda_budget": q,
    "budget": int,
    "seed": int,
    "fuzz_count": int,
    "random_pairs": int,
}


def parse_config(text: str, base: SuiteConfig | None = None) -> SuiteConfig:
    """``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    changes = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            changes[key] = _PARSERS[key](value)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    cfg = (base or SuiteConfig()).replace(**changes)
    validate_config(cfg)
    return cfg


def validate_config(cfg: SuiteConfig) -> None:
    try:
        R.as_ladder(cfg.eps_ladder)
        M.check_ladder(cfg.n_ladder)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not 0 < cfg.tolerance < cfg.margin <= 1:
        raise ConfigError("need 0 < tolerance < margin <= 1")
    if not 1 <= cfg.depth <= 16:
        raise ConfigError("depth must lie in 1..16")
    if not 0 < cfg.lambda_budget < 1:
        raise ConfigError("lambda_budget must lie in (0, 1)")
    if cfg.seed < 0 or cfg.seed >= 1 << 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if cfg.fuzz_count < 1 or cfg.random_pairs < 1 or cfg.budget < 1:
        raise ConfigError("counts and budgets must be positive")


@dataclass(frozen=True)
class Check:
    id: str
    anchor: str
    parameters: dict
    expected: object
    actual: object
    verdict: str

    def to_json(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "parameters": self.parameters,
                "expected": self.expected, "actual": self.actual, "verdict": self.verdict}


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    checks: tuple[Check, ...]
    passed: bool
    config: dict
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "suite": self.suite, "passed": self.passed, "config": self.config,
                "checks": [c.to_json() for c in self.checks], "notes": list(self.notes)}

    @classmethod
    def from_json(cls, data: dict) -> SuiteReport:
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        checks = tuple(Check(**c) for c in data["checks"])
        return cls(data["suite"], checks, data["passed"], data["config"], tuple(data.get("notes", ())))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.verdict == FAIL]


class _Recorder:
    def __init__(self):
        self.checks: list[Check] = []
        self.notes: list[str] = []

    def add(self, cid: str, anchor: str, parameters: dict, expected, actual, status: str | None = None):
        expected, actual = jsonable(expected), jsonable(actual)
        if status is None:
            if actual == expected:
                status = PASS
            elif actual == Verdict.INCONCLUSIVE.value:
                status = INCONCLUSIVE
            else:
                status = FAIL
        self.checks.append(Check(cid, anchor, jsonable(parameters), expected, actual, status))

    def fact(self, cid: str, anchor: str, parameters: dict, ok: bool, actual=None):
        """A boolean fact expected to be true."""
        self.add(cid, anchor, parameters, True, bool(ok) if actual is None else actual,
                 PASS if ok else FAIL)

    def guarded(self, cid: str, anchor: str, parameters: dict, expected, run: Callable[[], object]):
        """Run a check; an ``InconclusiveError`` or budget stop is recorded, never raised."""
        try:
            actual = run()
        except (M.InconclusiveError, M.BudgetExceeded) as exc:
            self.add(cid, anchor, parameters, expected, Verdict.INCONCLUSIVE.value, INCONCLUSIVE)
            self.notes.append(f"{cid}: {exc}")
            return None
        self.add(cid, anchor, parameters, expected, actual)
        return actual


# -- shared helpers ------------------------------------------------------------------------


def trace(seq: M.FnSeq, x, limit: StepFn | None = None) -> R.RealSeq:
    """The numeric sequence ``|f_k(x) - f(x)|``."""
    x = q(x)
    fx = limit(x) if limit is not None else Fraction(0)
    return R.RealSeq(lambda k: abs(seq(k)(x) - fx), "trace", {"seq": seq.tag, "x": x})


def random_step(rng: random.Random, depth: int = 4, lo: int = -16, hi: int = 16, den: int = 8) -> StepFn:
    """Step function with breakpoints on the depth-``depth`` dyadic grid and values in ``Z/den``."""
    scale = 1 << depth
    cuts = sorted(rng.sample(range(1, scale), rng.randint(0, min(4, scale - 1))))
    breaks = [Fraction(0)] + [Fraction(c, scale) for c in cuts] + [Fraction(1)]
    values = [Fraction(rng.randint(lo, hi), den) for _ in range(len(breaks) - 1)]
    return StepFn(breaks, values)


def grid_rho(f: StepFn, g: StepFn, step: Fraction = Fraction(1, 2**12)) -> Fraction:
    """Grid-search oracle for ``rho``: the objective sampled at ``v`` and ``v + step`` for each
    level ``v`` of ``|f - g|`` (and at ``step`` itself), with the right limit at ``v`` read off as
    ``objective(v + step) - step``. Exact once the levels are more than ``step`` apart."""
    h = f - g
    best = None
    for v in [Fraction(0), *h.levels()]:
        cands = [rho_objective(h, v + step) - step]
        if v > 0:
            cands.append(rho_objective(h, v))
        if v - step > 0:
            cands.append(rho_objective(h, v - step))
        m = min(cands)
        best = m if best is None else min(best, m)
    return best


# -- the implication-lattice fuzz --------------------------------------------------------

FUZZ_LADDER = (2**6, 2**8, 2**10)
FUZZ_FAMILIES = ("constant", "sparse_bump", "alternating", "sparse_swap", "odd_swap", "wrong_limit", "first_glitch")


def _fuzz_sequence(rng: random.Random, family: str) -> tuple[M.FnSeq, StepFn]:
    f = random_step(rng)
    g = random_step(rng)
    cells = [interval_indicator(Fraction(j, 16), Fraction(j + 1, 16)) for j in range(16)]
    height = Fraction(rng.randint(1, 16), 8)
    if family == "constant":
        return C.constant_seq(f), f
    if family == "sparse_bump":
        S = ix.squares()
        bumps = [f + c * height for c in cells]
        return M.FnSeq(lambda k: bumps[k % 16] if S.contains(k) else f, "fuzz_sparse_bump"), f
    if family == "alternating":
        return M.FnSeq(lambda k: f if k % 2 else g, "fuzz_alternating"), f
    if family == "sparse_swap":
        S = ix.powers_of_two()
        return M.FnSeq(lambda k: g if S.contains(k) else f, "fuzz_sparse_swap"), f
    if family == "odd_swap":
        period = rng.randint(2, 5)
        return M.FnSeq(lambda k: g if k % period == 0 else f, "fuzz_periodic_swap"), f
    if family == "first_glitch":
        return M.FnSeq(lambda k: g if k == 1 else f, "fuzz_first_glitch"), f
    return C.constant_seq(f), g


def lattice_violations(verdicts: dict[str, Verdict]) -> list[str]:
    """Implications between modes that a verdict combination contradicts."""
    bad = []
    if verdicts["st_ae"] is Verdict.HOLDS and verdicts["st_lambda"] is Verdict.FAILS:
        bad.append("st-a.e. holds but st-measure fails")
    if verdicts["in_measure"] is Verdict.HOLDS and verdicts["st_lambda"] is Verdict.FAILS:
        bad.append("in measure holds but st-measure fails")
    if verdicts["conv_ae"] is Verdict.HOLDS and verdicts["st_ae"] is Verdict.FAILS:
        bad.append("a.e. holds but st-a.e. fails")
    return bad


def lattice_fuzz(seed: int = 0, count: int = 50, ladder=FUZZ_LADDER) -> list[dict]:
    """Seeded sequences with breakpoints of depth at most 4, each run through four checkers."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        family = FUZZ_FAMILIES[i % len(FUZZ_FAMILIES)] if i < len(FUZZ_FAMILIES) else rng.choice(FUZZ_FAMILIES)
        seq, limit = _fuzz_sequence(rng, family)
        N = ladder[-1]
        eps = Fraction(1, 8)
        verdicts = {
            "in_measure": M.check_conv_in_measure(seq, limit, eps, N).verdict,
            "st_lambda": M.check_st_lambda(seq, limit, n_ladder=ladder).verdict,
            "st_ae": M.check_st_ae(seq, limit, n_ladder=ladder).verdict,
            "conv_ae": M.check_conv_ae(seq, limit, eps=eps, N=N).verdict,
        }
        out.append({"index": i, "family": family, "verdicts": verdicts,
                    "violations": lattice_violations(verdicts)})
    return out


# -- suites --------------------------------------------------------------------------------


def _steinhaus16(cfg: SuiteConfig, rec: _Recorder) -> None:
    tw = C.typewriter()
    f0 = zero()
    N = cfg.n_ladder[-1]
    st_ae = M.check_st_ae(tw, f0, eps_ladder=cfg.eps_ladder, n_ladder=cfg.n_ladder,
                          tolerance=cfg.tolerance, margin=cfg.margin)
    rec.add("st_ae_typewriter", "the typewriter sequence converges statistically a.e. to 0",
            {"samples": M.default_samples(), "n_ladder": cfg.n_ladder}, Verdict.HOLDS, st_ae.verdict)
    finals = [prof[-1][1] for prof in st_ae.profiles.values()]
    rec.fact("st_ae_final_means", "pointwise hit densities at the top of the ladder stay below tolerance",
             {"N": N, "tolerance": cfg.tolerance}, max(finals) <= cfg.tolerance, max(finals))
    st_l = M.check_st_lambda(tw, f0, cfg.eps_ladder, cfg.n_ladder, cfg.tolerance, cfg.margin)
    rec.add("st_lambda_typewriter", "statistical a.e. convergence implies statistical convergence in measure",
            {"n_ladder": cfg.n_ladder}, Verdict.HOLDS, st_l.verdict)
    conv_ae = M.check_conv_ae(tw, f0, N=N)
    rec.add("conv_ae_typewriter", "the typewriter sequence does not converge a.e.: every point is hit once per block",
            {"N": N}, Verdict.FAILS, conv_ae.verdict)
    every = all(p["verdict"] is Verdict.FAILS for p in conv_ae.params["per_sample"])
    rec.fact("conv_ae_every_sample", "every sample point is hit again in the second half of the indices",
             {"N": N}, every)
    meas = M.check_conv_in_measure(tw, f0, Fraction(1, 2), N, cfg.tolerance)
    rec.add("in_measure_typewriter", "the typewriter sequence converges in measure to 0",
            {"eps": Fraction(1, 2), "N": N}, Verdict.HOLDS, meas.verdict)
    runs = lattice_fuzz(cfg.seed, cfg.fuzz_count)
    bad = [r for r in runs if r["violations"]]
    rec.add("lattice_fuzz", "no verdict combination contradicts the implications between modes",
            {"seed": cfg.seed, "count": cfg.fuzz_count, "ladder": FUZZ_LADDER}, 0, len(bad),
            PASS if not bad else FAIL)
    for r in bad:
        rec.notes.append(f"lattice violation in fuzz sequence {r['index']} ({r['family']}): {r['violations']}")


def _strengthened23(cfg: SuiteConfig, rec: _Recorder) -> None:
    tw = C.typewriter()
    f0 = zero()
    N = cfg.n_ladder[-1]
    st_l = M.check_st_lambda(tw, f0, cfg.eps_ladder, cfg.n_ladder, cfg.tolerance, cfg.margin)
    rec.add("hypothesis_st_lambda", "the typewriter sequence converges statistically in measure",
            {"n_ladder": cfg.n_ladder}, Verdict.HOLDS, st_l.verdict)
    kinds = []
    for x in M.default_samples()[::4]:
        scan = R.measurability_scan(trace(tw, x), list(cfg.eps_ladder), cfg.n_ladder)
        kinds.extend(v.kind for _, v in scan)
    rec.fact("hypothesis_densities", "the sets {n : |f_n(x)| < eps_j} have densities at the samples",
             {"samples": M.default_samples()[::4], "eps": cfg.eps_ladder}, all(k == "Exists" for k in kinds),
             kinds)
    st_ae = M.check_st_ae(tw, f0, eps_ladder=cfg.eps_ladder, n_ladder=cfg.n_ladder,
                          tolerance=cfg.tolerance, margin=cfg.margin)
    rec.add("conclusion_st_ae", "with the density hypothesis, statistical convergence in measure gives st-a.e.",
            {"n_ladder": cfg.n_ladder}, Verdict.HOLDS, st_ae.verdict)

    # without the density hypothesis the conclusion can fail
    params, s24 = C.default_example24(5)
    x = Fraction(1, 3)
    oscill = (C.example24_running_density(params, x, 1, C.example24_checkpoint_for(params, x, 5))
              - C.example24_running_density(params, x, 1, params.m[5]))
    rec.fact("hypothesis_needed", "without pointwise densities the anchored sweep oscillates at 1/3",
             {"x": x, "blocks": 5}, oscill > Fraction(1, 6), oscill)

    # truncation g_M: Cesaro means of truncated terms recover the truncated limit pointwise
    Mcap = Fraction(1)
    f = StepFn([0, Fraction(1, 4), Fraction(3, 4), 1], [Fraction(-3), Fraction(1, 2), Fraction(2)])
    bumped = M.FnSeq(lambda k: f + tw(k), "typewriter_over_f")
    gM = truncate(f, Mcap)
    worst = Fraction(0)
    for x in M.default_samples():
        means, _ = M._cesaro(bumped, lambda fn, x=x: max(-Mcap, min(Mcap, fn(x))), [N])
        worst = max(worst, abs(means[-1] - gM(x)))
    rec.fact("truncation_cesaro", "Cesaro means of the truncated terms approach the truncated limit",
             {"M": Mcap, "N": N, "tolerance": cfg.tolerance}, worst <= cfg.tolerance, worst)


def _riesz35(cfg: SuiteConfig, rec: _Recorder) -> None:
    tw = C.typewriter()
    f0 = zero()
    held: dict = {}
    res = rec.guarded("blocks_extracted", "a density-one block subsequence converging in measure exists",
                      {"k_max": 8}, True,
                      lambda: held.setdefault("ext", M.extract_st_lambda_blocks(tw, f0, 8, cfg.budget)) is not None)
    if res:
        ext = held["ext"]
        ver = M.verify_st_lambda_blocks(ext, tw, f0)
        rec.fact("block_ratio", "each block is large relative to its maximum: |B_k|/max B_k > 1 - 1/k",
                 {"ends": ext.ends}, ver["ratio"] and ver["ordered"])
        rec.fact("block_measure", "every block member satisfies lambda(|f_n| >= 1/k) < 1/k",
                 {"k_max": 8}, ver["measure"])
        rec.fact("block_rho", "every block member is within 2/k of 0 in the metric rho", {"k_max": 8}, ver["rho"])
    cm = M.check_st_cauchy_measure(tw, Fraction(1, 2), Fraction(1, 8), cfg.n_ladder,
                                   tolerance=cfg.tolerance, margin=cfg.margin)
    rec.add("st_cauchy_measure", "a statistically Cauchy-in-measure sequence has a statistical limit in measure",
            {"eps": Fraction(1, 2), "delta": Fraction(1, 8), "n_ladder": cfg.n_ladder}, Verdict.HOLDS, cm.verdict)
    halves = C.alternating_halves()
    cm2 = M.check_st_cauchy_measure(halves, Fraction(1, 2), Fraction(1, 8), cfg.n_ladder[:3],
                                    tolerance=cfg.tolerance, margin=cfg.margin)
    rec.add("st_cauchy_measure_negative", "alternating half-interval indicators are not Cauchy in measure",
            {"eps": Fraction(1, 2), "delta": Fraction(1, 8)}, Verdict.FAILS, cm2.verdict)


def _egorov36(cfg: SuiteConfig, rec: _Recorder) -> None:
    Kp = ix.powers_of_two()
    for n in range(1, 13):
        m = C.example36_Cn(Kp, n).measure()
        bound = Fraction(n + 1, 2**n)
        ok = m <= bound and (n < 10 or m <= Fraction(1, 100))
        rec.fact(f"Cn_measure_{n:02d}", "the block unions C_n picked by a sparse index set are small",
                 {"n": n, "bound": bound}, ok, m)
    tw = C.typewriter()
    st_ae = M.check_st_ae(tw, zero(), eps_ladder=cfg.eps_ladder, n_ladder=cfg.n_ladder,
                          tolerance=cfg.tolerance, margin=cfg.margin)
    rec.add("st_ae_typewriter", "the typewriter sequence converges statistically a.e.",
            {"n_ladder": cfg.n_ladder}, Verdict.HOLDS, st_ae.verdict)
    blocks = [C.typewriter_block(n) for n in range(4, 13)]
    ref = M.au_block_refutation(tw, blocks, cfg.lambda_budget, cfg.depth)
    for row in ref:
        n = blocks.index(row["block"]) + 4
        rec.fact(f"block_refutation_{n:02d}",
                 "outside any small dyadic union, at least half of a block keeps sup 1",
                 {"block": row["block"], "lambda_budget": cfg.lambda_budget, "depth": cfg.depth},
                 row["at_least_half"], {"forced": row["forced"], "size": row["size"]})
    au = M.check_st_au_cauchy(tw, cfg.lambda_budget, cfg.eps_ladder, (2**8, 2**10, 2**12), cfg.depth,
                              tolerance=cfg.tolerance, margin=cfg.margin)
    rec.add("st_au_typewriter", "statistical a.e. convergence does not give statistical almost uniform convergence",
            {"lambda_budget": cfg.lambda_budget, "depth": cfg.depth}, Verdict.FAILS, au.verdict)


def _dominated37(cfg: SuiteConfig, rec: _Recorder) -> None:
    tw = C.typewriter()
    N = cfg.n_ladder[-1]
    v = M.st_dominated_integral_check(tw, zero(), StepFn.constant(1), cfg.n_ladder, cfg.tolerance, cfg.margin)
    rec.add("typewriter_integrals", "dominated terms converging statistically have integrals converging statistically",
            {"g": "1", "n_ladder": cfg.n_ladder}, Verdict.HOLDS, v.verdict)
    final = v.profiles["mean_plus"][-1][1]
    rec.fact("typewriter_integral_mean", "the Cesaro mean of the integrals is within tolerance of 0",
             {"N": N}, final <= cfg.tolerance, final)
    A = IntervalSet([(0, Fraction(1, 3))])
    chiA = indicator(A)
    s38 = C.example38(A, ~ix.squares())
    lad = (10**3, 10**4, 10**5)
    tol38 = Fraction(1, 100)
    v = M.st_dominated_integral_check(s38, chiA, chiA, lad, tol38, cfg.margin)
    rec.add("example38_integrals", "with g = chi_A the integrals converge statistically to lambda(A)",
            {"lambda_A": Fraction(1, 3), "K": "non-squares", "n_ladder": lad, "tolerance": tol38},
            Verdict.HOLDS, v.verdict)
    mean = v.profiles["mean_plus"][-1][1]
    rec.fact("example38_mean", "the Cesaro mean of the integrals is within 1/100 of 1/3",
             {"N": lad[-1]}, abs(mean - Fraction(1, 3)) <= tol38, mean)
    lim = M.check_integral_limit(s38, lad, cfg.tolerance, cfg.margin)
    rec.add("example38_ordinary_limit", "the integrals take both 0 and 1/3 beyond every N, so they do not converge",
            {"n_ladder": lad}, Verdict.FAILS, lim.verdict)
    rec.notes.append("the two displayed integral conclusions for the chi_A example contradict each other; "
                     "both the statistical check (Holds) and the ordinary check (Fails) are reported")


def _example21(cfg: SuiteConfig, rec: _Recorder) -> None:
    for n in range(1, 11):
        d = ix.exact_density(ix.dyadic_class(n))
        rec.add(f"density_A{n:02d}", "the class 2^(n-1) * odd has density 2^-n",
                {"n": n}, Fraction(1, 2**n), d)
    seq = R.example21_seq()
    lad = (4, 32, 512, 16384, 100000)
    expected = {Fraction(1, 2): "NotExists", Fraction(1, 3): "NotExists", Fraction(1, 4): "NotExists",
                Fraction(3, 5): "Exists", Fraction(2, 5): "Exists", Fraction(29, 100): "Exists"}
    for a, v in R.measurability_scan(seq, list(expected), lad):
        rec.add(f"level_set_{qstr(a).replace('/', '_')}",
                "level sets {a_l < a} lack a density exactly at the reciprocals 1/n",
                {"threshold": a, "n_ladder": lad}, expected[a], v.kind,
                INCONCLUSIVE if v.kind == "Inconclusive" else None)

    # the statistical limit whose level set at the limit has no density
    A = ix.make_densityless(Fraction(1, 3), Fraction(2, 3), 10**6)
    ell = Fraction(1, 2)
    lim = R.remark22_limit_seq(A, ell)
    lad_a = tuple(c for c in A.checkpoints if c >= 64)[-6:]
    rep = R.st_limit_check(lim, ell, cfg.eps_ladder, (2**8, 2**10, 2**12, 2**15), cfg.tolerance, cfg.margin)
    rec.add("st_limit_without_level_density", "a statistically convergent sequence may lack density at its limit",
            {"limit": ell}, Verdict.HOLDS, rep.verdict)
    kind = R.measurability_scan(lim, [ell], lad_a)[0][1].kind
    rec.add("level_density_at_limit", "the set {a_n < limit} has no density", {"n_ladder": lad_a}, "NotExists", kind)

    # signed sequence: not measurable, its absolute value is
    A1 = ix.make_densityless(Fraction(1, 4), Fraction(3, 4), 10**6)
    B1 = ~A1
    c = R.remark22_signed_seq(A1, B1)
    lad_c = tuple(x for x in A1.checkpoints if x >= 64)[-6:]
    rec.add("signed_not_measurable", "the signed sequence has no level-set density at 1/2",
            {"threshold": Fraction(1, 2)}, "NotExists", R.measurability_scan(c, [Fraction(1, 2)], lad_c)[0][1].kind)
    absc = c.abs()
    # |c_n| increases to 1, so {|c_n| < a} is finite for a <= 1 and cofinite for a > 1
    for tag, a, want in (("half", Fraction(1, 2), Fraction(0)), ("above_one", Fraction(3, 2), Fraction(1)),
                         ("negative", Fraction(-1), Fraction(0))):
        v = R.measurability_scan(absc, [a], lad_c)[0][1]
        rec.add(f"abs_measurable_{tag}", "the absolute values of the signed sequence are measurable",
                {"threshold": a}, ["Exists", want], [v.kind, v.value])
    rec.notes.append("the displayed densities for |c_n| (1 for a > 0) conflict with |c_n| increasing to 1; "
                     "the level-set densities are checked as 0 below 1 and 1 above it")

    # equivalences for numeric sequences
    K = R.extract_density1_subseq(lim, ell, k_max=6, budget=cfg.budget)
    ok = all(Fraction(K.count_upto(e), e) > 1 - Fraction(1, k) for k, e in enumerate(K.checkpoints, start=1))
    rec.fact("density1_subsequence", "a statistical limit is an ordinary limit along a density-one index set",
             {"k_max": 6, "ends": K.checkpoints}, ok)
    ca = R.st_cauchy_check(lim, Fraction(1, 8), (2**8, 2**10, 2**12, 2**15), tolerance=cfg.tolerance,
                           margin=cfg.margin)
    rec.add("st_cauchy", "statistical convergence is equivalent to being statistically Cauchy",
            {"eps": Fraction(1, 8)}, Verdict.HOLDS, ca.verdict)
    alt = R.st_cauchy_check(R.alternating(), Fraction(1), (2**8, 2**10, 2**12))
    rec.add("st_cauchy_negative", "(-1)^n is not statistically Cauchy", {"eps": 1}, Verdict.FAILS, alt.verdict)
    n = 10**4
    gap = abs(R.cesaro_mean(lim, n) - ell)
    bound = R.cesaro_gap_bound(lim, ell, Fraction(1, 100), n, 1)
    rec.fact("cesaro_forward", "for bounded sequences a statistical limit is the Cesaro limit",
             {"n": n}, gap <= bound, {"gap": gap, "bound": bound})
    h = R.harmonic()
    rep = R.st_limit_check(h, 0, cfg.eps_ladder, (2**8, 2**10, 2**12, 10**4), cfg.tolerance, cfg.margin)
    rec.add("cesaro_backward", "terms above a with Cesaro means tending to a converge statistically",
            {"seq": "1/n", "limit": 0}, Verdict.HOLDS, rep.verdict)


def _example24(cfg: SuiteConfig, rec: _Recorder) -> None:
    params, seq = C.default_example24(10)
    facts = params.check()
    rec.fact("anchor_inequalities", "the canonical anchors satisfy the three defining inequalities",
             {"blocks": params.n_max}, all(ok for _, _, ok in facts))
    x = Fraction(1, 3)
    for n in range(1, 6):
        hi = C.example24_running_density(params, x, 1, C.example24_checkpoint_for(params, x, n))
        lo = C.example24_running_density(params, x, 1, params.m[n])
        rec.fact(f"upper_density_{n}", "the running hit density at the block checkpoint exceeds 1/2",
                 {"x": x, "n": n}, hi > Fraction(1, 2), hi)
        rec.fact(f"lower_density_{n}", "the running hit density at the block end is below 1/3",
                 {"x": x, "n": n}, lo < Fraction(1, 3), lo)
    lad = sorted({C.example24_checkpoint_for(params, x, n) for n in range(1, 6)} | set(params.m[1:5]))
    st_ae = M.check_st_ae(seq, zero(), samples=[x], eps_ladder=(Fraction(1, 2),), n_ladder=lad,
                          tolerance=cfg.tolerance, margin=cfg.margin)
    rec.add("st_ae_fails", "convergence in measure does not imply st-a.e. convergence",
            {"x": x, "checkpoints": lad}, Verdict.FAILS, st_ae.verdict)
    for n in range(1, params.n_max + 1):
        lo, hi, _, _ = next(r for r in params.segments() if r[2] == n)
        m = M.diff_level_measure(seq(hi), zero(), Fraction(1, 2))
        rec.fact(f"sweep_measure_{n:02d}", "terms of block n are indicators of intervals of length 2^-n",
                 {"n": n}, m == Fraction(1, 2**n), m)
    top = params.n_max
    for label, N in (("first", params.k[top - 1][0]), ("last", params.k[top - 1][-1]), ("end", params.m[top])):
        v = M.check_conv_in_measure(seq, zero(), Fraction(1, 2), N, cfg.tolerance)
        rec.add(f"in_measure_{label}", "the anchored sweep converges in measure to 0",
                {"N": N, "eps": Fraction(1, 2), "tolerance": cfg.tolerance}, Verdict.HOLDS, v.verdict)


def _rho_metric(cfg: SuiteConfig, rec: _Recorder) -> None:
    rng = random.Random(cfg.seed)
    mismatches = 0
    for _ in range(cfg.random_pairs):
        f, g = random_step(rng, 6), random_step(rng, 6)
        if rho(f, g) != grid_rho(f, g):
            mismatches += 1
    rec.add("closed_form_vs_grid", "the closed form of rho equals a grid search over the candidate levels",
            {"pairs": cfg.random_pairs, "seed": cfg.seed, "step": Fraction(1, 2**12)}, 0, mismatches,
            PASS if mismatches == 0 else FAIL)
    bad = 0
    for _ in range(cfg.random_pairs):
        f, g, h = (random_step(rng, 6) for _ in range(3))
        if rho(f, h) > rho(f, g) + rho(g, h):
            bad += 1
    rec.add("triangle", "rho satisfies the triangle inequality", {"triples": cfg.random_pairs}, 0, bad,
            PASS if bad == 0 else FAIL)
    tw = C.typewriter()
    wrong = [k for k in range(1, 101) if rho(tw(k), zero()) != Fraction(1, 2 ** C.typewriter_index(k)[0])]
    rec.add("typewriter_rho", "rho(f_k, 0) equals the length of the k-th typewriter interval",
            {"k_max": 100}, [], wrong)
    dist = R.RealSeq(lambda k: rho(tw(k), zero()), "rho_typewriter")
    lad = (2**10, 2**12, 2**15)
    rep = R.st_limit_check(dist, 0, cfg.eps_ladder, lad, cfg.tolerance, cfg.margin)
    rec.add("metric_convergence", "convergence in measure is convergence in the metric rho",
            {"n_ladder": lad}, Verdict.HOLDS, rep.verdict)


def _extraction33(cfg: SuiteConfig, rec: _Recorder) -> None:
    seq = C.au_example()
    res = None
    try:
        res = M.extract_au_subsequence(seq, k_max=5, base_depth=cfg.depth)
    except M.InconclusiveError as exc:
        rec.add("induction", "an st-a.u.-Cauchy sequence is a.u.-Cauchy along a density-one index set",
                {"k_max": 5}, True, Verdict.INCONCLUSIVE.value, INCONCLUSIVE)
        rec.notes.append(f"induction stopped: {exc}")
    if res is not None:
        ver = M.verify_au_extraction(res, seq)
        labels = {
            "measure": "each exceptional union C_k has measure below 2^-k",
            "anchor_in_block": "each anchor n_k lies in B_k, beyond the previous threshold",
            "nested": "the index sets B_k are nested",
            "sup_in_block": "off C_k every member of B_k is within 1/k of the anchor",
            "density": "B_k has counting ratio above 1 - 1/(k+1) from its threshold on",
            "uniform": "off the union of later C_l, members of B beyond n_(k+1) are within 1/k of f_(n_k)",
        }
        for key, anchor in labels.items():
            rec.fact(f"condition_{key}", anchor, {"k_max": 5, "depth": cfg.depth}, all(ver[key]), ver[key])
        rec.add("uniform_from_anchor", "the same bound already holds from n_k on",
                {"k_max": 5}, True, all(ver["uniform_from_anchor"]),
                PASS if all(ver["uniform_from_anchor"]) else INCONCLUSIVE)
        S = ix.squares()
        hits = [n for n in res.B.elements if S.contains(n)]
        rec.add("avoids_disturbance", "the extracted index set avoids the disturbance set",
                {"S": "squares"}, [], hits)
    lad = (2**15, 2**18, 2**21)
    v = M.check_st_au_cauchy(seq, cfg.lambda_budget, cfg.eps_ladder, lad, cfg.depth,
                             tolerance=cfg.tolerance, margin=cfg.margin)
    rec.add("st_au_holds", "the disturbed indicators are statistically almost uniformly Cauchy",
            {"n_ladder": lad, "lambda_budget": cfg.lambda_budget}, Verdict.HOLDS, v.verdict)


_RUNNERS: dict[str, Callable[[SuiteConfig, _Recorder], None]] = {
    "steinhaus16": _steinhaus16,
    "strengthened23": _strengthened23,
    "riesz35": _riesz35,
    "egorov36": _egorov36,
    "dominated37": _dominated37,
    "example21": _example21,
    "example24": _example24,
    "rho-metric": _rho_metric,
    "extraction33": _extraction33,
}


def run_suite(name: str, config: SuiteConfig | None = None) -> SuiteReport:
    if name not in _RUNNERS:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    cfg = config or SuiteConfig()
    validate_config(cfg)
    rec = _Recorder()
    _RUNNERS[name](cfg, rec)
    checks = tuple(sorted(rec.checks, key=lambda c: c.id))
    passed = not any(c.verdict == FAIL for c in checks)
    return SuiteReport(name, checks, passed, cfg.to_json(), tuple(rec.notes))


# -- output --------------------------------------------------------------------------------

CSV_COLUMNS = ("suite", "id", "anchor", "parameters", "expected", "actual", "verdict")


def report_json(report: SuiteReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"


def report_csv(report: SuiteReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in report.checks:
        w.writerow([report.suite, c.id, c.anchor, json.dumps(c.parameters, sort_keys=True),
                    json.dumps(c.expected, sort_keys=True), json.dumps(c.actual, sort_keys=True), c.verdict])
    return buf.getvalue()


def emit_report(report: SuiteReport, fmt: str = "json", path=None) -> str:
    """Serialize, and write to ``path`` when given."""
    if fmt == "json":
        text = report_json(report)
    elif fmt == "csv":
        text = report_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return text
