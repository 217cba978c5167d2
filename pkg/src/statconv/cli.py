"""``statconv`` command line: suites, density profiles, sequences, modes and constructions."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import constructions as C
from . import conv_modes as M
from . import index_sets as ix
from . import real_seq as R
from . import suites as S
from .core import StatconvError, jsonable, parse_q_list, q
from .step_space import IntervalSet, indicator, zero

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(StatconvError):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _rationals(text: str) -> list[Fraction]:
    try:
        return parse_q_list(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"expected comma-separated rationals like 1/2, got {text!r}") from exc


# -- argument grammars ------------------------------------------------------------------


def parse_set(spec: str) -> ix.IndexSet:
    """``ap:FIRST:STEP``, ``dyadic:N``, ``finite:1,2,3``, ``densityless:LOW:HIGH``, ``odds``,
    ``naturals``, ``squares``, ``powers_of_two``; a leading ``~`` takes the complement."""
    if spec.startswith("~"):
        return ~parse_set(spec[1:])
    name, _, rest = spec.partition(":")
    try:
        if name == "ap":
            first, step = rest.split(":")
            return ix.ArithmeticProgression(int(first), int(step))
        if name == "dyadic":
            return ix.dyadic_class(int(rest))
        if name == "finite":
            return ix.FiniteSet(tuple(_ints(rest)))
        if name == "densityless":
            low, high = rest.split(":")
            return ix.make_densityless(q(low), q(high))
        simple = {"odds": ix.odds, "naturals": ix.naturals, "squares": ix.squares,
                  "powers_of_two": ix.powers_of_two}
        if name in simple and not rest:
            return simple[name]()
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad set spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown set spec {spec!r}")


def parse_seq(spec: str) -> R.RealSeq:
    """``harmonic``, ``alternating``, ``constant:C``, ``example21``, ``remark22-limit``, ``remark22-signed``."""
    name, _, rest = spec.partition(":")
    if name == "harmonic":
        return R.harmonic()
    if name == "alternating":
        return R.alternating()
    if name == "constant":
        return R.constant(_rationals(rest)[0] if rest else 0)
    if name == "example21":
        return R.example21_seq()
    if name == "remark22-limit":
        return R.remark22_limit_seq(ix.make_densityless(Fraction(1, 3), Fraction(2, 3), 10**6), Fraction(1, 2))
    if name == "remark22-signed":
        A = ix.make_densityless(Fraction(1, 4), Fraction(3, 4), 10**6)
        return R.remark22_signed_seq(A, ~A)
    raise UsageError(f"unknown sequence {spec!r}")


def parse_construction(name: str):
    """``(seq, limit)`` for the named function sequence."""
    if name == "typewriter":
        return C.typewriter(), zero()
    if name == "example24":
        return C.default_example24(10)[1], zero()
    if name == "example38":
        A = IntervalSet([(0, Fraction(1, 3))])
        return C.example38(A, ~ix.squares()), indicator(A)
    if name == "au_example":
        return C.au_example(), zero()
    if name == "alternating_halves":
        return C.alternating_halves(), zero()
    raise UsageError(f"unknown construction {name!r}")


# -- subcommands --------------------------------------------------------------------------


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _dump(obj, fmt: str, rows: Sequence[Sequence] | None = None, header: Sequence[str] = ()) -> str:
    if fmt == "json":
        return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows or [])
    return buf.getvalue()


def cmd_suite(args) -> int:
    cfg = S.SuiteConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = S.parse_config(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror or exc}") from exc
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
        S.validate_config(cfg)
    report = S.run_suite(args.name, cfg)
    text = S.emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_density(args) -> int:
    A = parse_set(args.set)
    ladder = _ints(args.ladder) if args.ladder else list(A.checkpoints[-8:]) or [10, 100, 1000, 10**4]
    profile = ix.density_profile(A, M.check_ladder(ladder))
    verdict = ix.assess_profile(profile)
    exact = ix.exact_density(A)
    if args.format == "csv":
        text = ix.profile_to_csv(profile)
    else:
        text = _dump({"set": A.to_json(), "exact_density": exact, "verdict": verdict.to_json()}, "json")
    _write(text, args.out)
    return EXIT_OK


def cmd_seq(args) -> int:
    seq = parse_seq(args.seq)
    ladder = _ints(args.ladder) if args.ladder else list(R.DEFAULT_N_LADDER)
    out: dict = {"seq": seq.recipe()}
    rows = []
    if args.limit is not None:
        eps = _rationals(args.eps) if args.eps else list(R.DEFAULT_EPS)
        rep = R.st_limit_check(seq, q(args.limit), eps, ladder)
        out["limit"] = rep.to_json()
        for e in rep.entries:
            rows += [["limit", e.eps, p.n, p.count] for p in e.profile]
    if args.cauchy is not None:
        out["cauchy"] = R.st_cauchy_check(seq, q(args.cauchy), ladder).to_json()
    if args.scan is not None:
        scan = R.measurability_scan(seq, _rationals(args.scan), ladder)
        out["scan"] = R.scan_to_json(scan)
        for a, v in scan:
            rows += [["scan", a, p.n, p.count] for p in v.profile]
    if args.cesaro is not None:
        out["cesaro"] = {"n": args.cesaro, "mean": R.cesaro_mean(seq, args.cesaro)}
    _write(_dump(out, args.format, [[jsonable(c) for c in r] for r in rows], ("kind", "parameter", "n", "count")),
           args.out)
    return EXIT_OK


MODES = ("in_measure", "st_lambda", "st_ae", "ae", "st_cauchy_measure", "st_au_cauchy", "integrals",
         "integral_limit")


def cmd_modes(args) -> int:
    seq, f = parse_construction(args.construction)
    ladder = _ints(args.ladder) if args.ladder else [2**8, 2**10, 2**12]
    eps = _rationals(args.eps) if args.eps else [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    mode = args.mode
    if mode == "in_measure":
        v = M.check_conv_in_measure(seq, f, eps[0], ladder[-1])
    elif mode == "st_lambda":
        v = M.check_st_lambda(seq, f, eps, ladder)
    elif mode == "st_ae":
        samples = _rationals(args.samples) if args.samples else None
        v = M.check_st_ae(seq, f, samples, eps, ladder)
    elif mode == "ae":
        samples = _rationals(args.samples) if args.samples else None
        v = M.check_conv_ae(seq, f, samples, eps[0], ladder[-1])
    elif mode == "st_cauchy_measure":
        v = M.check_st_cauchy_measure(seq, eps[0], q(args.delta), ladder)
    elif mode == "st_au_cauchy":
        v = M.check_st_au_cauchy(seq, q(args.lambda_budget), eps, ladder, args.depth)
    elif mode == "integrals":
        v = M.st_dominated_integral_check(seq, f, indicator(IntervalSet([(0, 1)])), ladder)
    else:
        v = M.check_integral_limit(seq, ladder)
    rows = [[key, n, Fraction(val).numerator, Fraction(val).denominator]
            for key, prof in v.profiles.items() for n, val in prof]
    _write(_dump(v.to_json(), args.format, rows, ("profile", "n", "value_num", "value_den")), args.out)
    return EXIT_OK


def cmd_construct(args) -> int:
    name = args.name
    if name == "typewriter":
        ks = range(1, args.k + 1) if args.k else range(1, 15)
        rows = [C.describe_typewriter(k) for k in ks]
        out = {"construction": name, "terms": rows}
    elif name == "example24":
        params, _ = C.default_example24(args.depth)
        out = {"construction": name, "depth": args.depth,
               "checks": [{"block": n, "inequality": what, "holds": ok} for n, what, ok in params.check()]}
        if args.emit_anchors:
            out["anchors"] = params.to_json()
    elif name == "example36":
        n = args.n or 10
        Cn = C.example36_Cn(ix.powers_of_two(), n)
        out = {"construction": name, "n": n, "K": "powers_of_two", "C_n": Cn.to_json(), "measure": Cn.measure()}
    elif name == "example38":
        seq, f = parse_construction("example38")
        k = args.k or 10
        out = {"construction": name, "A": IntervalSet([(0, Fraction(1, 3))]).to_json(), "K": "non-squares",
               "terms": [{"k": i, "f": seq(i).to_json()} for i in range(1, k + 1)]}
    elif name == "au_example":
        seq = C.au_example()
        k = args.k or 10
        out = {"construction": name, "S": "squares", "terms": [{"k": i, "f": seq(i).to_json()} for i in range(1, k + 1)]}
    else:
        raise UsageError(f"unknown construction {name!r}")
    _write(_dump(out, "json"), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="statconv", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "csv")):
        sp.add_argument("--format", choices=formats, default="json")
        sp.add_argument("--out", help="write here instead of stdout")
        sp.add_argument("--config", help="plain-text key=value file")
        sp.add_argument("--seed", type=int, help="overrides the config seed")

    sp = sub.add_parser("suite", help="run a named verification suite")
    sp.add_argument("name", help=", ".join(S.SUITES))
    common(sp)
    sp.set_defaults(func=cmd_suite)

    sp = sub.add_parser("density", help="density profile of an index set")
    sp.add_argument("set", help="ap:1:2, dyadic:3, finite:1,2,3, densityless:1/3:2/3, squares, ~squares, ...")
    sp.add_argument("--ladder", help="comma-separated N values")
    common(sp)
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("seq", help="statistical limit, Cauchy and measurability checks of a numeric sequence")
    sp.add_argument("seq", help="harmonic, alternating, constant:C, example21, remark22-limit, remark22-signed")
    sp.add_argument("--limit", help="candidate statistical limit")
    sp.add_argument("--eps", help="epsilon ladder, e.g. 1/2,1/4,1/8")
    sp.add_argument("--cauchy", help="epsilon for the statistical Cauchy search")
    sp.add_argument("--scan", help="thresholds for the measurability scan")
    sp.add_argument("--cesaro", type=int, help="Cesaro mean at this n")
    sp.add_argument("--ladder", help="comma-separated N values")
    common(sp)
    sp.set_defaults(func=cmd_seq)

    sp = sub.add_parser("modes", help="run one convergence-mode checker on a construction")
    sp.add_argument("construction", help="typewriter, example24, example38, au_example, alternating_halves")
    sp.add_argument("--mode", choices=MODES, required=True)
    sp.add_argument("--eps", help="epsilon ladder")
    sp.add_argument("--ladder", help="comma-separated N values")
    sp.add_argument("--samples", help="sample points for the pointwise modes")
    sp.add_argument("--delta", default="1/8")
    sp.add_argument("--lambda-budget", dest="lambda_budget", default="2/5")
    sp.add_argument("--depth", type=int, default=M.DEFAULT_DEPTH)
    common(sp)
    sp.set_defaults(func=cmd_modes)

    sp = sub.add_parser("construct", help="emit a construction's terms or anchors as JSON")
    sp.add_argument("name", help="typewriter, example24, example36, example38, au_example")
    sp.add_argument("--k", type=int, help="number of terms")
    sp.add_argument("--n", type=int, help="block index (example36)")
    sp.add_argument("--depth", type=int, default=4, help="number of blocks (example24)")
    sp.add_argument("--emit-anchors", action="store_true")
    common(sp, ("json",))
    sp.set_defaults(func=cmd_construct)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, S.UnknownSuite, S.ConfigError, ix.InvalidBounds, C.DepthCapError) as exc:
        print(f"statconv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"statconv: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"statconv: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
