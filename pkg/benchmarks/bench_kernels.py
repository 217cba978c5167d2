"""Time the compiled counting kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

Both backends are imported directly, outputs are compared before timing, and
the best of ``--repeat`` runs is reported per kernel.
"""

from __future__ import annotations

import argparse
import random
import timeit
from array import array
from fractions import Fraction

from statconv import _kernels_py as pure

try:
    from statconv import _ckernels as compiled
except ImportError:
    compiled = None


def workloads(n: int, seed: int):
    rng = random.Random(seed)
    mask = bytes(rng.getrandbits(1) for _ in range(n))
    ladder = [n // 64, n // 16, n // 4, n]
    nums = array("q", (rng.randint(-1000, 1000) for _ in range(n)))
    dens = array("q", (rng.randint(1, 1000) for _ in range(n)))
    los = array("q", range(1, n, 10))
    his = array("q", (lo + 4 for lo in los))
    x = Fraction(1, 3)
    return {
        "prefix_counts": lambda m: m.prefix_counts(mask, ladder),
        "two_adic_valuations": lambda m: m.two_adic_valuations(n),
        "count_less": lambda m: m.count_less(nums, dens, 1, 7, ladder),
        "typewriter_hit_counts": lambda m: m.typewriter_hit_counts(x.numerator, x.denominator, ladder),
        "block_union_count": lambda m: m.block_union_count(los, his, n),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10**6, help="problem size")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<24}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for name, call in workloads(args.n, args.seed).items():
        a, b = call(pure), call(compiled)
        if (a if isinstance(a, int) else list(a)) != (b if isinstance(b, int) else list(b)):
            raise SystemExit(f"{name}: backends disagree")
        tp = min(timeit.repeat(lambda: call(pure), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: call(compiled), number=1, repeat=args.repeat))
        print(f"{name:<24}{tp * 1e3:>14.2f}{tc * 1e3:>14.2f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
