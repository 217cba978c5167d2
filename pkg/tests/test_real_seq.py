from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statconv import constructions as C
from statconv import index_sets as ix
from statconv import real_seq as R
from statconv.core import InconclusiveError, Verdict

HALF = Fraction(1, 2)
LADDER = (2**8, 2**10, 2**12, 2**15)


@pytest.fixture(scope="module")
def densityless():
    return ix.make_densityless(Fraction(1, 3), Fraction(2, 3), 10**6)


@pytest.fixture(scope="module")
def remark_seq(densityless):
    return R.remark22_limit_seq(densityless, HALF)


def typewriter_trace(x):
    tw = C.typewriter()
    return R.RealSeq(lambda k: tw(k)(x), "trace")


def test_exceptional_set_harmonic():
    E = R.exceptional_set(R.harmonic(), 0, Fraction(1, 10))
    assert E.count_upto(100) == 10


def test_exceptional_set_constant_is_empty():
    E = R.exceptional_set(R.constant(3), 3, Fraction(1, 1000))
    assert E.count_upto(1000) == 0


def test_exceptional_set_of_limit_sequence_is_a_prefix(remark_seq):
    E = R.exceptional_set(remark_seq, HALF, Fraction(1, 20))
    assert E.count_upto(10**4) == E.count_upto(20) <= 20


def test_typewriter_trace_at_zero_holds():
    rep = R.st_limit_check(typewriter_trace(Fraction(0)), 0, [HALF], LADDER)
    assert rep.verdict is Verdict.HOLDS
    final = rep.entries[0].profile[-1]
    # one hit per block; blocks 0..14 start at or before 2^15
    assert final.count == 15 and final.ratio <= Fraction(1, 1000)


def test_alternating_fails_at_one():
    rep = R.st_limit_check(R.alternating(), 1, [HALF], LADDER)
    assert rep.verdict is Verdict.FAILS
    assert rep.entries[0].profile[-1].ratio == HALF


def test_limit_with_densityless_level_set_holds(remark_seq):
    assert R.st_limit_check(remark_seq, HALF, R.DEFAULT_EPS, LADDER).verdict is Verdict.HOLDS


def test_cauchy_examples(remark_seq):
    assert R.st_cauchy_check(R.harmonic(), Fraction(1, 8)).verdict is Verdict.HOLDS
    alt = R.st_cauchy_check(R.alternating(), 1, (2**8, 2**10, 2**12))
    assert alt.verdict is Verdict.FAILS and alt.anchor is None
    assert R.st_cauchy_check(remark_seq, Fraction(1, 8)).verdict is Verdict.HOLDS


def test_cauchy_pool_respects_budget():
    pool = R.cauchy_pool([10, 100, 2**20], budget=5)
    assert len(pool) == 5 and pool == sorted(pool, reverse=True)


def test_cesaro_examples():
    chi = R.indicator_seq(~ix.squares())
    assert R.cesaro_mean(chi, 10**4) >= Fraction(99, 100)
    assert R.cesaro_mean(R.constant(Fraction(2, 7)), 50) == Fraction(2, 7)
    assert R.cesaro_mean(R.alternating(), 1000) == 0


def test_cesaro_forward_bound(remark_seq):
    n = 10**4
    for eps in (Fraction(1, 10), Fraction(1, 100)):
        gap = abs(R.cesaro_mean(remark_seq, n) - HALF)
        assert gap <= R.cesaro_gap_bound(remark_seq, HALF, eps, n, 1)


def test_cesaro_backward_nonnegative():
    # a_n >= 0 with Cesaro means tending to 0 forces statistical convergence to 0
    seq = R.indicator_seq(ix.squares())
    assert R.cesaro_mean(seq, 10**4) == Fraction(100, 10**4)
    assert R.st_limit_check(seq, 0, [HALF], (2**8, 2**12, 2**16, 10**6)).verdict is Verdict.HOLDS


def test_density1_extraction_ratios(remark_seq):
    K = R.extract_density1_subseq(remark_seq, HALF, k_max=6)
    for k, e in enumerate(K.checkpoints, start=1):
        assert Fraction(K.count_upto(e), e) > 1 - Fraction(1, k)
    tail = [n for n in range(K.checkpoints[-1] + 1, K.checkpoints[-1] + 500) if K.contains(n)]
    assert all(abs(remark_seq(n) - HALF) < Fraction(1, 6) for n in tail)


def test_density1_extraction_convergent():
    K = R.extract_density1_subseq(R.harmonic(), 0, k_max=5)
    top = K.checkpoints[-1]
    assert all(K.contains(n) for n in range(top, top + 100))


def test_density1_extraction_typewriter_trace():
    x = Fraction(1, 3)
    seq = typewriter_trace(x)
    K = R.extract_density1_subseq(seq, 0, k_max=6)
    assert not any(K.contains(n) and seq(n) == 1 for n in range(K.checkpoints[-1], 2**12))


def test_density1_extraction_budget():
    with pytest.raises(InconclusiveError):
        R.extract_density1_subseq(R.alternating(), 1, k_max=3, budget=2000)


def test_measurability_constant_sequence():
    scan = R.measurability_scan(R.constant(HALF), [0, 1], [100, 1000, 10**4])
    assert [(v.kind, v.value) for _, v in scan] == [("Exists", 0), ("Exists", 1)]


def test_measurability_empty_thresholds():
    assert R.measurability_scan(R.harmonic(), []) == []


def test_example21_values_in_their_bands():
    seq = R.example21_seq()
    vals = seq.values(5000)
    for n in range(1, 8):
        A = ix.dyadic_class(n)
        for k in A.elements_upto(5000):
            assert Fraction(1, n + 1) < vals[k - 1] <= Fraction(1, n)


def test_example21_scan_exists_between_reciprocals():
    seq = R.example21_seq()
    scan = dict(R.measurability_scan(seq, [Fraction(3, 5), Fraction(2, 5)], (4, 32, 512, 16384, 100000)))
    assert scan[Fraction(3, 5)].kind == "Exists" and scan[Fraction(3, 5)].value == HALF
    assert scan[Fraction(2, 5)].kind == "Exists" and scan[Fraction(2, 5)].value == Fraction(1, 4)


def test_signed_sequence(densityless):
    c = R.remark22_signed_seq(densityless, ~densityless)
    lad = [x for x in densityless.checkpoints if x >= 64][-6:]
    assert R.measurability_scan(c, [HALF], lad)[0][1].kind == "NotExists"
    got = [(v.kind, v.value) for _, v in R.measurability_scan(c.abs(), [HALF, Fraction(3, 2), -1], lad)]
    assert got == [("Exists", 0), ("Exists", 1), ("Exists", 0)]


def test_signed_sequence_partition_error():
    with pytest.raises(R.PartitionError):
        R.remark22_signed_seq(ix.odds(), ix.dyadic_class(1))
    with pytest.raises(R.PartitionError):
        R.remark22_signed_seq(ix.odds(), ix.odds())


def test_abs_level_set_identity(densityless):
    # {|a_n| < a} = {a_n < a} minus {a_n <= -a}
    c = R.remark22_signed_seq(densityless, ~densityless)
    vals = c.values(10**4)
    for a in (Fraction(1, 2), Fraction(9, 10), Fraction(3, 2)):
        for n in (100, 2500, 10**4):
            lhs = sum(1 for v in vals[:n] if abs(v) < a)
            rhs = sum(1 for v in vals[:n] if v < a) - sum(1 for v in vals[:n] if v <= -a)
            assert lhs == rhs


def test_epsilon_ladder_validation():
    with pytest.raises(ValueError):
        R.EpsilonLadder((Fraction(1, 4), HALF))
    with pytest.raises(ValueError):
        R.EpsilonLadder((HALF, 0))
    with pytest.raises(ValueError):
        R.EpsilonLadder(())


def test_values_are_deterministic():
    seq = R.example21_seq()
    first = seq.values(3000)
    assert seq.values(3000) == first
    assert [seq(k) for k in (1, 17, 2999)] == [first[0], first[16], first[2998]]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=16), min_size=1, max_size=60),
       st.fractions(min_value=-2, max_value=2, max_denominator=16))
def test_below_set_counts_match_brute_force(vals, a):
    seq = R.RealSeq(lambda n: vals[(n - 1) % len(vals)], "cycle")
    ladder = [10, 100, 500]
    got = R.below_set(seq, a).count_many(ladder)
    assert got == [sum(1 for k in range(1, n + 1) if seq(k) < a) for n in ladder]
