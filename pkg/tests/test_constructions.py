from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from statconv import constructions as C
from statconv import index_sets as ix
from statconv.step_space import IntervalSet, StepFn, integral

Q = Fraction


@given(st.integers(1, 10**9))
def test_typewriter_index_round_trip(k):
    n, j = C.typewriter_index(k)
    assert 1 <= j <= 2**n
    assert C.typewriter_k(n, j) == k
    lo, hi = C.typewriter_block(n)
    assert lo <= k <= hi


def test_typewriter_first_terms():
    tw = C.typewriter()
    assert [C.typewriter_index(k) for k in range(1, 7)] == [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (2, 4)]
    assert integral(tw(3)) == Q(1, 4) and tw(3)(Q(0)) == 1
    assert C.describe_typewriter(4) == {"k": 4, "block": 2, "position": 2, "interval": ["1/4", "1/2"]}


def test_typewriter_blocks_cover_the_interval():
    for n in range(1, 7):
        lo, hi = C.typewriter_block(n)
        parts = IntervalSet.empty()
        for k in range(lo, hi + 1):
            parts = parts | C.typewriter_interval(k)
        assert parts == IntervalSet.full()


def test_typewriter_depth_cap():
    tw = C.typewriter(max_block=4)
    with pytest.raises(C.DepthCapError):
        tw(C.typewriter_block(5)[0])


def test_typewriter_invalid_index():
    with pytest.raises(ValueError):
        C.typewriter_index(0)
    with pytest.raises(ValueError):
        C.typewriter_k(2, 5)


def test_example24_frozen_anchors():
    params, _ = C.default_example24(2)
    assert params.k == ((1, 3), (21, 43, 87, 175))
    assert params.m == (0, 10, 526)


def test_example24_inequalities_hold():
    params, _ = C.default_example24(8)
    assert all(ok for _, _, ok in params.check())


def test_example24_values_follow_segments():
    params, seq = C.default_example24(3)
    for lo, hi, n, j in params.segments():
        for k in {lo, hi}:
            fn = seq(k)
            if j == 0:
                assert fn == StepFn.constant(0)
            else:
                assert integral(fn) == Q(1, 2**n) and fn(Q(j - 1, 2**n)) == 1


def test_example24_running_density_matches_brute_force():
    params, seq = C.default_example24(3)
    x = Q(5, 11)
    for n in range(1, 4):
        cp = C.example24_checkpoint_for(params, x, n)
        brute = sum(1 for k in range(1, cp + 1) if seq(k)(x) >= Q(1, 2))
        got = C.example24_running_density(params, x, Q(1, 2), cp)
        assert got == Q(brute, cp) and got > Q(1, 2)


def test_example24_density_edge_cases():
    params, _ = C.default_example24(2)
    assert C.example24_running_density(params, Q(1, 3), 2, 10) == 0
    assert C.example24_running_density(params, Q(1, 3), 0, 10) == 1
    with pytest.raises(C.NotACheckpoint):
        C.example24_running_density(params, Q(1, 3), Q(1, 2), 11)
    with pytest.raises(C.DepthCapError):
        C.default_example24(C.EXAMPLE24_DEPTH_CAP + 1)
    _, seq = C.default_example24(2)
    with pytest.raises(ValueError):
        seq(527)


def test_example36_sets():
    odd = ix.odds()
    for n in range(1, 8):
        Cn = C.example36_Cn(odd, n)
        # block n starts at the odd index 2^n - 1, so the odd positions are picked
        assert Cn.measure() == Q(1, 2)
        assert Q(0) in Cn
    assert C.example36_Cn(ix.FiniteSet(()), 3) == IntervalSet.empty()


def test_example38_values():
    A = IntervalSet([(0, Q(1, 3))])
    seq = C.example38(A, ix.odds())
    assert integral(seq(1)) == Q(1, 3) and integral(seq(2)) == 0
    with pytest.raises(C.DegenerateSetError):
        C.example38(IntervalSet.empty(), ix.odds())


def test_au_example_terms():
    seq = C.au_example()
    assert seq(4) == StepFn.constant(1)
    assert integral(seq(5)) == Q(1, 5)
    seq2 = C.au_example(ix.powers_of_two())
    assert seq2(8) == StepFn.constant(1) and integral(seq2(9)) == Q(1, 9)


def test_constant_and_alternating_helpers():
    f = StepFn.constant(Q(2, 3))
    seq = C.constant_seq(f)
    assert list(seq.segments(5, 9)) == [(5, 9, f)]
    alt = C.alternating_halves()
    assert alt(1)(Q(0)) == 1 and alt(2)(Q(0)) == 0
    assert set(C.CONSTRUCTIONS) == {"typewriter", "example24", "example36", "example38", "au_example"}
