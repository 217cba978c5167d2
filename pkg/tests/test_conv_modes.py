from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statconv import constructions as C
from statconv import conv_modes as M
from statconv import index_sets as ix
from statconv.core import InconclusiveError, Verdict
from statconv.step_space import IntervalSet, StepFn, indicator, interval_indicator, rho

Q = Fraction
ZERO_FN = StepFn.constant(0)
SHORT = (2**8, 2**10, 2**12)


@pytest.fixture(scope="module")
def tw():
    return C.typewriter()


def test_typewriter_in_measure_and_statistically(tw):
    assert M.check_conv_in_measure(tw, ZERO_FN, Q(1, 2), 2**15).verdict is Verdict.HOLDS
    assert M.check_st_lambda(tw, ZERO_FN).verdict is Verdict.HOLDS


def test_typewriter_in_measure_fails_early(tw):
    rep = M.check_conv_in_measure(tw, ZERO_FN, Q(1, 2), 2**8)
    assert rep.verdict is Verdict.FAILS and rep.witness["measure"] == Q(1, 128)


def test_typewriter_pointwise_modes(tw):
    assert M.check_conv_ae(tw, ZERO_FN).verdict is Verdict.FAILS
    rep = M.check_st_ae(tw, ZERO_FN)
    assert rep.verdict is Verdict.HOLDS
    assert all(p["verdict"] is Verdict.HOLDS for p in rep.params["per_sample"])


def test_hit_counter_agrees_with_direct_walk(tw):
    plain = M.FnSeq(tw, "plain", budget=2**12)
    xs = [Q(1, 3), Q(5, 7), Q(0)]
    a = M.check_st_ae(tw, ZERO_FN, xs, n_ladder=SHORT)
    b = M.check_st_ae(plain, ZERO_FN, xs, n_ladder=SHORT)
    assert a.profiles == b.profiles


def test_alternating_halves_fail_everywhere():
    seq = C.alternating_halves()
    half = interval_indicator(Q(0), Q(1, 2))
    assert M.check_st_lambda(seq, half, n_ladder=SHORT).verdict is Verdict.FAILS
    assert M.check_st_ae(seq, half, n_ladder=SHORT).verdict is Verdict.FAILS
    assert M.check_st_cauchy_measure(seq, Q(1, 2), Q(1, 4), SHORT).verdict is Verdict.FAILS


def test_constant_sequence_holds_in_every_mode():
    f = interval_indicator(Q(1, 4), Q(3, 4))
    seq = C.constant_seq(f)
    assert M.check_conv_in_measure(seq, f, Q(1, 8), 2**15).verdict is Verdict.HOLDS
    assert M.check_st_lambda(seq, f).verdict is Verdict.HOLDS
    assert M.check_st_ae(seq, f).verdict is Verdict.HOLDS
    assert M.check_conv_ae(seq, f).verdict is Verdict.HOLDS
    assert M.check_st_au_cauchy(seq).verdict is Verdict.HOLDS
    assert M.check_integral_limit(seq).verdict is Verdict.HOLDS


def test_typewriter_cauchy_in_measure(tw):
    assert M.check_st_cauchy_measure(tw, Q(1, 2), Q(1, 4)).verdict is Verdict.HOLDS


def test_typewriter_cauchy_small_delta_is_inconclusive_at_short_ladder(tw):
    # about 2^7 early indices stay delta-far, which is too many for the tolerance at 2^12
    rep = M.check_st_cauchy_measure(tw, Q(1, 2), Q(1, 100), SHORT, budget=2)
    assert rep.verdict is Verdict.INCONCLUSIVE


def test_typewriter_not_au_cauchy(tw):
    rep = M.check_st_au_cauchy(tw, eps_ladder=(Q(1, 2),), n_ladder=SHORT)
    assert rep.verdict is Verdict.FAILS
    assert all(r["exceptional_lower"] >= Q(1, 10) for r in rep.witness["eps=1/2"]["refuted"])


@pytest.mark.parametrize("S", [ix.squares(), ix.powers_of_two()])
def test_au_example_is_au_cauchy(S):
    seq = C.au_example(S)
    rep = M.check_st_au_cauchy(seq, n_ladder=(2**15, 2**18, 2**21))
    assert rep.verdict is Verdict.HOLDS
    for w in rep.witness.values():
        assert w["lambda_D"] < Q(2, 5)


@pytest.mark.parametrize("r", [Q(1), Q(1, 2), Q(1, 7), Q(1, 300), Q(3, 5), Q(1, 2000)])
@pytest.mark.parametrize("eps", [Q(1), Q(1, 3)])
def test_au_bad_runs_match_per_index_cells(r, eps):
    S = ix.squares()
    seq = C.au_example(S)
    ref = interval_indicator(Q(0), r)
    runs = seq.bad_runs(ref, eps, 6, 1, 2500)
    flat = {}
    for a, b, bad in runs:
        for n in range(a, b + 1):
            flat[n] = bad
    assert sorted(flat) == list(range(1, 2501))
    for n in range(1, 2501):
        assert flat[n] == M.bad_cells(seq(n), ref, eps, 6), n


def test_au_bad_runs_decline_other_references():
    seq = C.au_example()
    assert seq.bad_runs(interval_indicator(Q(1, 4), Q(1, 2)), Q(1, 2), 6, 1, 100) is None


def test_bad_cells_and_max_cells():
    g = interval_indicator(Q(1, 8), Q(3, 8))
    assert M.bad_cells(g, ZERO_FN, Q(1, 2), 3) == (1, 2)
    assert M.bad_cells(g, ZERO_FN, Q(1, 2), 2) == (0, 1)
    assert M.bad_cells(g, g, Q(1, 2), 4) == ()
    assert M.max_cells(Q(2, 5), 6) == 25 and M.max_cells(Q(1, 4), 3) == 1
    assert M.cells_to_intervals((1, 2), 3) == IntervalSet([(Q(1, 8), Q(3, 8))])


runs_strategy = st.lists(
    st.tuples(st.integers(1, 4), st.frozensets(st.integers(0, 7), max_size=4).map(lambda s: tuple(sorted(s)))),
    min_size=1, max_size=8)


@settings(max_examples=80, deadline=None)
@given(runs_strategy, st.integers(0, 4))
def test_good_upper_bound_dominates_every_cover(runs, cmax):
    bound = M.good_upper_bound(runs, cmax)
    best = 0
    for size in range(cmax + 1):
        for D in itertools.combinations(range(8), size):
            good = sum(mult for mult, bad in runs if set(bad) <= set(D))
            best = max(best, good)
    assert best <= bound
    cover = M.greedy_cover(runs, cmax)
    assert len(cover) <= cmax


def test_au_block_refutation_on_typewriter(tw):
    blocks = [C.typewriter_block(n) for n in (8, 9, 10)]
    for row in M.au_block_refutation(tw, blocks):
        assert row["at_least_half"] and row["forced"] >= row["size"] // 2


def test_dominated_integral_typewriter(tw):
    rep = M.st_dominated_integral_check(tw, ZERO_FN, StepFn.constant(1))
    assert rep.verdict is Verdict.HOLDS and rep.params["target"] == 0


def test_domination_error(tw):
    with pytest.raises(M.DominationError) as err:
        M.st_dominated_integral_check(tw, ZERO_FN, interval_indicator(Q(0), Q(1, 2)))
    assert err.value.k >= 1


def test_integral_limit_examples(tw):
    assert M.check_integral_limit(tw).verdict is Verdict.HOLDS
    assert M.check_integral_limit(C.alternating_halves()).verdict is Verdict.HOLDS
    K = ~ix.squares()
    seq = C.example38(IntervalSet([(0, Q(1, 3))]), ix.odds())
    assert M.check_integral_limit(seq).verdict is Verdict.FAILS
    assert K.contains(2)


def test_candidate_pool_includes_neighbours(tw):
    pool = M.candidate_pool(M.FnSeq(lambda k: ZERO_FN), [16, 64])
    assert pool == [64, 63, 16, 15]
    assert len(M.candidate_pool(tw, [2**15], budget=5)) == 5


def test_null_point_samples_are_nudged():
    seq = M.FnSeq(lambda k: ZERO_FN, null_points=[Q(1, 2)])
    with pytest.warns(UserWarning):
        rep = M.check_conv_ae(seq, ZERO_FN, [Q(1, 2)], N=16)
    assert rep.params["per_sample"][0]["x"] != Q(1, 2)


def test_mode_verdict_json_has_no_floats(tw):
    rep = M.check_st_lambda(tw, ZERO_FN, n_ladder=SHORT)
    data = rep.to_json()
    # the running mean is still about 11/4096 at 2^12, above the tolerance
    assert data["verdict"] == "Inconclusive"
    assert all(isinstance(v, str) for _, v in data["profiles"]["eps=1/2"])
    assert rep.profile_csv("eps=1/2").splitlines()[0] == "n,value_num,value_den"


def test_st_lambda_extraction_on_typewriter(tw):
    res = M.extract_st_lambda_blocks(tw, ZERO_FN, k_max=6)
    assert res.ends == (1, 5, 16, 65, 326, 1957)
    assert all(M.verify_st_lambda_blocks(res, tw, ZERO_FN).values())
    for k, blk in enumerate(res.blocks, start=1):
        assert all(rho(tw(n), ZERO_FN) <= Q(2, k) for n in blk[:: max(1, len(blk) // 50)])


def test_st_lambda_extraction_budget():
    seq = C.alternating_halves()
    with pytest.raises(InconclusiveError) as err:
        M.extract_st_lambda_blocks(seq, indicator(IntervalSet([(0, Q(1, 2))])), k_max=3, budget=500)
    assert err.value.k == 2


def test_au_extraction_on_au_example():
    seq = C.au_example()
    res = M.extract_au_subsequence(seq, k_max=3)
    checks = M.verify_au_extraction(res, seq)
    assert all(all(v) for v in checks.values()), checks
    for k, Ck in enumerate(res.exceptional, start=1):
        assert Ck.measure() < Q(1, 2**k)
    assert all(a < b for a, b in zip(res.anchors, res.anchors[1:]))
