from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degradekit.ensemble import (
    StreamScores, VoteConfig, VoteMode, quantize_score, vote, vote_table,
)
from degradekit.errors import IdMismatch, NoStreams, OutOfRange

unit = st.floats(0.0, 1.0, allow_nan=False)
# three-decimal scores keep the exact-decimal oracle away from float near-ties
decimal_scores = st.integers(0, 1000).map(lambda k: k / 1000)


def q_oracle(x: Fraction) -> Fraction:
    """Round-half-up to tenths in exact rational arithmetic."""
    return Fraction(int(x * 10 + Fraction(1, 2)), 10)


def vote_oracle(scores, weights, discretized=True):
    active = [(Fraction(str(s)), Fraction(w)) for s, w in zip(scores, weights)
              if s is not None and w > 0]
    vals = [(q_oracle(s) if discretized else s, w) for s, w in active]
    return float(q_oracle(sum(v * w for v, w in vals) / sum(w for _, w in vals)))


def test_quantize_examples():
    assert quantize_score(0.814) == 0.8
    assert quantize_score(0.842) == 0.8
    assert quantize_score(0.85) == 0.9
    assert quantize_score(0.0) == 0.0
    assert quantize_score(1.0) == 1.0
    assert quantize_score(0.95) == 1.0
    assert quantize_score(0.05) == 0.1
    assert quantize_score(0.049999) == 0.0


@pytest.mark.parametrize("k", range(11))
def test_quantize_exact_multiples_and_midpoints(k):
    assert quantize_score(k / 10) == round(k / 10, 12)
    if k < 10:
        assert quantize_score(k / 10 + 0.05) == round((k + 1) / 10, 12)


@pytest.mark.parametrize("bad", [-0.01, 1.01, float("nan"), float("inf")])
def test_quantize_out_of_range(bad):
    with pytest.raises(OutOfRange):
        quantize_score(bad)


@settings(max_examples=500)
@given(unit)
def test_quantize_idempotent_and_on_grid(s):
    q = quantize_score(s)
    assert quantize_score(q) == q
    assert abs(q * 10 - round(q * 10)) < 1e-9
    assert abs(q - s) <= 0.05 + 1e-9


@settings(max_examples=300)
@given(decimal_scores)
def test_quantize_matches_exact_oracle(s):
    assert quantize_score(s) == float(q_oracle(Fraction(str(s))))


@settings(max_examples=300)
@given(unit, unit)
def test_quantize_monotone(a, b):
    lo, hi = sorted((a, b))
    assert quantize_score(lo) <= quantize_score(hi)


def test_vote_examples():
    cfg = VoteConfig()
    assert vote(StreamScores("a", 0.8, 0.8, 0.8), cfg) == 0.8
    assert vote(StreamScores("a", 0.6, 0.9, 0.9), cfg) == 0.8
    assert vote(StreamScores("a", None, 0.7, 0.9), cfg) == 0.8
    cont = VoteConfig(mode=VoteMode.CONTINUOUS)
    assert vote(StreamScores("a", 0.814, 0.842, 0.842), cont) == 0.8


def test_discretized_and_continuous_can_differ():
    s = StreamScores("a", 0.04, 0.04, 0.04)
    assert vote(s, VoteConfig()) == 0.0
    s = StreamScores("a", 0.14, 0.14, 0.26)
    # quantized inputs 0.1, 0.1, 0.3 -> 0.18 -> 0.2; raw mean 0.188 -> 0.2
    assert vote(s, VoteConfig()) == 0.2
    s = StreamScores("a", 0.149, 0.149, 0.149)
    assert vote(s, VoteConfig()) == 0.1
    s = StreamScores("a", 0.05, 0.14, 0.14)
    # quantized 0.1, 0.1, 0.1 -> 0.1 ; continuous (0.05 + 0.28 + 0.28)/5 = 0.122 -> 0.1
    assert vote(s, VoteConfig(mode="continuous")) == 0.1
    s = StreamScores("a", 0.26, 0.14, 0.14)
    # discretized (0.3 + 0.2 + 0.2)/5 = 0.14 -> 0.1 ; continuous (0.26 + 0.56)/5 = 0.164 -> 0.2
    assert vote(s, VoteConfig()) == 0.1
    assert vote(s, VoteConfig(mode="continuous")) == 0.2


def test_no_streams():
    with pytest.raises(NoStreams):
        vote(StreamScores("a", None, 0.5, 0.5), VoteConfig(weights=(1, 0, 0)))


@pytest.mark.parametrize("weights", [(1, 2, 2), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1), (1, 0, 0), (0, 0, 3)])
@settings(max_examples=100, deadline=None)
@given(st.one_of(st.none(), decimal_scores), decimal_scores, decimal_scores, st.booleans())
def test_vote_matches_exact_oracle(weights, local, g, f, discretized):
    mode = VoteMode.DISCRETIZED if discretized else VoteMode.CONTINUOUS
    cfg = VoteConfig(weights=weights, mode=mode)
    expected_active = [s for s, w in zip((local, g, f), weights) if s is not None and w > 0]
    if not expected_active:
        with pytest.raises(NoStreams):
            vote(StreamScores("x", local, g, f), cfg)
        return
    assert vote(StreamScores("x", local, g, f), cfg) == vote_oracle((local, g, f), weights, discretized)


@settings(max_examples=300, deadline=None)
@given(unit, unit, unit, st.sampled_from([0, 1, 2]), unit)
def test_vote_monotone(l, g, f, which, bump):
    base = [l, g, f]
    raised = list(base)
    raised[which] = max(raised[which], bump)
    cfg = VoteConfig()
    assert vote(StreamScores("x", *raised), cfg) >= vote(StreamScores("x", *base), cfg)


@settings(max_examples=200, deadline=None)
@given(unit, unit, unit)
def test_swap_global_fusion_with_equal_weights(l, g, f):
    cfg = VoteConfig()
    assert vote(StreamScores("x", l, g, f), cfg) == vote(StreamScores("x", l, f, g), cfg)


@settings(max_examples=200, deadline=None)
@given(unit, unit, unit)
def test_single_stream_weights(l, g, f):
    assert vote(StreamScores("x", l, g, f), VoteConfig(weights=(1, 0, 0))) == quantize_score(l)
    assert vote(StreamScores("x", l, g, f), VoteConfig(weights=(0, 1, 0))) == quantize_score(g)
    assert vote(StreamScores("x", l, g, f), VoteConfig(weights=(0, 0, 1))) == quantize_score(f)


def test_vote_config_validation():
    with pytest.raises(ValueError):
        VoteConfig(weights=(0, 0, 0))
    with pytest.raises(ValueError):
        VoteConfig(weights=(1, -1, 1))
    with pytest.raises(ValueError):
        VoteConfig(bin=0)
    assert VoteConfig.parse_weights("1:2:2") == (1.0, 2.0, 2.0)
    with pytest.raises(ValueError):
        VoteConfig.parse_weights("1:2")


def test_vote_table():
    assert vote_table({"a": 0.5}, {"a": 0.5}, {"a": 0.5}) == {"a": 0.5}
    g = {"a": 0.31, "b": 0.77, "c": 0.5}
    f = {"a": 0.45, "b": 0.61, "c": 0.2}
    assert vote_table({}, g, f) == vote_table({"a": 0.9, "b": 0.1, "c": 0.0}, g, f, VoteConfig(weights=(0, 2, 2)))
    assert list(vote_table({}, g, f)) == ["a", "b", "c"]


def test_vote_table_id_mismatch():
    with pytest.raises(IdMismatch) as info:
        vote_table({}, {"a": 0.1}, {"a": 0.1, "b": 0.2})
    assert info.value.ids == ["b"]
    with pytest.raises(IdMismatch):
        vote_table({"z": 0.3}, {"a": 0.1}, {"a": 0.1})
