import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degradekit.errors import (
    AllZero, DimensionMismatch, EmptyInput, IdMismatch, NegativeValue, SingleClass,
    ZeroVariance, ZeroVector,
)
from degradekit.metrics import (
    attribution_entropy, cosine_similarity, entropy_upper_bound, pearson_matrix, roc_auc,
    sweep_aggregate,
)


def pair_auc(scores, labels):
    """Exhaustive pair counting: win 1, tie 1/2."""
    pos = [scores[i] for i in scores if labels[i] == 1]
    neg = [scores[i] for i in scores if labels[i] == 0]
    total = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p, n in product(pos, neg))
    return total / (len(pos) * len(neg))


def table(values):
    return {f"id{i:03d}": v for i, v in enumerate(values)}


# --- AUC ----------------------------------------------------------------------


def test_auc_examples():
    labels = table([1, 1, 0, 0])
    assert roc_auc(table([0.9, 0.8, 0.2, 0.1]), labels) == 1.0
    assert roc_auc(table([0.5] * 4), labels) == 0.5
    assert roc_auc(table([0.9, 0.7, 0.8, 0.2]), labels) == 0.75


def test_auc_errors():
    with pytest.raises(SingleClass):
        roc_auc(table([0.1, 0.2]), table([1, 1]))
    with pytest.raises(IdMismatch):
        roc_auc({"a": 0.1, "b": 0.2}, {"a": 0, "c": 1})


def test_auc_matches_pair_oracle_random_instances():
    rng = np.random.default_rng(7)
    for trial in range(500):
        n = int(rng.integers(2, 51))
        labels = rng.integers(0, 2, n)
        labels[0], labels[1] = 0, 1
        if trial % 2:
            scores = np.round(rng.random(n), 1)  # tie-heavy, quantized
        else:
            scores = rng.random(n)
        s, y = table(scores.tolist()), table(labels.tolist())
        assert abs(roc_auc(s, y) - pair_auc(s, y)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 10), st.integers(0, 1)), min_size=2, max_size=40))
def test_auc_transform_invariance_and_flip(rows):
    labels = [lab for _, lab in rows]
    if len(set(labels)) < 2:
        return
    scores = table([k / 10 for k, _ in rows])
    y = table(labels)
    auc = roc_auc(scores, y)
    assert 0.0 <= auc <= 1.0
    transformed = {k: math.exp(3 * v) - 7 for k, v in scores.items()}
    assert roc_auc(transformed, y) == pytest.approx(auc, abs=1e-12)
    flipped = {k: 1 - v for k, v in y.items()}
    assert roc_auc(scores, flipped) == pytest.approx(1 - auc, abs=1e-12)


# --- entropy --------------------------------------------------------------------


def test_entropy_closed_forms():
    delta = np.zeros((18, 18))
    delta[4, 9] = 3.0
    assert attribution_entropy(delta) == 0.0
    assert attribution_entropy(np.ones((18, 18))) == pytest.approx(math.log(324), abs=1e-9)
    assert attribution_entropy(np.ones((18, 18))) == pytest.approx(5.78074, abs=1e-5)
    assert attribution_entropy(np.full((252, 252), 0.2)) == pytest.approx(math.log(63504), abs=1e-9)
    assert attribution_entropy(np.full((252, 252), 0.2)) == pytest.approx(11.05886, abs=1e-5)
    assert entropy_upper_bound(18, 18) == math.log(324)


def test_entropy_two_cells():
    assert attribution_entropy([[1.0, 1.0]]) == pytest.approx(math.log(2))
    p = 0.25
    assert attribution_entropy([[1.0, 3.0]]) == pytest.approx(-(p * math.log(p) + (1 - p) * math.log(1 - p)))


def test_entropy_bounds_random_maps():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        r, c = rng.integers(1, 20, 2)
        m = rng.random((r, c)) * (rng.random((r, c)) < 0.7)
        if not m.any():
            m[0, 0] = 1.0
        h = attribution_entropy(m)
        assert 0.0 <= h <= math.log(r * c) + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
def test_entropy_scale_invariant(r, c, k, seed):
    m = np.random.default_rng(seed).random((r, c)) + 1e-3
    assert attribution_entropy(m * k) == pytest.approx(attribution_entropy(m), abs=1e-9)


def test_entropy_errors_and_normalize():
    with pytest.raises(NegativeValue):
        attribution_entropy([[0.5, -0.1]])
    with pytest.raises(AllZero):
        attribution_entropy(np.zeros((3, 3)))
    # min-max normalization turns a signed map into a valid one
    assert attribution_entropy([[-1.0, 1.0]], normalize=True) == 0.0


# --- cosine -----------------------------------------------------------------------


def test_cosine_examples():
    assert cosine_similarity([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0, abs=1e-15)
    assert cosine_similarity([1, 0], [0, 1]) == 0.0
    assert cosine_similarity([1, 2, 3], [4, 5, 6]) == pytest.approx(32 / math.sqrt(14 * 77), abs=1e-15)
    assert cosine_similarity([1, 2, 3], [4, 5, 6]) == pytest.approx(0.974632, abs=1e-6)
    assert cosine_similarity([1, 1], [-2, -2]) == pytest.approx(-1.0)
    with pytest.raises(DimensionMismatch):
        cosine_similarity([1, 2], [1, 2, 3])
    with pytest.raises(ZeroVector):
        cosine_similarity([0, 0], [1, 2])


@settings(max_examples=200)
@given(st.lists(st.floats(-100, 100), min_size=3, max_size=3),
       st.lists(st.floats(-100, 100), min_size=3, max_size=3), st.floats(0.01, 100))
def test_cosine_bounds_and_scaling(a, b, k):
    if np.linalg.norm(a) < 1e-6 or np.linalg.norm(b) < 1e-6:
        return
    c = cosine_similarity(a, b)
    assert -1.0 <= c <= 1.0
    assert cosine_similarity(np.array(a) * k, b) == pytest.approx(c, abs=1e-9)


# --- pearson ----------------------------------------------------------------------


def test_pearson_examples():
    x = {"a": 1.0, "b": 2.0, "c": 3.0}
    y = {"a": 3.0, "b": 2.0, "c": 1.0}
    names, r = pearson_matrix({"x": x, "y": y, "z": {k: 2 * v + 5 for k, v in x.items()}})
    assert names == ["x", "y", "z"]
    assert r[0, 1] == pytest.approx(-1.0)
    assert r[0, 2] == pytest.approx(1.0)
    assert np.array_equal(np.diag(r), np.ones(3))


def test_pearson_matches_numpy_and_is_symmetric(rng):
    data = {n: table(rng.random(30).tolist()) for n in ("local", "global", "fusion")}
    names, r = pearson_matrix(data)
    expected = np.corrcoef([[data[n][k] for k in sorted(data[n])] for n in names])
    assert np.allclose(r, expected, atol=1e-12)
    assert np.array_equal(r, r.T)
    assert np.all(np.abs(r) <= 1)


def test_pearson_affine_invariant(rng):
    a, b = table(rng.random(20).tolist()), table(rng.random(20).tolist())
    _, r1 = pearson_matrix({"a": a, "b": b})
    _, r2 = pearson_matrix({"a": {k: 3 * v - 1 for k, v in a.items()}, "b": b})
    assert r1[0, 1] == pytest.approx(r2[0, 1], abs=1e-12)


def test_pearson_errors():
    with pytest.raises(ZeroVariance):
        pearson_matrix({"a": {"x": 1.0, "y": 1.0}, "b": {"x": 1.0, "y": 2.0}})
    with pytest.raises(IdMismatch):
        pearson_matrix({"a": {"x": 1.0, "y": 2.0}, "b": {"x": 1.0, "z": 2.0}})
    with pytest.raises(EmptyInput):
        pearson_matrix({})


# --- sweeps -----------------------------------------------------------------------


def test_sweep_aggregate():
    assert sweep_aggregate([(0.2, "a", 5.0)]) == [(0.2, 5.0, 1)]
    assert sweep_aggregate([(0.0, "a", 1.0), (0.0, "b", 3.0)]) == [(0.0, 2.0, 2)]
    rows = [(0.3, "a", 1.0), (0.1, "a", 2.0), (0.3, "b", 5.0), (0.3, "c", 6.0)]
    assert sweep_aggregate(rows) == [(0.1, 2.0, 1), (0.3, 4.0, 3)]
    assert sweep_aggregate(rows, "median") == [(0.1, 2.0, 1), (0.3, 5.0, 3)]
    with pytest.raises(EmptyInput):
        sweep_aggregate([])
