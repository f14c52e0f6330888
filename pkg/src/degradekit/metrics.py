"""Evaluation and attribution metrics."""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np
from scipy.stats import rankdata

from .errors import (AllZero, DimensionMismatch, EmptyInput, IdMismatch, NegativeValue,
                     SingleClass, ZeroVariance, ZeroVector)


def _aligned(scores: dict, labels: dict):
    if set(scores) != set(labels):
        raise IdMismatch("score and label tables cover different ids", set(scores) ^ set(labels))
    ids = sorted(scores)
    return (np.array([scores[i] for i in ids], dtype=np.float64),
            np.array([labels[i] for i in ids], dtype=np.int64))


def roc_auc(scores: dict, labels: dict) -> float:
    """ROC-AUC via the Mann-Whitney U statistic with midranks (ties count 1/2)."""
    s, y = _aligned(scores, labels)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUC needs at least one positive and one negative label")
    ranks = rankdata(s, method="average")
    r_pos = float(np.sum(ranks[y == 1]))
    return (r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _check_map(values, normalize: bool) -> np.ndarray:
    m = np.asarray(values, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise ValueError("activation map must be a non-empty 2-D grid")
    if not np.all(np.isfinite(m)):
        raise ValueError("activation map contains non-finite values")
    if normalize:
        lo, hi = m.min(), m.max()
        if hi == lo:
            raise AllZero("activation map is constant; min-max normalization is undefined")
        m = (m - lo) / (hi - lo)
    if np.any(m < 0):
        raise NegativeValue("activation map has negative values (pass normalize=True for signed maps)")
    if not np.any(m > 0):
        raise AllZero("activation map has no positive values")
    return m


def attribution_entropy(values, normalize: bool = False) -> float:
    """Shannon entropy (nats) of the map treated as a 2-D distribution."""
    m = _check_map(values, normalize)
    p = m / m.sum()
    nz = p[p > 0]
    return float(max(0.0, -np.sum(nz * np.log(nz))))


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"embedding dims differ: {a.size} vs {b.size}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def pearson_matrix(tables: dict) -> tuple[list, np.ndarray]:
    """Pairwise Pearson r between named score tables; returns ``(names, matrix)``."""
    names = list(tables)
    if not names:
        raise EmptyInput("no tables given")
    ids = set(tables[names[0]])
    for name in names[1:]:
        if set(tables[name]) != ids:
            raise IdMismatch(f"table {name!r} covers different ids", set(tables[name]) ^ ids)
    if len(ids) < 2:
        raise EmptyInput("correlation needs at least two ids")
    order = sorted(ids)
    x = np.array([[tables[n][i] for i in order] for n in names], dtype=np.float64)
    centered = x - x.mean(axis=1, keepdims=True)
    norms = np.sqrt(np.sum(centered**2, axis=1))
    for name, norm in zip(names, norms):
        if norm == 0:
            raise ZeroVariance(f"table {name!r} has zero variance")
    r = (centered @ centered.T) / np.outer(norms, norms)
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return names, r


def sweep_aggregate(rows, stat: str = "mean") -> list[tuple[float, float, int]]:
    """Group ``(severity, image_id, value)`` rows by severity."""
    rows = list(rows)
    if not rows:
        raise EmptyInput("sweep has no rows")
    if stat not in ("mean", "median"):
        raise ValueError(f"stat must be 'mean' or 'median', got {stat!r}")
    groups = defaultdict(list)
    for severity, _, value in rows:
        groups[round(float(severity), 6)].append(float(value))
    reduce = np.mean if stat == "mean" else np.median
    return [(sev, float(reduce(vals)), len(vals)) for sev, vals in sorted(groups.items())]


def entropy_upper_bound(rows: int, cols: int) -> float:
    return math.log(rows * cols)
