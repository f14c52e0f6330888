"""Discretized weighted voting over three detector streams.

    python demos/ensemble_voting.py
"""

import numpy as np
from scipy.stats import norm

from degradekit.ensemble import StreamScores, VoteConfig, VoteMode, quantize_score, vote, vote_table
from degradekit.metrics import roc_auc

print("quantize 0.814 ->", quantize_score(0.814), " 0.85 ->", quantize_score(0.85))
cfg = VoteConfig(weights=(1, 2, 2))
print("vote(0.6, 0.9, 0.9) =", vote(StreamScores("a", 0.6, 0.9, 0.9), cfg))
print("vote(no face, 0.7, 0.9) =", vote(StreamScores("b", None, 0.7, 0.9), cfg))

# three equally good, independent streams; the vote beats each of them
rng = np.random.default_rng(1)
n = 2000
labels = rng.permutation(np.repeat([0, 1], n // 2))
ids = [f"x{k}" for k in range(n)]
y = dict(zip(ids, labels.tolist()))
d = np.sqrt(2) * norm.ppf(0.8)
streams = [dict(zip(ids, norm.cdf(labels * d + rng.standard_normal(n) - d / 2).tolist())) for _ in range(3)]
for name, t in zip(("local", "global", "fusion"), streams):
    print(f"{name:7s} AUC {roc_auc(t, y):.4f}")
for mode in VoteMode:
    voted = vote_table(*streams, VoteConfig(weights=(1, 2, 2), mode=mode))
    print(f"ensemble ({mode.value}) AUC {roc_auc(voted, y):.4f}")
