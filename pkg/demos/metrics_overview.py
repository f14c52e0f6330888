"""AUC, attribution entropy, embedding cosine and cross-stream correlation.

    python demos/metrics_overview.py
"""

import math

import numpy as np

from degradekit.metrics import attribution_entropy, cosine_similarity, pearson_matrix, roc_auc, sweep_aggregate

scores = {"a": 0.9, "b": 0.7, "c": 0.8, "d": 0.2}
labels = {"a": 1, "b": 1, "c": 0, "d": 0}
print("AUC", roc_auc(scores, labels))

focused = np.zeros((18, 18))
focused[8:10, 8:10] = 1.0
print("entropy focused", round(attribution_entropy(focused), 4),
      "diffuse", round(attribution_entropy(np.ones((18, 18))), 4), "bound", round(math.log(324), 4))

rng = np.random.default_rng(0)
clean = rng.standard_normal(512)
for noise in (0.1, 0.5, 1.0):
    print(f"embedding drift {noise}: cosine {cosine_similarity(clean, clean + noise * rng.standard_normal(512)):.4f}")

base = {f"i{k}": float(v) for k, v in enumerate(rng.random(100))}
tables = {"local": base,
          "global": {k: v + 0.2 * rng.standard_normal() for k, v in base.items()},
          "fusion": {k: float(rng.random()) for k in base}}
names, r = pearson_matrix(tables)
print(names)
print(np.round(r, 3))

rows = [(s, f"i{k}", 30 - 20 * s + rng.standard_normal()) for s in (0.0, 0.2, 0.4) for k in range(10)]
print("sweep", sweep_aggregate(rows))
