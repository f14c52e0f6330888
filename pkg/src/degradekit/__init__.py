"""degradekit: deterministic compound degradation and forensic-robustness evaluation.

Subpackages and modules:

* :mod:`degradekit.imagecore` - raster codecs, color conversion, resampling, filtering
* :mod:`degradekit.degrade` - the 18-op degradation engine with manifest replay
* :mod:`degradekit.facegeom` - 252x252 crop geometry and face-detection recovery
* :mod:`degradekit.ensemble` - discretized weighted voting over three streams
* :mod:`degradekit.metrics` - ROC-AUC, attribution entropy, cosine and Pearson metrics
* :mod:`degradekit.harness` - the ``degradekit`` command-line tool
"""

from . import degrade, ensemble, facegeom, formats, imagecore, metrics
from .degrade import DegradeConfig, apply_plan, degrade_batch, op_catalog, replay, sample_plan
from .ensemble import VoteConfig, VoteMode, quantize_score, vote, vote_table
from .imagecore import decode_image, encode_image, psnr, resize
from .metrics import attribution_entropy, cosine_similarity, pearson_matrix, roc_auc

__version__ = "0.1.0"

__all__ = [
    "DegradeConfig", "VoteConfig", "VoteMode", "apply_plan", "attribution_entropy",
    "cosine_similarity", "decode_image", "degrade", "degrade_batch", "encode_image", "ensemble",
    "facegeom", "formats", "imagecore", "metrics", "op_catalog", "pearson_matrix", "psnr",
    "quantize_score", "replay", "resize", "roc_auc", "sample_plan", "vote", "vote_table",
]
