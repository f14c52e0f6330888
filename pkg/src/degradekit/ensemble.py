"""Discretized probability voting over the local, global and fusion streams."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import IdMismatch, NoStreams, OutOfRange

DEFAULT_BIN = 0.1
# absorbs representation error such as 0.85 / 0.1 == 8.499999999999998
_TIE_EPS = 1e-9


class VoteMode(enum.Enum):
    DISCRETIZED = "discretized"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class VoteConfig:
    weights: tuple = (1.0, 2.0, 2.0)  # local, global, fusion
    mode: VoteMode = VoteMode.DISCRETIZED
    bin: float = DEFAULT_BIN

    def __post_init__(self):
        if len(self.weights) != 3 or any(w < 0 or not math.isfinite(w) for w in self.weights):
            raise ValueError(f"weights must be three non-negative numbers, got {self.weights}")
        if sum(self.weights) <= 0:
            raise ValueError("at least one weight must be positive")
        if not 0 < self.bin <= 1:
            raise ValueError(f"bin must be in (0, 1], got {self.bin}")
        object.__setattr__(self, "mode", VoteMode(self.mode))

    @classmethod
    def parse_weights(cls, text: str) -> tuple:
        """``"1:2:2"`` -> ``(1.0, 2.0, 2.0)``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"weights must look like L:G:F, got {text!r}")
        return tuple(float(p) for p in parts)


@dataclass(frozen=True)
class StreamScores:
    image_id: str
    local: float | None
    global_: float
    fusion: float


def quantize_score(s: float, bin: float = DEFAULT_BIN) -> float:
    """Snap ``s`` to the nearest multiple of ``bin``; ties round away from zero."""
    if not (isinstance(s, (int, float)) and math.isfinite(s)) or not 0.0 <= s <= 1.0:
        raise OutOfRange(f"score must be in [0, 1], got {s!r}")
    steps = math.floor(s / bin + 0.5 + _TIE_EPS)
    return min(1.0, max(0.0, round(steps * bin, 12)))


def vote(scores: StreamScores, cfg: VoteConfig = VoteConfig()) -> float:
    streams = [(scores.local, cfg.weights[0]), (scores.global_, cfg.weights[1]),
               (scores.fusion, cfg.weights[2])]
    active = [(s, w) for s, w in streams if s is not None and w > 0]
    if not active:
        raise NoStreams(f"no stream with positive weight has a score for {scores.image_id!r}")
    total = sum(w for _, w in active)
    if cfg.mode is VoteMode.DISCRETIZED:
        mean = sum(w * quantize_score(s, cfg.bin) for s, w in active) / total
    else:
        for s, _ in active:
            if not 0.0 <= s <= 1.0:
                raise OutOfRange(f"score must be in [0, 1], got {s!r}")
        mean = sum(w * s for s, w in active) / total
    return quantize_score(min(1.0, max(0.0, mean)), cfg.bin)


def vote_table(local: dict, global_: dict, fusion: dict, cfg: VoteConfig = VoteConfig()) -> dict:
    """Vote per image id. Ids missing from ``local`` bypass the local stream."""
    if set(global_) != set(fusion):
        raise IdMismatch("global and fusion tables cover different ids",
                         set(global_) ^ set(fusion))
    extra = set(local) - set(global_)
    if extra:
        raise IdMismatch("local table has ids missing from global/fusion", extra)
    return {
        image_id: vote(StreamScores(image_id, local.get(image_id), global_[image_id],
                                    fusion[image_id]), cfg)
        for image_id in sorted(global_)
    }
