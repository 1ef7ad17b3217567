"""Distance-decayed stochastic stroke masking.

A masking center is drawn from the stroke midpoints; each stroke is then
discarded with probability ``clip(base_rate * w_k / mean(w), 0, 1)`` where
``w_k = exp(-|midpoint_k - center| / temperature)``. Discarded strokes have
their coverage polygons erased from the glyph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bitmap import BinaryGlyph
from .errors import EmptyStrokeSet, LengthMismatch
from .geometry import CoveragePolygon, polygon_mask
from .reward import RewardConfig, aggregate_reward
from .strokes import StrokeSet


@dataclass(frozen=True)
class MaskConfig:
    temperature: float = 0.4
    base_rate: float = 0.5
    trials: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be > 0")
        if not 0 < self.base_rate < 1:
            raise ValueError("base_rate must lie in (0, 1)")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def trial_rng(self, trial: int) -> np.random.Generator:
        """Independent generator per trial, so trial t does not depend on how many trials run."""
        return np.random.default_rng([self.rng_seed, trial])


@dataclass(frozen=True)
class MaskPlan:
    center_index: int
    center: tuple[float, float]
    midpoints: np.ndarray
    distances: np.ndarray
    weights: np.ndarray
    normalized_weights: np.ndarray
    probabilities: np.ndarray
    outcomes: np.ndarray

    def to_dict(self) -> dict:
        return {
            "center_index": self.center_index,
            "center": list(self.center),
            "midpoints": self.midpoints.tolist(),
            "distances": self.distances.tolist(),
            "weights": self.weights.tolist(),
            "normalized_weights": self.normalized_weights.tolist(),
            "probabilities": self.probabilities.tolist(),
            "outcomes": self.outcomes.astype(int).tolist(),
        }


def discard_probabilities(distances: np.ndarray, temperature: float, base_rate: float):
    """(weights, normalized weights, probabilities) for the given center distances."""
    w = np.exp(-np.asarray(distances, dtype=np.float64) / temperature)
    w_norm = w / w.mean()
    return w, w_norm, np.clip(base_rate * w_norm, 0.0, 1.0)


def plan_mask(strokes: StrokeSet, cfg: MaskConfig, rng: np.random.Generator,
              center_index: int | None = None) -> MaskPlan:
    n = len(strokes)
    if n == 0:
        raise EmptyStrokeSet("masking needs at least one stroke")
    mids = np.array([s.midpoint for s in strokes], dtype=np.float64)
    c = int(rng.integers(n)) if center_index is None else int(center_index)
    center = mids[c]
    dist = np.hypot(mids[:, 0] - center[0], mids[:, 1] - center[1])
    w, w_norm, p = discard_probabilities(dist, cfg.temperature, cfg.base_rate)
    z = rng.random(n) < p
    return MaskPlan(
        center_index=c,
        center=(float(center[0]), float(center[1])),
        midpoints=mids,
        distances=dist,
        weights=w,
        normalized_weights=w_norm,
        probabilities=p,
        outcomes=z,
    )


def apply_mask(glyph: BinaryGlyph, strokes: StrokeSet, coverages: Sequence[CoveragePolygon],
               plan: MaskPlan) -> BinaryGlyph:
    if not (len(strokes) == len(coverages) == len(plan.outcomes)):
        raise LengthMismatch(
            f"strokes ({len(strokes)}), coverages ({len(coverages)}) and plan "
            f"({len(plan.outcomes)}) must align"
        )
    erase = np.zeros_like(glyph.black_mask)
    for poly, z in zip(coverages, plan.outcomes):
        if z:
            erase |= polygon_mask(glyph, poly)
    return glyph.with_mask(glyph.black_mask & ~erase)


def valid_strokes_with_coverage(glyph: BinaryGlyph, strokes: StrokeSet,
                                cfg: RewardConfig | None = None) -> tuple[StrokeSet, list[CoveragePolygon]]:
    """Keep the strokes the reward accepts, paired with their coverage polygons."""
    rep = aggregate_reward(glyph, strokes, True, cfg or RewardConfig())
    kept = [(strokes[rec.index], rec.coverage.polygon) for rec in rep.per_stroke if rec.accepted]
    return StrokeSet(tuple(s for s, _ in kept), strokes.source_id), [p for _, p in kept]


def masking_trials(glyph: BinaryGlyph, strokes: StrokeSet, coverages: Sequence[CoveragePolygon],
                   cfg: MaskConfig) -> list[tuple[MaskPlan, BinaryGlyph]]:
    out = []
    for t in range(cfg.trials):
        plan = plan_mask(strokes, cfg, cfg.trial_rng(t))
        out.append((plan, apply_mask(glyph, strokes, coverages, plan)))
    return out
