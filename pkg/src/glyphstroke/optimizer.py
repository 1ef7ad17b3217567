"""Greedy stroke placement that maximizes the stroke reward directly.

Each round proposes random chords of the foreground, keeps the one with the
largest marginal gain in ``r_s``, and nudges its endpoints pixel by pixel while
that keeps improving the reward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitmap import BinaryGlyph, black_at_many
from .errors import EmptyForeground
from .geometry import default_march_step, march_many
from .reward import RewardConfig, RewardReport, aggregate_reward, evaluate_stroke, stroke_reward
from .strokes import Stroke, StrokeSet

MAX_PROPOSAL_RETRIES = 8

_NEIGHBORS = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]


@dataclass(frozen=True)
class OptimizerConfig:
    max_strokes: int = 12
    candidates_per_round: int = 64
    min_gain: float | None = None  # None: use the reward's novelty threshold
    rng_seed: int = 0
    refine_steps: int = 8

    def __post_init__(self):
        if self.max_strokes < 1 or self.candidates_per_round < 1:
            raise ValueError("max_strokes and candidates_per_round must be >= 1")
        if self.min_gain is not None and self.min_gain < 0:
            raise ValueError("min_gain must be >= 0")
        if self.refine_steps < 0:
            raise ValueError("refine_steps must be >= 0")


def _pixel_center(glyph: BinaryGlyph, row: np.ndarray, col: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return (col + 0.5) / glyph.width, (row + 0.5) / glyph.height


def propose_candidates(glyph: BinaryGlyph, rng: np.random.Generator, count: int) -> list[Stroke]:
    """Random chords: from a uniformly drawn black pixel, walk in a random direction
    to the last black point before leaving the foreground; both ends snap to pixel centers.

    Proposals shorter than one pixel are redrawn up to ``MAX_PROPOSAL_RETRIES``
    times and then dropped, so fewer than ``count`` strokes may come back.
    """
    rows, cols = np.nonzero(glyph.black_mask)
    if rows.size == 0:
        raise EmptyForeground(source_id=glyph.source_id or None)
    step = default_march_step(glyph)
    out: list[Stroke | None] = [None] * count
    pending = np.arange(count)
    for _ in range(MAX_PROPOSAL_RETRIES + 1):
        if pending.size == 0:
            break
        k = pending.size
        pick = rng.integers(0, rows.size, size=k)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=k)
        sx, sy = _pixel_center(glyph, rows[pick], cols[pick])
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        d = march_many(glyph, np.stack([sx, sy], axis=1), dirs, step)
        ex = sx + d * dirs[:, 0]
        ey = sy + d * dirs[:, 1]
        ecol = np.minimum(np.floor(ex * glyph.width), glyph.width - 1).astype(int)
        erow = np.minimum(np.floor(ey * glyph.height), glyph.height - 1).astype(int)
        ex, ey = _pixel_center(glyph, erow, ecol)
        # Length in pixel units; anything under a pixel is the start pixel itself.
        plen = np.hypot((ex - sx) * glyph.width, (ey - sy) * glyph.height)
        ok = plen >= 1.0
        for slot, good, a, b, c, e in zip(pending, ok, sx, sy, ex, ey):
            if good:
                out[slot] = Stroke((float(a), float(b)), (float(c), float(e)))
        pending = pending[~ok]
    return [s for s in out if s is not None]


class _GreedyState:
    """Accepted strokes plus the covered-pixel union, for cheap marginal gains."""

    def __init__(self, glyph: BinaryGlyph, rcfg: RewardConfig):
        self.glyph = glyph
        self.rcfg = rcfg
        self.omega = glyph.black_count
        self.union = np.zeros_like(glyph.black_mask)
        self.covered = 0
        self.strokes: list[Stroke] = []

    @property
    def r_s(self) -> float:
        return stroke_reward(self.covered, self.omega, 0, self.rcfg.alpha)

    def gain(self, stroke: Stroke) -> tuple[float, np.ndarray | None]:
        """r_s(accepted + [stroke]) - r_s(accepted), as aggregate_reward would compute it."""
        ev = evaluate_stroke(self.glyph, stroke, self.rcfg)
        if ev.valid_geometric:
            novel = int(np.count_nonzero(ev.covered & ~self.union))
            if novel / self.omega >= self.rcfg.tau_novel:
                new = stroke_reward(self.covered + novel, self.omega, 0, self.rcfg.alpha)
                return new - self.r_s, ev.covered
        new = stroke_reward(self.covered, self.omega, 1, self.rcfg.alpha)
        return new - self.r_s, None

    def accept(self, stroke: Stroke, covered: np.ndarray) -> None:
        self.union |= covered
        self.covered = int(np.count_nonzero(self.union))
        self.strokes.append(stroke)


def _refine(state: _GreedyState, stroke: Stroke, gain: float, covered: np.ndarray, steps: int):
    g = state.glyph
    pw, ph = 1.0 / g.width, 1.0 / g.height
    for _ in range(steps):
        best = (gain, stroke, covered)
        for end in (0, 1):
            for dx, dy in _NEIGHBORS:
                p = stroke.p_s if end == 0 else stroke.p_e
                q = (p[0] + dx * pw, p[1] + dy * ph)
                if not black_at_many(g, np.array([q[0]]), np.array([q[1]]))[0]:
                    continue
                cand = Stroke(q, stroke.p_e) if end == 0 else Stroke(stroke.p_s, q)
                cg, ccov = state.gain(cand)
                if ccov is not None and cg > best[0]:
                    best = (cg, cand, ccov)
        if best[1] is stroke:
            break
        gain, stroke, covered = best
    return stroke, gain, covered


def greedy_fit(glyph: BinaryGlyph, ocfg: OptimizerConfig | None = None,
               rcfg: RewardConfig | None = None) -> tuple[StrokeSet, RewardReport]:
    ocfg = ocfg or OptimizerConfig()
    rcfg = rcfg or RewardConfig()
    if glyph.black_count == 0:
        raise EmptyForeground(source_id=glyph.source_id or None)
    min_gain = rcfg.tau_novel if ocfg.min_gain is None else ocfg.min_gain
    rng = np.random.default_rng(ocfg.rng_seed)
    state = _GreedyState(glyph, rcfg)

    while len(state.strokes) < ocfg.max_strokes:
        best_gain, best_stroke, best_cov = -math.inf, None, None
        for cand in propose_candidates(glyph, rng, ocfg.candidates_per_round):
            g, cov = state.gain(cand)
            if cov is not None and g > best_gain:
                best_gain, best_stroke, best_cov = g, cand, cov
        if best_stroke is None or best_gain <= 0 or best_gain < min_gain:
            break
        stroke, _, cov = _refine(state, best_stroke, best_gain, best_cov, ocfg.refine_steps)
        state.accept(stroke, cov)

    result = StrokeSet(tuple(state.strokes), glyph.source_id)
    return result, aggregate_reward(glyph, result, True, rcfg)
