"""Stroke reward: validity filtering, per-stroke coverage polygons, sequential aggregation.

The total reward of a glyph is

    r_s = coverage_fraction * (1 - alpha * n_invalid)
    r   = r_s + beta * r_f

where ``coverage_fraction`` is the share of black pixels covered by the union
of accepted strokes' coverage polygons and ``r_f`` is 1 when the stroke text
parsed cleanly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .bitmap import BinaryGlyph, black_at_many
from .errors import EmptyForeground, PreconditionViolated
from .geometry import (
    CoveragePolygon,
    SampledStroke,
    StrokeFrame,
    default_march_step,
    march_many,
    polygon_mask,
    sample_stroke,
    stroke_frame,
)
from .strokes import Point, Stroke, StrokeSet


@dataclass(frozen=True)
class RewardConfig:
    D: float = 0.05
    lam: float = 1.3
    alpha: float = 0.1
    beta: float = 0.125
    tau_novel: float = 0.005
    march_step: float | None = None  # None: quarter pixel of the glyph being scored

    def __post_init__(self):
        if not self.D > 0:
            raise ValueError("D must be > 0")
        if not self.lam > 1:
            raise ValueError("lambda must be > 1")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")
        if not 0 <= self.tau_novel < 1:
            raise ValueError("tau_novel must lie in [0, 1)")
        if self.march_step is not None and not self.march_step > 0:
            raise ValueError("march_step must be > 0")

    def step_for(self, glyph: BinaryGlyph) -> float:
        return self.march_step if self.march_step is not None else default_march_step(glyph)


@dataclass(frozen=True)
class StrokeCoverage:
    """Geometry of one stroke's coverage estimate.

    Per-sample arrays are ordered along the stroke: index 0 is ``p_s``, the last
    index is ``p_e``, interior samples in between.
    """

    frame: StrokeFrame
    sample_points: np.ndarray
    raw_plus: np.ndarray
    raw_minus: np.ndarray
    mean_ext: float
    abnormal: tuple[int, ...]
    refined_mean: float
    trunc_plus: np.ndarray
    trunc_minus: np.ndarray
    tangential: tuple[float, float]
    extended_endpoints: tuple[Point, Point]
    offsets_plus: np.ndarray
    offsets_minus: np.ndarray
    polygon: CoveragePolygon

    def to_dict(self) -> dict:
        return {
            "tangent": list(self.frame.t),
            "normal": list(self.frame.n),
            "sample_points": self.sample_points.tolist(),
            "raw_extensions": np.stack([self.raw_plus, self.raw_minus], axis=1).tolist(),
            "mean_ext": self.mean_ext,
            "abnormal": list(self.abnormal),
            "refined_mean": self.refined_mean,
            "truncated_extensions": np.stack([self.trunc_plus, self.trunc_minus], axis=1).tolist(),
            "tangential": list(self.tangential),
            "extended_endpoints": [list(p) for p in self.extended_endpoints],
            "polygon": [list(v) for v in self.polygon.vertices],
        }


def check_valid_stroke(glyph: BinaryGlyph, stroke: Stroke, cfg: RewardConfig) -> tuple[bool, SampledStroke | None]:
    """A stroke is valid when both endpoints and every interior sample are black."""
    if stroke.is_degenerate:
        return False, None
    sampled = sample_stroke(stroke, cfg.D)
    pts = sampled.chain()
    ok = bool(black_at_many(glyph, pts[:, 0], pts[:, 1]).all())
    return ok, sampled


def estimate_coverage(glyph: BinaryGlyph, sampled: SampledStroke, cfg: RewardConfig) -> StrokeCoverage:
    pts = sampled.chain()
    if not black_at_many(glyph, pts[:, 0], pts[:, 1]).all():
        raise PreconditionViolated("coverage requires every sample point to be black")
    frame = stroke_frame(sampled.stroke)
    t = np.asarray(frame.t)
    n = np.asarray(frame.n)
    step = cfg.step_for(glyph)
    k = len(pts)

    origins = np.concatenate([pts, pts])
    dirs = np.concatenate([np.tile(n, (k, 1)), np.tile(-n, (k, 1))])
    d = march_many(glyph, origins, dirs, step)
    d_plus, d_minus = d[:k], d[k:]

    mean_ext = float((d_plus.sum() + d_minus.sum()) / (2 * k))
    abnormal_mask = np.maximum(d_plus, d_minus) > cfg.lam * mean_ext
    keep = ~abnormal_mask
    if keep.any():
        refined = float((d_plus[keep].sum() + d_minus[keep].sum()) / (2 * int(keep.sum())))
    else:
        refined = mean_ext
    cap = cfg.lam * refined
    tp = np.minimum(d_plus, cap)
    tm = np.minimum(d_minus, cap)

    l_s = float((tp[0] + tm[0]) / 2)
    l_e = float((tp[-1] + tm[-1]) / 2)
    p_s = pts[0] - l_s * t
    p_e = pts[-1] + l_e * t
    q_plus = pts + tp[:, None] * n
    q_minus = pts - tm[:, None] * n

    verts = np.concatenate([p_s[None], q_plus, p_e[None], q_minus[::-1]])
    return StrokeCoverage(
        frame=frame,
        sample_points=pts,
        raw_plus=d_plus,
        raw_minus=d_minus,
        mean_ext=mean_ext,
        abnormal=tuple(int(i) for i in np.nonzero(abnormal_mask)[0]),
        refined_mean=refined,
        trunc_plus=tp,
        trunc_minus=tm,
        tangential=(l_s, l_e),
        extended_endpoints=((float(p_s[0]), float(p_s[1])), (float(p_e[0]), float(p_e[1]))),
        offsets_plus=q_plus,
        offsets_minus=q_minus,
        polygon=CoveragePolygon(tuple(map(tuple, verts))),
    )


@dataclass
class StrokeEval:
    """Standalone evaluation of one stroke against a glyph (no aggregation)."""

    stroke: Stroke
    valid_geometric: bool
    sampled: SampledStroke | None = None
    coverage: StrokeCoverage | None = None
    covered: np.ndarray | None = None  # polygon mask restricted to black pixels


def evaluate_stroke(glyph: BinaryGlyph, stroke: Stroke, cfg: RewardConfig) -> StrokeEval:
    valid, sampled = check_valid_stroke(glyph, stroke, cfg)
    if not valid:
        return StrokeEval(stroke, False, sampled)
    cov = estimate_coverage(glyph, sampled, cfg)
    covered = polygon_mask(glyph, cov.polygon) & glyph.black_mask
    return StrokeEval(stroke, True, sampled, cov, covered)


@dataclass
class StrokeRecord:
    index: int
    valid_geometric: bool
    valid_novelty: bool | None  # None when the geometric test already failed
    novelty_ratio: float | None = None
    coverage: StrokeCoverage | None = None

    @property
    def accepted(self) -> bool:
        return self.valid_geometric and bool(self.valid_novelty)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "valid_geometric": self.valid_geometric,
            "valid_novelty": self.valid_novelty,
            "novelty_ratio": self.novelty_ratio,
            "coverage": self.coverage.to_dict() if self.coverage is not None else None,
        }


@dataclass
class RewardReport:
    per_stroke: list[StrokeRecord]
    n_invalid: int
    final_coverage_pixels: int
    omega_b_pixels: int
    r_s: float
    r_f: float
    r: float
    n_strokes: int = 0
    covered_mask: np.ndarray | None = field(default=None, repr=False)

    @property
    def coverage_fraction(self) -> float:
        return self.final_coverage_pixels / self.omega_b_pixels

    @property
    def n_accepted(self) -> int:
        return sum(1 for rec in self.per_stroke if rec.accepted)

    def accepted_polygons(self) -> list[CoveragePolygon]:
        return [rec.coverage.polygon for rec in self.per_stroke if rec.accepted]

    def to_dict(self) -> dict:
        return {
            "n_strokes": self.n_strokes,
            "n_invalid": self.n_invalid,
            "final_coverage_pixels": self.final_coverage_pixels,
            "omega_b_pixels": self.omega_b_pixels,
            "coverage": self.coverage_fraction,
            "r_s": self.r_s,
            "r_f": self.r_f,
            "r": self.r,
            "per_stroke": [rec.to_dict() for rec in self.per_stroke],
        }


def stroke_reward(coverage_pixels: int, omega_b_pixels: int, n_invalid: int, alpha: float) -> float:
    return coverage_pixels / omega_b_pixels * (1.0 - alpha * n_invalid)


def aggregate_reward(glyph: BinaryGlyph, strokes: StrokeSet, format_ok: bool, cfg: RewardConfig | None = None) -> RewardReport:
    """Score a stroke set against a glyph, processing strokes in order.

    Each geometrically valid stroke must add at least ``tau_novel`` of the
    foreground beyond the strokes accepted before it; otherwise it is counted
    invalid and its polygon is dropped.
    """
    cfg = cfg or RewardConfig()
    omega = glyph.black_count
    if omega == 0:
        raise EmptyForeground(source_id=glyph.source_id or None)

    union = np.zeros_like(glyph.black_mask)
    records: list[StrokeRecord] = []
    n_invalid = 0
    for i, stroke in enumerate(strokes):
        ev = evaluate_stroke(glyph, stroke, cfg)
        if not ev.valid_geometric:
            records.append(StrokeRecord(i, False, None))
            n_invalid += 1
            continue
        novel = int(np.count_nonzero(ev.covered & ~union))
        ratio = novel / omega
        if ratio < cfg.tau_novel:
            records.append(StrokeRecord(i, True, False, ratio, ev.coverage))
            n_invalid += 1
            continue
        union |= ev.covered
        records.append(StrokeRecord(i, True, True, ratio, ev.coverage))

    covered = int(np.count_nonzero(union))
    r_s = stroke_reward(covered, omega, n_invalid, cfg.alpha)
    r_f = 1.0 if format_ok else 0.0
    return RewardReport(
        per_stroke=records,
        n_invalid=n_invalid,
        final_coverage_pixels=covered,
        omega_b_pixels=omega,
        r_s=r_s,
        r_f=r_f,
        r=r_s + cfg.beta * r_f,
        n_strokes=len(strokes),
        covered_mask=union,
    )


def config_to_dict(cfg: RewardConfig) -> dict:
    d = asdict(cfg)
    d["lambda"] = d.pop("lam")
    return d
