"""Stroke-structure reward engine for binarized glyph bitmaps."""

__version__ = "0.1.0"

from .bitmap import BinaryGlyph, StructuralStats, is_black_at, load_and_binarize, structural_stats
from .geometry import CoveragePolygon, SampledStroke, march_to_boundary, polygon_region_intersection_area, sample_stroke
from .masking import MaskConfig, MaskPlan, apply_mask, plan_mask
from .matcher import MatchResult, PixelEmbedding, baseline_match, explore, pixel_embedding, remote_embedding
from .metrics import MetricsReport, evaluate_corpus
from .optimizer import OptimizerConfig, greedy_fit, propose_candidates
from .reward import RewardConfig, RewardReport, aggregate_reward, check_valid_stroke, estimate_coverage
from .strokes import Polyline, Stroke, StrokeSet, expand_polyline, parse_stroke_output, serialize_stroke_set
from .visualize import OverlaySpec, render_overlay

__all__ = [
    "BinaryGlyph", "StructuralStats", "is_black_at", "load_and_binarize", "structural_stats",
    "CoveragePolygon", "SampledStroke", "march_to_boundary", "polygon_region_intersection_area", "sample_stroke",
    "MaskConfig", "MaskPlan", "apply_mask", "plan_mask",
    "MatchResult", "PixelEmbedding", "baseline_match", "explore", "pixel_embedding", "remote_embedding",
    "MetricsReport", "evaluate_corpus",
    "OptimizerConfig", "greedy_fit", "propose_candidates",
    "RewardConfig", "RewardReport", "aggregate_reward", "check_valid_stroke", "estimate_coverage",
    "Polyline", "Stroke", "StrokeSet", "expand_polyline", "parse_stroke_output", "serialize_stroke_set",
    "OverlaySpec", "render_overlay",
]
