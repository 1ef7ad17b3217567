"""Corpus-level evaluation metrics (RE, CO, IS, CS, TS)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from .bitmap import BinaryGlyph
from .errors import EmptyCorpus, EmptyForeground
from .reward import RewardConfig, RewardReport, aggregate_reward
from .strokes import StrokeSet


@dataclass(frozen=True)
class MetricsReport:
    re: float  # mean total reward r
    re_s: float  # mean stroke reward r_s (no format term)
    co: float  # mean % of foreground covered
    is_pct: float  # % invalid strokes
    cs: float  # coverage % per accepted stroke
    ts: float  # mean strokes per sample
    n_samples: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SampleSummary:
    """The handful of numbers each RewardReport contributes to the corpus metrics."""

    r: float
    r_s: float
    co: float
    n_strokes: int
    n_invalid: int
    n_accepted: int

    @classmethod
    def from_report(cls, rep: RewardReport) -> "SampleSummary":
        return cls(
            r=rep.r,
            r_s=rep.r_s,
            co=100.0 * rep.final_coverage_pixels / rep.omega_b_pixels,
            n_strokes=rep.n_strokes,
            n_invalid=rep.n_invalid,
            n_accepted=rep.n_accepted,
        )


def summarize(samples: Sequence[SampleSummary], is_mode: str = "corpus") -> MetricsReport:
    """Reduce per-sample summaries; the result does not depend on sample order.

    Float sums use ``math.fsum`` (correctly rounded), so any permutation of the
    samples gives bit-identical metrics.
    """
    n = len(samples)
    if n == 0:
        raise EmptyCorpus("corpus has no samples")
    total_strokes = sum(s.n_strokes for s in samples)
    total_invalid = sum(s.n_invalid for s in samples)
    total_accepted = sum(s.n_accepted for s in samples)

    co = math.fsum(s.co for s in samples) / n
    if is_mode == "corpus":
        is_pct = 100.0 * total_invalid / total_strokes if total_strokes else 0.0
    elif is_mode == "sample":
        is_pct = math.fsum(100.0 * s.n_invalid / s.n_strokes if s.n_strokes else 0.0 for s in samples) / n
    else:
        raise ValueError(f"unknown is_mode {is_mode!r}")
    mean_accepted = total_accepted / n
    cs = co / mean_accepted if total_accepted else 0.0
    return MetricsReport(
        re=math.fsum(s.r for s in samples) / n,
        re_s=math.fsum(s.r_s for s in samples) / n,
        co=co,
        is_pct=is_pct,
        cs=cs,
        ts=total_strokes / n,
        n_samples=n,
    )


def evaluate_corpus(
    pairs: Iterable[tuple[BinaryGlyph, StrokeSet, bool]],
    cfg: RewardConfig | None = None,
    is_mode: str = "corpus",
) -> MetricsReport:
    cfg = cfg or RewardConfig()
    samples = []
    for i, (glyph, strokes, format_ok) in enumerate(pairs):
        try:
            rep = aggregate_reward(glyph, strokes, format_ok, cfg)
        except EmptyForeground as exc:
            raise EmptyForeground(source_id=glyph.source_id or f"sample {i}") from exc
        samples.append(SampleSummary.from_report(rep))
    return summarize(samples, is_mode)
