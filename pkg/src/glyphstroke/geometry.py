"""Geometric kernel: stroke sampling, stroke frames, ray marching, polygon rasterization.

All coordinates are normalized (see :mod:`glyphstroke.bitmap`). Polygon areas
are measured on the discrete pixel grid: a pixel is inside a polygon when its
center is, under the even-odd rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bitmap import BinaryGlyph, black_at_many, is_black_at
from .errors import DegenerateStroke, OriginNotBlack
from .strokes import Point, Stroke

_MARCH_CHUNK = 32


@dataclass(frozen=True)
class SampledStroke:
    """A stroke with its interior sample points.

    ``interior_points[i - 1]`` is ``(i * p_s + (m + 1 - i) * p_e) / (m + 1)``, so
    the first interior point sits next to ``p_e``. Use :meth:`chain` for the
    points ordered from ``p_s`` to ``p_e``.
    """

    stroke: Stroke
    interior_points: tuple[Point, ...]
    m: int
    spacing: float

    def chain(self) -> np.ndarray:
        """All m + 2 points ordered along the stroke: p_s, interior (reversed), p_e."""
        pts = [self.stroke.p_s, *reversed(self.interior_points), self.stroke.p_e]
        return np.asarray(pts, dtype=np.float64)


@dataclass(frozen=True)
class StrokeFrame:
    t: Point
    n: Point


@dataclass(frozen=True)
class CoveragePolygon:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise ValueError("a coverage polygon needs at least 3 vertices")
        object.__setattr__(self, "vertices", verts)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=np.float64)


def sample_count(length: float, D: float) -> int:
    """Smallest m >= 0 with ``length / (m + 1) < D``."""
    m = max(int(math.floor(length / D)), 0)
    # Guard the floor against rounding in length / D.
    while length / (m + 1) >= D:
        m += 1
    while m > 0 and length / m < D:
        m -= 1
    return m


def sample_stroke(stroke: Stroke, D: float) -> SampledStroke:
    if D <= 0:
        raise ValueError("D must be positive")
    if stroke.is_degenerate:
        raise DegenerateStroke(f"stroke endpoints coincide: {stroke.p_s}")
    length = stroke.length
    m = sample_count(length, D)
    (sx, sy), (ex, ey) = stroke.p_s, stroke.p_e
    k = m + 1
    pts = tuple(((i * sx + (k - i) * ex) / k, (i * sy + (k - i) * ey) / k) for i in range(1, m + 1))
    return SampledStroke(stroke=stroke, interior_points=pts, m=m, spacing=length / k)


def stroke_frame(stroke: Stroke) -> StrokeFrame:
    if stroke.is_degenerate:
        raise DegenerateStroke(f"tangent undefined for zero-length stroke at {stroke.p_s}")
    dx = stroke.p_e[0] - stroke.p_s[0]
    dy = stroke.p_e[1] - stroke.p_s[1]
    norm = math.hypot(dx, dy)
    tx, ty = dx / norm, dy / norm
    return StrokeFrame(t=(tx, ty), n=(-ty, tx))


def default_march_step(glyph: BinaryGlyph) -> float:
    """A quarter of the larger pixel pitch."""
    return 0.25 / max(glyph.width, glyph.height)


def march_many(glyph: BinaryGlyph, origins: np.ndarray, dirs: np.ndarray, step: float) -> np.ndarray:
    """Vectorized march: for each ray, the largest ``k * step`` whose test points are all black.

    Origins are assumed black (callers check). Test points are
    ``origin + (j * step) * dir`` for ``j = 0, 1, ...``; leaving the unit square
    counts as white, so every ray terminates.
    """
    origins = np.asarray(origins, dtype=np.float64).reshape(-1, 2)
    dirs = np.asarray(dirs, dtype=np.float64).reshape(-1, 2)
    n = origins.shape[0]
    first_white = np.full(n, -1, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    j0 = 0
    while alive.any():
        idx = np.nonzero(alive)[0]
        js = np.arange(j0, j0 + _MARCH_CHUNK, dtype=np.float64)
        offs = js * step
        xs = origins[idx, 0:1] + offs[None, :] * dirs[idx, 0:1]
        ys = origins[idx, 1:2] + offs[None, :] * dirs[idx, 1:2]
        white = ~black_at_many(glyph, xs, ys)
        hit = white.any(axis=1)
        first = np.argmax(white, axis=1)
        done = idx[hit]
        first_white[done] = j0 + first[hit]
        alive[done] = False
        j0 += _MARCH_CHUNK
    k = np.maximum(first_white - 1, 0)
    return k.astype(np.float64) * step


def march_to_boundary(glyph: BinaryGlyph, origin, dir, step: float) -> float:
    if step <= 0:
        raise ValueError("step must be positive")
    if not is_black_at(glyph, origin):
        raise OriginNotBlack(f"ray origin {tuple(origin)} is not on a black pixel")
    return float(march_many(glyph, np.asarray([origin]), np.asarray([dir]), step)[0])


def polygon_mask(glyph: BinaryGlyph, poly: CoveragePolygon | np.ndarray) -> np.ndarray:
    """Boolean (H, W) grid of pixels whose center lies inside ``poly`` (even-odd rule).

    Works row by row: each edge crossing a row's center line toggles the parity
    of every pixel center strictly left of the crossing. The toggles are
    accumulated in a difference array, so the cost is one pass over the edges
    plus one cumulative sum over the polygon's bounding rows.
    """
    verts = poly.array if isinstance(poly, CoveragePolygon) else np.asarray(poly, dtype=np.float64)
    H, W = glyph.height, glyph.width
    out = np.zeros((H, W), dtype=bool)
    if len(verts) < 3 or not np.isfinite(verts).all():
        return out
    ys_all = verts[:, 1]
    r0 = max(int(math.floor(ys_all.min() * H - 0.5)), 0)
    r1 = min(int(math.ceil(ys_all.max() * H - 0.5)), H - 1)
    if r1 < r0:
        return out
    row_y = (np.arange(r0, r1 + 1) + 0.5) / H
    col_x = (np.arange(W) + 0.5) / W
    diff = np.zeros((r1 - r0 + 1, W + 1), dtype=np.int32)

    a = verts
    b = np.roll(verts, -1, axis=0)
    for (x1, y1), (x2, y2) in zip(a, b):
        if y1 == y2:
            continue
        crosses = (y1 > row_y) != (y2 > row_y)
        if not crosses.any():
            continue
        rows = np.nonzero(crosses)[0]
        yr = row_y[rows]
        xint = x1 + (yr - y1) * (x2 - x1) / (y2 - y1)
        ncols = np.searchsorted(col_x, xint, side="left")
        np.add.at(diff, (rows, np.zeros_like(rows)), 1)
        np.add.at(diff, (rows, ncols), -1)
    parity = np.cumsum(diff[:, :W], axis=1) & 1
    out[r0:r1 + 1] = parity.astype(bool)
    return out


def union_mask(glyph: BinaryGlyph, polys: Iterable[CoveragePolygon]) -> np.ndarray:
    out = np.zeros((glyph.height, glyph.width), dtype=bool)
    for p in polys:
        out |= polygon_mask(glyph, p)
    return out


def polygon_region_intersection_area(glyph: BinaryGlyph, polys: Sequence[CoveragePolygon]) -> int:
    """Number of black pixels whose center lies in the union of ``polys``."""
    if not polys:
        return 0
    return int(np.count_nonzero(union_mask(glyph, polys) & glyph.black_mask))
