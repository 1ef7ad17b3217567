"""Synthetic glyphs for tests and experiments: thick polylines, bars, crosses, triangles."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .bitmap import BinaryGlyph


def render_polylines(chains: Sequence[Sequence[tuple[float, float]]], size: int, width_px: float,
                     height: int | None = None, source_id: str = "") -> BinaryGlyph:
    """Rasterize chains of normalized points as round-capped strokes of ``width_px`` pixels.

    A pixel is black when its center is within ``width_px / 2`` pixels of some segment.
    """
    H = height or size
    W = size
    cx = np.arange(W) + 0.5
    cy = np.arange(H) + 0.5
    px, py = np.meshgrid(cx, cy)
    mask = np.zeros((H, W), dtype=bool)
    r2 = (width_px / 2.0) ** 2
    for chain in chains:
        pts = [(x * W, y * H) for x, y in chain]
        if len(pts) == 1:
            pts = pts * 2
        for (x1, y1), (x2, y2) in zip(pts[:-1], pts[1:]):
            dx, dy = x2 - x1, y2 - y1
            L2 = dx * dx + dy * dy
            if L2 == 0:
                t = np.zeros_like(px)
            else:
                t = np.clip(((px - x1) * dx + (py - y1) * dy) / L2, 0.0, 1.0)
            qx = x1 + t * dx
            qy = y1 + t * dy
            mask |= (px - qx) ** 2 + (py - qy) ** 2 <= r2
    return BinaryGlyph(mask, source_id)


def rect_glyph(size: int, x0: float, y0: float, x1: float, y1: float, height: int | None = None,
               source_id: str = "") -> BinaryGlyph:
    """Axis-aligned filled rectangle; pixels whose centers fall in [x0, x1) x [y0, y1)."""
    H = height or size
    xs = (np.arange(size) + 0.5) / size
    ys = (np.arange(H) + 0.5) / H
    mask = ((ys >= y0) & (ys < y1))[:, None] & ((xs >= x0) & (xs < x1))[None, :]
    return BinaryGlyph(mask, source_id)


def horizontal_bar(size: int, y_center: float = 0.5, half_width: float = 0.05,
                   x0: float = 0.1, x1: float = 0.9) -> BinaryGlyph:
    return rect_glyph(size, x0, y_center - half_width, x1, y_center + half_width, source_id="hbar")


def plus_sign(size: int, half_width: float = 0.05, lo: float = 0.1, hi: float = 0.9,
              arm_hi: float | None = None) -> BinaryGlyph:
    """Two crossing bars; ``arm_hi`` shortens the right arm of the horizontal bar."""
    h = rect_glyph(size, lo, 0.5 - half_width, arm_hi if arm_hi is not None else hi, 0.5 + half_width)
    v = rect_glyph(size, 0.5 - half_width, lo, 0.5 + half_width, hi)
    return BinaryGlyph(h.black_mask | v.black_mask, "plus")


def ring(size: int, radius: float = 0.35, width_px: float = 6.0) -> BinaryGlyph:
    c = (np.arange(size) + 0.5) / size
    x, y = np.meshgrid(c, c)
    dist = np.hypot(x - 0.5, y - 0.5) * size
    return BinaryGlyph(np.abs(dist - radius * size) <= width_px / 2.0, "ring")


def synthetic_suite(size: int = 128, seed: int = 0, count: int = 20) -> list[tuple[str, BinaryGlyph]]:
    """Bars, crosses, triangles and 3-6 segment polylines drawn 4-8 px wide."""
    rng = np.random.default_rng(seed)
    kinds = ["bar", "cross", "triangle", "polyline"]
    out = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        width = float(rng.uniform(4.0, 8.0))
        if kind == "bar":
            a = rng.uniform(0, math.pi)
            L = rng.uniform(0.5, 0.8)
            c = rng.uniform(0.4, 0.6, size=2)
            d = np.array([math.cos(a), math.sin(a)]) * L / 2
            chains = [[tuple(c - d), tuple(c + d)]]
        elif kind == "cross":
            a = rng.uniform(0, math.pi)
            b = a + rng.uniform(math.pi / 4, 3 * math.pi / 4)
            c = rng.uniform(0.4, 0.6, size=2)
            chains = []
            for ang in (a, b):
                d = np.array([math.cos(ang), math.sin(ang)]) * rng.uniform(0.25, 0.38)
                chains.append([tuple(c - d), tuple(c + d)])
        elif kind == "triangle":
            c = rng.uniform(0.45, 0.55, size=2)
            r = rng.uniform(0.25, 0.38)
            a0 = rng.uniform(0, 2 * math.pi)
            angs = a0 + np.array([0, 2 * math.pi / 3, 4 * math.pi / 3]) + rng.uniform(-0.3, 0.3, size=3)
            verts = [tuple(c + r * np.array([math.cos(t), math.sin(t)])) for t in angs]
            chains = [verts + [verts[0]]]
        else:
            nseg = int(rng.integers(3, 7))
            pts = [rng.uniform(0.15, 0.85, size=2)]
            tries = 0
            while len(pts) < nseg + 1:
                tries += 1
                if tries > 200:  # boxed into a corner; start the chain over
                    pts, tries = [rng.uniform(0.15, 0.85, size=2)], 0
                cand = rng.uniform(0.12, 0.88, size=2)
                seg = cand - pts[-1]
                if not 0.2 <= np.hypot(*seg) <= 0.6:
                    continue
                if len(pts) >= 2:
                    prev = pts[-1] - pts[-2]
                    cosang = float(seg @ prev) / (np.hypot(*seg) * np.hypot(*prev))
                    if cosang < -0.5:  # avoid folding back onto the previous segment
                        continue
                pts.append(cand)
            chains = [[tuple(p) for p in pts]]
        chains = [[(float(x), float(y)) for x, y in ch] for ch in chains]
        name = f"{kind}_{i:02d}"
        out.append((name, render_polylines(chains, size, width, source_id=name)))
    return out
