"""SVG overlays of strokes, coverage polygons and a coordinate grid on a glyph bitmap."""

from __future__ import annotations

import base64
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .bitmap import BinaryGlyph
from .reward import RewardReport
from .strokes import StrokeSet

SVG_NS = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class OverlaySpec:
    show_strokes: bool = True
    show_polygons: bool = True
    show_grid: bool = False
    grid_divisions: int = 10
    stroke_color: str = "#1f4fff"
    polygon_color: str = "#22aa44"
    invalid_color: str = "#e02020"
    grid_color: str = "#999999"

    def __post_init__(self):
        if self.show_grid and self.grid_divisions < 1:
            raise ValueError("grid_divisions must be >= 1")


def _report_view(report) -> list[tuple[bool, list | None]]:
    """(accepted, polygon vertices) per stroke, from a RewardReport or its JSON dict."""
    if report is None:
        return []
    if isinstance(report, RewardReport):
        return [(rec.accepted, list(rec.coverage.polygon.vertices) if rec.coverage else None)
                for rec in report.per_stroke]
    out = []
    for rec in report.get("per_stroke", []):
        accepted = bool(rec.get("valid_geometric")) and bool(rec.get("valid_novelty"))
        cov = rec.get("coverage")
        out.append((accepted, cov.get("polygon") if cov else None))
    return out


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".") or "0"


def render_overlay(glyph: BinaryGlyph, report, strokes: StrokeSet, spec: OverlaySpec | None = None) -> str:
    """SVG text whose viewBox is the glyph's pixel frame (pixel (0, 0) at the top left)."""
    spec = spec or OverlaySpec()
    W, H = glyph.width, glyph.height
    lw = max(W, H) / 200.0
    ET.register_namespace("", SVG_NS)
    svg = ET.Element(f"{{{SVG_NS}}}svg", {
        "width": str(W), "height": str(H), "viewBox": f"0 0 {W} {H}", "version": "1.1",
    })
    png = base64.b64encode(glyph.to_png_bytes()).decode("ascii")
    ET.SubElement(svg, f"{{{SVG_NS}}}image", {
        "x": "0", "y": "0", "width": str(W), "height": str(H),
        "href": f"data:image/png;base64,{png}",
        "style": "image-rendering:pixelated", "preserveAspectRatio": "none",
    })
    view = _report_view(report)

    if spec.show_grid:
        g = ET.SubElement(svg, f"{{{SVG_NS}}}g", {"class": "grid"})
        n = spec.grid_divisions
        for i in range(n + 1):
            x = W * i / n
            ET.SubElement(g, f"{{{SVG_NS}}}line", {
                "x1": _fmt(x), "y1": "0", "x2": _fmt(x), "y2": str(H),
                "stroke": spec.grid_color, "stroke-width": _fmt(lw / 2),
            })
        for i in range(n + 1):
            y = H * i / n
            ET.SubElement(g, f"{{{SVG_NS}}}line", {
                "x1": "0", "y1": _fmt(y), "x2": str(W), "y2": _fmt(y),
                "stroke": spec.grid_color, "stroke-width": _fmt(lw / 2),
            })
        fs = _fmt(max(W, H) / 40.0)
        for i in range(n + 1):
            label = _fmt(i / n)
            t = ET.SubElement(g, f"{{{SVG_NS}}}text", {
                "x": _fmt(W * i / n), "y": fs, "font-size": fs, "fill": spec.grid_color})
            t.text = label
            t = ET.SubElement(g, f"{{{SVG_NS}}}text", {
                "x": "0", "y": _fmt(H * i / n), "font-size": fs, "fill": spec.grid_color})
            t.text = label

    if spec.show_polygons:
        g = ET.SubElement(svg, f"{{{SVG_NS}}}g", {"class": "coverage"})
        for accepted, verts in view:
            if not accepted or not verts:
                continue
            d = "M " + " L ".join(f"{_fmt(x * W)} {_fmt(y * H)}" for x, y in verts) + " Z"
            ET.SubElement(g, f"{{{SVG_NS}}}path", {
                "d": d, "fill": spec.polygon_color, "fill-opacity": "0.3",
                "stroke": spec.polygon_color, "stroke-width": _fmt(lw / 2), "fill-rule": "evenodd",
            })

    if spec.show_strokes:
        g = ET.SubElement(svg, f"{{{SVG_NS}}}g", {"class": "strokes"})
        for i, s in enumerate(strokes):
            bad = i < len(view) and not view[i][0]
            ET.SubElement(g, f"{{{SVG_NS}}}line", {
                "x1": _fmt(s.p_s[0] * W), "y1": _fmt(s.p_s[1] * H),
                "x2": _fmt(s.p_e[0] * W), "y2": _fmt(s.p_e[1] * H),
                "stroke": spec.invalid_color if bad else spec.stroke_color,
                "stroke-width": _fmt(lw), "stroke-linecap": "round",
            })

    return ET.tostring(svg, encoding="unicode", xml_declaration=False)
