import json
import xml.etree.ElementTree as ET

import pytest

from glyphstroke.reward import aggregate_reward
from glyphstroke.strokes import StrokeSet
from glyphstroke.synthetic import horizontal_bar, plus_sign
from glyphstroke.visualize import OverlaySpec, render_overlay

NS = "{http://www.w3.org/2000/svg}"


def _parse(text):
    return ET.fromstring(text)


def _lines(root, group):
    return root.findall(f".//{NS}g[@class='{group}']/{NS}line")


def test_grid_line_count():
    root = _parse(render_overlay(plus_sign(64), None, StrokeSet(), OverlaySpec(show_grid=True, grid_divisions=10)))
    assert len(_lines(root, "grid")) == 22
    assert len(root.findall(f".//{NS}line")) == 22


def test_grid_off_by_default():
    root = _parse(render_overlay(plus_sign(64), None, StrokeSet()))
    assert root.find(f".//{NS}g[@class='grid']") is None


def test_grid_divisions_validated():
    with pytest.raises(ValueError):
        OverlaySpec(show_grid=True, grid_divisions=0)


def test_single_valid_stroke():
    g = horizontal_bar(64)
    s = StrokeSet.from_pairs([((0.2, 0.5), (0.8, 0.5))])
    spec = OverlaySpec()
    root = _parse(render_overlay(g, aggregate_reward(g, s, True), s, spec))
    lines = _lines(root, "strokes")
    paths = root.findall(f".//{NS}path")
    assert len(lines) == 1 and lines[0].get("stroke") == spec.stroke_color
    assert len(paths) == 1 and paths[0].get("fill") == spec.polygon_color


def test_invalid_stroke_colored():
    g = horizontal_bar(64)
    s = StrokeSet.from_pairs([((0.2, 0.5), (0.8, 0.5)), ((0.2, 0.5), (0.8, 0.5)), ((0.1, 0.1), (0.3, 0.1))])
    spec = OverlaySpec()
    rep = aggregate_reward(g, s, True)
    root = _parse(render_overlay(g, rep, s, spec))
    colors = [ln.get("stroke") for ln in _lines(root, "strokes")]
    assert colors == [spec.stroke_color, spec.invalid_color, spec.invalid_color]
    assert len(root.findall(f".//{NS}path")) == 1

    # The JSON form of the report renders the same way.
    again = render_overlay(g, json.loads(json.dumps(rep.to_dict())), s, spec)
    assert again == render_overlay(g, rep, s, spec)


def test_viewbox_and_coordinates():
    g = horizontal_bar(80)
    s = StrokeSet.from_pairs([((0.25, 0.5), (0.75, 0.5))])
    root = _parse(render_overlay(g, None, s))
    assert root.get("viewBox") == "0 0 80 80"
    ln = _lines(root, "strokes")[0]
    assert (ln.get("x1"), ln.get("y1"), ln.get("x2")) == ("20", "40", "60")
    img = root.find(f"{NS}image")
    assert img.get("href").startswith("data:image/png;base64,")


def test_non_square():
    from glyphstroke.synthetic import rect_glyph

    g = rect_glyph(40, 0.1, 0.1, 0.9, 0.9, height=20)
    root = _parse(render_overlay(g, None, StrokeSet.from_pairs([((0.5, 0.5), (0.5, 1.0))]), OverlaySpec(show_grid=True, grid_divisions=4)))
    assert root.get("viewBox") == "0 0 40 20"
    assert _lines(root, "strokes")[0].get("y2") == "20"
