"""Stroke sets, the textual stroke format, and JSON persistence.

The text format wraps one segment per line between delimiter lines::

    <strokes>
    (0.1000, 0.2000) -> (0.9000, 0.2000)
    </strokes>
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import TooFewPoints

OPEN_TAG = "<strokes>"
CLOSE_TAG = "</strokes>"
DEGENERATE_EPS = 1e-12

_NUM = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)"
_LINE_RE = re.compile(
    rf"^\(\s*({_NUM})\s*,\s*({_NUM})\s*\)\s*->\s*\(\s*({_NUM})\s*,\s*({_NUM})\s*\)$"
)

Point = tuple[float, float]


def _point(p) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite point {p!r}")
    return (x, y)


@dataclass(frozen=True)
class Stroke:
    p_s: Point
    p_e: Point

    def __post_init__(self):
        object.__setattr__(self, "p_s", _point(self.p_s))
        object.__setattr__(self, "p_e", _point(self.p_e))

    @property
    def length(self) -> float:
        return math.hypot(self.p_e[0] - self.p_s[0], self.p_e[1] - self.p_s[1])

    @property
    def is_degenerate(self) -> bool:
        return self.length <= DEGENERATE_EPS

    @property
    def midpoint(self) -> Point:
        return ((self.p_s[0] + self.p_e[0]) / 2.0, (self.p_s[1] + self.p_e[1]) / 2.0)


@dataclass(frozen=True)
class StrokeSet:
    strokes: tuple[Stroke, ...] = ()
    source_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "strokes", tuple(self.strokes))

    @property
    def n(self) -> int:
        return len(self.strokes)

    def __len__(self):
        return len(self.strokes)

    def __iter__(self):
        return iter(self.strokes)

    def __getitem__(self, i):
        return self.strokes[i]

    def appended(self, stroke: Stroke) -> "StrokeSet":
        return StrokeSet(self.strokes + (stroke,), self.source_id)

    @classmethod
    def from_pairs(cls, pairs: Iterable, source_id: str = "") -> "StrokeSet":
        return cls(tuple(Stroke(a, b) for a, b in pairs), source_id)


@dataclass(frozen=True)
class Polyline:
    points: tuple[Point, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(_point(p) for p in self.points))


def expand_polyline(pl: Polyline | Sequence) -> StrokeSet:
    """Split a chain of q points into its q - 1 consecutive segments."""
    points = pl.points if isinstance(pl, Polyline) else Polyline(tuple(pl)).points
    if len(points) < 2:
        raise TooFewPoints(f"a polyline needs at least 2 points, got {len(points)}")
    return StrokeSet(tuple(Stroke(a, b) for a, b in zip(points[:-1], points[1:])))


def _parse_line(line: str) -> Stroke | None:
    m = _LINE_RE.match(line)
    if m is None:
        return None
    x1, y1, x2, y2 = (float(g) for g in m.groups())
    return Stroke((x1, y1), (x2, y2))


def parse_stroke_output(text: str | bytes) -> tuple[StrokeSet, bool]:
    """Parse model output text; returns the strokes and whether the format is fully valid.

    On a malformed payload the longest parseable prefix of strokes is still
    returned so that the geometry can be scored.
    """
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8", errors="replace")
    lines = [ln.strip() for ln in text.splitlines()]
    try:
        start = lines.index(OPEN_TAG)
    except ValueError:
        return StrokeSet(), False

    strokes: list[Stroke] = []
    closed = False
    all_parsed = True
    for line in lines[start + 1:]:
        if line == CLOSE_TAG:
            closed = True
            break
        if not line:
            continue
        stroke = _parse_line(line)
        if stroke is None:
            all_parsed = False
            break
        strokes.append(stroke)

    ok = closed and all_parsed and len(strokes) > 0
    return StrokeSet(tuple(strokes)), ok


def serialize_stroke_set(s: StrokeSet) -> str:
    body = [
        f"({a[0]:.4f}, {a[1]:.4f}) -> ({b[0]:.4f}, {b[1]:.4f})"
        for a, b in ((st.p_s, st.p_e) for st in s.strokes)
    ]
    return "\n".join([OPEN_TAG, *body, CLOSE_TAG])


# -- JSON persistence --------------------------------------------------------

def stroke_set_to_dict(s: StrokeSet) -> dict:
    return {
        "source_id": s.source_id,
        "strokes": [[list(st.p_s), list(st.p_e)] for st in s.strokes],
    }


def stroke_set_from_dict(d: dict) -> StrokeSet:
    """Build a StrokeSet from its JSON form.

    Besides ``strokes`` (a list of ``[[x1, y1], [x2, y2]]`` pairs) an optional
    ``polylines`` list of point chains is accepted and expanded after them.
    """
    strokes = [Stroke(a, b) for a, b in d.get("strokes", [])]
    for chain in d.get("polylines", []):
        strokes.extend(expand_polyline(chain).strokes)
    return StrokeSet(tuple(strokes), str(d.get("source_id", "")))


def dumps_stroke_set(s: StrokeSet) -> str:
    return json.dumps(stroke_set_to_dict(s))


def loads_stroke_set(text: str) -> StrokeSet:
    return stroke_set_from_dict(json.loads(text))


def read_jsonl(text: str) -> list[StrokeSet]:
    return [loads_stroke_set(line) for line in text.splitlines() if line.strip()]


def write_jsonl(sets: Iterable[StrokeSet]) -> str:
    return "".join(dumps_stroke_set(s) + "\n" for s in sets)
