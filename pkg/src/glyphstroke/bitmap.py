"""Binarized glyph bitmaps and corpus structural statistics.

A glyph lives in a normalized frame: x in [0, 1] runs left to right and
y in [0, 1] runs top to bottom. Pixel ``(col, row)`` owns the half-open
rectangle ``[col/W, (col+1)/W) x [row/H, (row+1)/H)``; the closing edges
``x = 1`` and ``y = 1`` belong to the last column and row.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .errors import DecodeError, EmptyImage

DEFAULT_THRESHOLD = 128

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True, eq=False)
class BinaryGlyph:
    """Immutable boolean bitmap; ``black_mask[row, col]`` is True on foreground."""

    black_mask: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        mask = np.array(self.black_mask, dtype=bool, copy=True)
        if mask.ndim != 2 or mask.shape[0] < 1 or mask.shape[1] < 1:
            raise EmptyImage(f"glyph mask must be a nonempty 2-D grid, got shape {mask.shape}")
        mask.setflags(write=False)
        object.__setattr__(self, "black_mask", mask)

    @property
    def width(self) -> int:
        return self.black_mask.shape[1]

    @property
    def height(self) -> int:
        return self.black_mask.shape[0]

    @property
    def black_count(self) -> int:
        return int(self.black_mask.sum())

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Normalized (x, y) coordinates of every pixel center, each shaped (H, W)."""
        xs = (np.arange(self.width) + 0.5) / self.width
        ys = (np.arange(self.height) + 0.5) / self.height
        return np.meshgrid(xs, ys)

    def with_mask(self, mask: np.ndarray) -> "BinaryGlyph":
        return BinaryGlyph(mask, self.source_id)

    def to_image(self) -> Image.Image:
        """Render as an 8-bit grayscale image (black foreground on white)."""
        return Image.fromarray(np.where(self.black_mask, 0, 255).astype(np.uint8), mode="L")

    def to_png_bytes(self) -> bytes:
        buf = io.BytesIO()
        self.to_image().save(buf, format="PNG")
        return buf.getvalue()

    def __eq__(self, other):
        if not isinstance(other, BinaryGlyph):
            return NotImplemented
        return self.source_id == other.source_id and np.array_equal(self.black_mask, other.black_mask)

    __hash__ = None


def binarize(gray: np.ndarray, threshold: int = DEFAULT_THRESHOLD, source_id: str = "") -> BinaryGlyph:
    """Pixels with luminance strictly below ``threshold`` become black."""
    gray = np.asarray(gray)
    if gray.ndim != 2 or gray.size == 0:
        raise EmptyImage("raster has zero area")
    return BinaryGlyph(gray < threshold, source_id)


def load_and_binarize(image_bytes: bytes, threshold: int = DEFAULT_THRESHOLD, source_id: str = "") -> BinaryGlyph:
    """Decode a PNG/PGM/PBM (or anything Pillow reads) and threshold its luminance.

    Transparent pixels are composited over white before conversion so that
    glyphs exported with an alpha channel binarize as expected.
    """
    try:
        img = Image.open(io.BytesIO(image_bytes))
        img.load()
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise DecodeError(f"cannot decode image {source_id or ''}: {exc}".strip()) from exc
    if img.width == 0 or img.height == 0:
        raise EmptyImage("raster has zero area")
    if img.mode in ("RGBA", "LA") or (img.mode == "P" and "transparency" in img.info):
        rgba = img.convert("RGBA")
        canvas = Image.new("RGBA", rgba.size, (255, 255, 255, 255))
        img = Image.alpha_composite(canvas, rgba)
    if img.mode == "1":
        gray = np.where(np.asarray(img), 255, 0).astype(np.uint8)
    elif img.mode in ("I", "I;16", "F"):
        arr = np.asarray(img, dtype=np.float64)
        top = 65535.0 if arr.max(initial=0) > 255 else 255.0
        gray = arr * (255.0 / top)
    else:
        gray = np.asarray(img.convert("L"))
    return binarize(gray, threshold, source_id)


def load_path(path, threshold: int = DEFAULT_THRESHOLD) -> BinaryGlyph:
    with open(path, "rb") as fh:
        return load_and_binarize(fh.read(), threshold, source_id=str(path))


def pixel_index(glyph: BinaryGlyph, x: float, y: float) -> tuple[int, int] | None:
    """(row, col) of the pixel owning a normalized point, or None outside the frame."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        return None
    col = min(int(math.floor(x * glyph.width)), glyph.width - 1)
    row = min(int(math.floor(y * glyph.height)), glyph.height - 1)
    return row, col


def is_black_at(glyph: BinaryGlyph, p) -> bool:
    idx = pixel_index(glyph, float(p[0]), float(p[1]))
    return idx is not None and bool(glyph.black_mask[idx])


def black_at_many(glyph: BinaryGlyph, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized ``is_black_at`` over arrays of coordinates (any matching shape)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inside = (xs >= 0.0) & (xs <= 1.0) & (ys >= 0.0) & (ys <= 1.0)
    # NaN fails every comparison above, so it is already outside.
    cols = np.clip(np.floor(np.where(inside, xs, 0.0) * glyph.width), 0, glyph.width - 1).astype(np.intp)
    rows = np.clip(np.floor(np.where(inside, ys, 0.0) * glyph.height), 0, glyph.height - 1).astype(np.intp)
    return inside & glyph.black_mask[rows, cols]


@dataclass(frozen=True)
class StructuralStats:
    cc: int
    fb: float
    fa: float
    bar: float | None


def structural_stats(glyph: BinaryGlyph) -> StructuralStats:
    mask = glyph.black_mask
    _, cc = ndimage.label(mask, structure=_EIGHT_CONNECTED)
    padded = np.pad(mask, 1, constant_values=False)
    # Edges between vertically adjacent cells are horizontal segments of length 1/W.
    horizontal = np.count_nonzero(padded[1:, :] != padded[:-1, :])
    vertical = np.count_nonzero(padded[:, 1:] != padded[:, :-1])
    fb = horizontal / glyph.width + vertical / glyph.height
    fa = glyph.black_count / (glyph.width * glyph.height)
    bar = fb / fa if fa > 0 else None
    return StructuralStats(cc=int(cc), fb=float(fb), fa=float(fa), bar=bar)
