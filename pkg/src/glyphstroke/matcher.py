"""Structure-guided character matching over image embeddings.

The query is perturbed by stroke masking over several trials; every pool
candidate is scored by its best cosine similarity to any masked query.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .bitmap import BinaryGlyph
from .errors import EmptyPool, EmptyStrokeSet, GlyphStrokeError, ProtocolError, TransportError
from .masking import MaskConfig, MaskPlan, apply_mask, plan_mask, valid_strokes_with_coverage
from .reward import RewardConfig
from .strokes import StrokeSet

EMBED_GRID = 32
CACHE_ENV = "HIEROSA_CACHE_DIR"


class EmbeddingProvider(Protocol):
    provider_id: str

    def embed(self, image: BinaryGlyph) -> np.ndarray: ...


@dataclass(frozen=True)
class MatchResult:
    candidate_id: str
    aggregated_score: float
    per_trial_scores: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"id": self.candidate_id, "score": self.aggregated_score,
                "trial_scores": list(self.per_trial_scores)}


def _overlap_matrix(n: int, bins: int) -> np.ndarray:
    """(bins, n) matrix: fraction of each output bin covered by each input cell."""
    edges_in = np.arange(n + 1) / n
    edges_out = np.arange(bins + 1) / bins
    lo = np.maximum(edges_out[:-1, None], edges_in[None, :-1])
    hi = np.minimum(edges_out[1:, None], edges_in[None, 1:])
    return np.clip(hi - lo, 0.0, None) * bins


def pixel_embedding(image: BinaryGlyph) -> np.ndarray:
    """Area-averaged 32x32 black-fraction map, mean-centered and L2-normalized.

    A uniform image has nothing left after centering and maps to the first
    basis vector.
    """
    m = image.black_mask.astype(np.float64)
    grid = _overlap_matrix(image.height, EMBED_GRID) @ m @ _overlap_matrix(image.width, EMBED_GRID).T
    v = grid.ravel()
    v = v - v.mean()
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        out = np.zeros(EMBED_GRID * EMBED_GRID)
        out[0] = 1.0
        return out
    return v / norm


class PixelEmbedding:
    provider_id = "pixel32"

    def embed(self, image: BinaryGlyph) -> np.ndarray:
        return pixel_embedding(image)


def _normalize_payload(payload) -> np.ndarray:
    if not isinstance(payload, list) or not payload:
        raise ProtocolError("embedding response must be a nonempty JSON array of numbers")
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in payload):
        raise ProtocolError("embedding response contains non-numeric entries")
    v = np.asarray(payload, dtype=np.float64)
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0:
        raise ProtocolError("embedding response has zero or non-finite norm")
    return v / norm


def remote_embedding(endpoint: str, image_bytes: bytes, timeout: float = 30.0) -> np.ndarray:
    """POST raw PNG bytes; expects HTTP 200 with a JSON number array."""
    req = urllib.request.Request(endpoint, data=image_bytes, method="POST",
                                 headers={"Content-Type": "image/png"})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            status = resp.status
            body = resp.read()
    except urllib.error.HTTPError as exc:
        raise ProtocolError(f"embedding server answered HTTP {exc.code}") from exc
    except (urllib.error.URLError, OSError, ValueError) as exc:
        raise TransportError(f"cannot reach embedding server {endpoint}: {exc}") from exc
    if status != 200:
        raise ProtocolError(f"embedding server answered HTTP {status}")
    try:
        payload = json.loads(body)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProtocolError("embedding response is not JSON") from exc
    return _normalize_payload(payload)


@dataclass
class RemoteEmbedding:
    endpoint: str
    timeout: float = 30.0

    @property
    def provider_id(self) -> str:
        return f"remote:{self.endpoint}"

    def embed(self, image: BinaryGlyph) -> np.ndarray:
        return remote_embedding(self.endpoint, image.to_png_bytes(), self.timeout)


def content_hash(image: BinaryGlyph) -> str:
    h = hashlib.sha256()
    h.update(f"{image.height}x{image.width}".encode())
    h.update(np.packbits(image.black_mask).tobytes())
    return h.hexdigest()


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "glyphstroke"


@dataclass
class CachedProvider:
    """Wraps a provider with an in-memory and (optionally) on-disk embedding cache.

    Disk entries are written to a temp file and renamed into place, so
    concurrent writers of the same key simply race to store identical data.
    """

    inner: EmbeddingProvider
    cache_dir: Path | None = None
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def provider_id(self) -> str:
        return self.inner.provider_id

    def _path(self, key: str) -> Path:
        safe = re.sub(r"[^A-Za-z0-9_.-]+", "_", self.provider_id)
        return Path(self.cache_dir) / f"{safe}-{key}.npy"

    def embed(self, image: BinaryGlyph) -> np.ndarray:
        key = content_hash(image)
        if key in self._memo:
            return self._memo[key]
        vec = None
        if self.cache_dir is not None:
            path = self._path(key)
            if path.exists():
                try:
                    vec = np.load(path)
                except (OSError, ValueError):
                    vec = None
        if vec is None:
            vec = np.asarray(self.inner.embed(image), dtype=np.float64)
            if self.cache_dir is not None:
                self._store(self._path(key), vec)
        self._memo[key] = vec
        return vec

    @staticmethod
    def _store(path: Path, vec: np.ndarray) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                np.save(fh, vec)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.clip(np.dot(a, b), -1.0, 1.0))


def _embed_pool(pool, provider, on_error: str):
    if not pool:
        raise EmptyPool("candidate pool is empty")
    out = []
    for cid, img in pool:
        try:
            out.append((cid, provider.embed(img)))
        except GlyphStrokeError:
            if on_error == "skip":
                continue
            raise
    if not out:
        raise EmptyPool("no pool candidate could be embedded")
    return out


def _rank(scored: list[MatchResult], k: int) -> list[MatchResult]:
    scored.sort(key=lambda m: (-m.aggregated_score, m.candidate_id))
    return scored[:k]


def baseline_match(query: BinaryGlyph, pool: Sequence[tuple[str, BinaryGlyph]], provider: EmbeddingProvider,
                   k: int = 5, on_error: str = "abort") -> list[MatchResult]:
    if k < 1:
        raise ValueError("k must be >= 1")
    embedded = _embed_pool(pool, provider, on_error)
    q = provider.embed(query)
    results = []
    for cid, e in embedded:
        s = cosine(q, e)
        results.append(MatchResult(cid, s, (s,)))
    return _rank(results, k)


def explore(query: BinaryGlyph, query_strokes: StrokeSet, pool: Sequence[tuple[str, BinaryGlyph]],
            provider: EmbeddingProvider, mcfg: MaskConfig | None = None, k: int = 5,
            rcfg: RewardConfig | None = None, aggregate: str = "max",
            plans: Sequence[MaskPlan] | None = None, on_error: str = "abort") -> list[MatchResult]:
    """Rank pool candidates against stroke-masked versions of the query.

    ``plans`` replaces the random masking plans (one per trial); it must be
    aligned with the query's accepted strokes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    mcfg = mcfg or MaskConfig()
    embedded = _embed_pool(pool, provider, on_error)
    strokes, polys = valid_strokes_with_coverage(query, query_strokes, rcfg)
    if len(strokes) == 0:
        raise EmptyStrokeSet("query has no valid strokes to mask")
    if plans is None:
        plans = [plan_mask(strokes, mcfg, mcfg.trial_rng(t)) for t in range(mcfg.trials)]

    trial_vecs = [provider.embed(apply_mask(query, strokes, polys, plan)) for plan in plans]
    results = []
    for cid, e in embedded:
        scores = tuple(cosine(q, e) for q in trial_vecs)
        if aggregate == "max":
            agg = max(scores)
        elif aggregate == "mean":
            agg = math.fsum(scores) / len(scores)
        else:
            raise ValueError(f"unknown aggregate {aggregate!r}")
        results.append(MatchResult(cid, agg, scores))
    return _rank(results, k)
