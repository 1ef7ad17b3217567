"""Command-line entry point: score, metrics, stats, optimize, mask, explore, render."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .bitmap import DEFAULT_THRESHOLD, load_path, structural_stats
from .errors import GlyphStrokeError
from .masking import MaskConfig, masking_trials, valid_strokes_with_coverage
from .matcher import CachedProvider, PixelEmbedding, RemoteEmbedding, baseline_match, content_hash, \
    default_cache_dir, explore
from .metrics import SampleSummary, summarize
from .optimizer import OptimizerConfig, greedy_fit
from .reward import RewardConfig, aggregate_reward, config_to_dict
from .strokes import StrokeSet, dumps_stroke_set, parse_stroke_output, stroke_set_from_dict
from .visualize import OverlaySpec, render_overlay

IMAGE_SUFFIXES = {".png", ".pgm", ".pbm", ".ppm", ".bmp", ".jpg", ".jpeg", ".gif", ".tif", ".tiff"}

_REWARD_KEYS = {"d": "D", "lambda": "lam", "alpha": "alpha", "beta": "beta",
                "tau_novel": "tau_novel", "march_step": "march_step"}


class UsageError(Exception):
    pass


# -- configuration -----------------------------------------------------------

@dataclass
class Settings:
    reward: RewardConfig
    threshold: int
    optimizer: dict
    mask: dict


def load_settings(args) -> Settings:
    """Defaults, then the TOML file, then explicit flags."""
    data: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "rb") as fh:
                data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise GlyphStrokeError(f"bad config {args.config}: {exc}") from exc
    reward_kw = {}
    threshold = DEFAULT_THRESHOLD
    for key, value in data.items():
        if key in _REWARD_KEYS:
            reward_kw[_REWARD_KEYS[key]] = value
        elif key == "threshold":
            threshold = int(value)
        elif key not in ("optimizer", "mask"):
            raise GlyphStrokeError(f"unknown config key {key!r}")
    for key, attr in _REWARD_KEYS.items():
        flag = getattr(args, key.replace("-", "_") if key != "lambda" else "lam", None)
        if flag is not None:
            reward_kw[attr] = flag
    if getattr(args, "threshold", None) is not None:
        threshold = args.threshold
    try:
        reward = RewardConfig(**reward_kw)
    except (TypeError, ValueError) as exc:
        raise GlyphStrokeError(f"invalid reward configuration: {exc}") from exc
    return Settings(reward, threshold, dict(data.get("optimizer", {})), dict(data.get("mask", {})))


def _add_reward_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config (keys: d, lambda, alpha, beta, tau_novel, march_step, threshold)")
    p.add_argument("--d", type=float, help="sampling distance threshold D")
    p.add_argument("--lambda", dest="lam", type=float, help="abnormal extension threshold")
    p.add_argument("--alpha", type=float, help="invalid-stroke penalty")
    p.add_argument("--beta", type=float, help="format reward weight")
    p.add_argument("--tau-novel", dest="tau_novel", type=float, help="novelty ratio threshold")
    p.add_argument("--march-step", dest="march_step", type=float, help="ray march step (normalized)")
    p.add_argument("--threshold", type=int, help=f"binarization luminance threshold (default {DEFAULT_THRESHOLD})")


# -- file helpers --------------------------------------------------------------

def write_atomic(path, data: str | bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_strokes(path) -> tuple[StrokeSet, bool]:
    """Strokes from a JSON file, or from raw model output text (which also sets the format flag)."""
    text = Path(path).read_text(encoding="utf-8", errors="replace")
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        return parse_stroke_output(text)
    if not isinstance(data, dict):
        raise GlyphStrokeError(f"{path}: expected a JSON object with a 'strokes' list")
    try:
        s = stroke_set_from_dict(data)
    except (TypeError, ValueError, IndexError) as exc:
        raise GlyphStrokeError(f"{path}: malformed strokes: {exc}") from exc
    return s, s.n > 0


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    image_path: Path
    strokes_path: Path | None


def read_manifest(path) -> list[ManifestEntry]:
    base = Path(path).resolve().parent
    entries, seen = [], set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            image = rec.get("image_path", rec.get("image"))
            strokes = rec.get("strokes_path", rec.get("strokes"))
            if image is None:
                raise KeyError("image")
        except (json.JSONDecodeError, KeyError, AttributeError) as exc:
            raise GlyphStrokeError(f"{path}:{lineno}: bad manifest line ({exc})") from exc
        eid = str(rec.get("id", image))
        if eid in seen:
            raise GlyphStrokeError(f"{path}:{lineno}: duplicate id {eid!r}")
        seen.add(eid)
        entries.append(ManifestEntry(eid, base / image, base / strokes if strokes else None))
    return entries


def _pool_map(fn, items, jobs: int | None):
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))  # map keeps input order


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(v) -> str:
    return "" if v is None else repr(float(v)) if isinstance(v, float) else str(v)


# -- subcommands ---------------------------------------------------------------

def cmd_score(args) -> int:
    st = load_settings(args)
    glyph = load_path(args.image, st.threshold)
    strokes, ok = read_strokes(args.strokes)
    rep = aggregate_reward(glyph, strokes, ok, st.reward)
    out = rep.to_dict()
    out["config"] = config_to_dict(st.reward)
    text = json.dumps(out, indent=2)
    if args.report:
        write_atomic(args.report, text + "\n")
    print(text)
    return 0


def _metrics_worker(job):
    entry, cfg, threshold = job
    glyph = load_path(entry.image_path, threshold)
    strokes, ok = read_strokes(entry.strokes_path)
    try:
        return SampleSummary.from_report(aggregate_reward(glyph, strokes, ok, cfg))
    except GlyphStrokeError as exc:
        raise GlyphStrokeError(f"{entry.id}: {exc}") from exc


def cmd_metrics(args) -> int:
    st = load_settings(args)
    entries = read_manifest(args.manifest)
    for e in entries:
        if e.strokes_path is None:
            raise GlyphStrokeError(f"manifest entry {e.id!r} has no strokes path")
    alphas = [float(a) for a in args.sweep_alpha.split(",")] if args.sweep_alpha else [None]
    header = ["re", "co", "is", "cs", "ts", "n"]
    rows, summary = [], []
    for a in alphas:
        cfg = st.reward if a is None else RewardConfig(**{**st.reward.__dict__, "alpha": a})
        samples = _pool_map(_metrics_worker, [(e, cfg, st.threshold) for e in entries], args.jobs)
        m = summarize(samples, args.is_mode)
        row = [repr(m.re), repr(m.co), repr(m.is_pct), repr(m.cs), repr(m.ts), str(m.n_samples)]
        rows.append(row if a is None else [repr(a)] + row)
        summary.append({**({} if a is None else {"alpha": a}), **m.to_dict()})
    if args.sweep_alpha:
        header = ["alpha"] + header
    text = _csv_text(header, rows)
    if args.csv:
        write_atomic(args.csv, text)
    print(json.dumps(summary if args.sweep_alpha else summary[0], indent=2))
    return 0


def _stats_worker(job):
    path, threshold = job
    s = structural_stats(load_path(path, threshold))
    return s.cc, s.fb, s.fa, s.bar


def cmd_stats(args) -> int:
    threshold = args.threshold if args.threshold is not None else DEFAULT_THRESHOLD
    paths = [Path(p) for p in args.images]
    if args.manifest:
        paths += [e.image_path for e in read_manifest(args.manifest)]
    if not paths:
        raise UsageError("stats needs at least one image (or --manifest)")
    results = _pool_map(_stats_worker, [(p, threshold) for p in paths], args.jobs)
    rows = [[str(p), cc, _num(fb), _num(fa), _num(bar)] for p, (cc, fb, fa, bar) in zip(paths, results)]
    n = len(results)
    bars = [r[3] for r in results if r[3] is not None]
    rows.append([
        "mean",
        repr(sum(r[0] for r in results) / n),
        repr(sum(r[1] for r in results) / n),
        repr(sum(r[2] for r in results) / n),
        repr(sum(bars) / len(bars)) if bars else "",
    ])
    text = _csv_text(["file", "cc", "fb", "fa", "bar"], rows)
    if args.csv:
        write_atomic(args.csv, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_optimize(args) -> int:
    st = load_settings(args)
    glyph = load_path(args.image, st.threshold)
    okw = dict(st.optimizer)
    if "seed" in okw:
        okw["rng_seed"] = okw.pop("seed")
    for flag, key in (("max_strokes", "max_strokes"), ("seed", "rng_seed"), ("candidates", "candidates_per_round"),
                      ("refine_steps", "refine_steps"), ("min_gain", "min_gain")):
        if getattr(args, flag) is not None:
            okw[key] = getattr(args, flag)
    try:
        ocfg = OptimizerConfig(**okw)
    except (TypeError, ValueError) as exc:
        raise GlyphStrokeError(f"invalid optimizer configuration: {exc}") from exc
    strokes, rep = greedy_fit(glyph, ocfg, st.reward)
    strokes = StrokeSet(strokes.strokes, Path(args.image).name)
    write_atomic(args.out, dumps_stroke_set(strokes) + "\n")
    if args.svg:
        write_atomic(args.svg, render_overlay(glyph, rep, strokes, OverlaySpec(show_grid=True)))
    if args.report:
        write_atomic(args.report, json.dumps(rep.to_dict(), indent=2) + "\n")
    print(json.dumps({"n_strokes": strokes.n, "coverage": rep.coverage_fraction, "n_invalid": rep.n_invalid,
                      "r_s": rep.r_s, "r": rep.r}))
    return 0


def _mask_config(st: Settings, args) -> MaskConfig:
    kw = dict(st.mask)
    if "seed" in kw:
        kw["rng_seed"] = kw.pop("seed")
    for flag, key in (("trials", "trials"), ("seed", "rng_seed"), ("temperature", "temperature"),
                      ("base_rate", "base_rate")):
        if getattr(args, flag, None) is not None:
            kw[key] = getattr(args, flag)
    try:
        return MaskConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise GlyphStrokeError(f"invalid mask configuration: {exc}") from exc


def cmd_mask(args) -> int:
    st = load_settings(args)
    mcfg = _mask_config(st, args)
    glyph = load_path(args.image, st.threshold)
    strokes, _ = read_strokes(args.strokes)
    valid, polys = valid_strokes_with_coverage(glyph, strokes, st.reward)
    if valid.n == 0:
        raise GlyphStrokeError("no valid strokes to mask")
    outputs = []
    for t, (plan, masked) in enumerate(masking_trials(glyph, valid, polys, mcfg)):
        outputs.append((f"masked_{t}.png", masked.to_png_bytes()))
        outputs.append((f"masked_{t}.json", json.dumps(plan.to_dict(), indent=2) + "\n"))
    out_dir = Path(args.out_dir)
    for name, data in outputs:
        write_atomic(out_dir / name, data)
    print(json.dumps({"trials": mcfg.trials, "out_dir": str(out_dir)}))
    return 0


def _load_pool(pool_dir, threshold):
    files = sorted(p for p in Path(pool_dir).iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    return [(p.stem, load_path(p, threshold)) for p in files]


def cmd_explore(args) -> int:
    st = load_settings(args)
    mcfg = _mask_config(st, args)
    query = load_path(args.query, st.threshold)
    strokes, _ = read_strokes(args.strokes)
    pool = _load_pool(args.pool_dir, st.threshold)
    if args.exclude_self:
        qh = content_hash(query)
        pool = [(cid, g) for cid, g in pool if content_hash(g) != qh]
    if args.provider == "remote":
        if not args.endpoint:
            raise UsageError("--provider remote requires --endpoint")
        inner = RemoteEmbedding(args.endpoint)
    else:
        inner = PixelEmbedding()
    cache_dir = None if args.no_cache else (Path(args.cache_dir) if args.cache_dir else default_cache_dir())
    provider = CachedProvider(inner, cache_dir)
    if args.baseline:
        results = baseline_match(query, pool, provider, args.k, on_error=args.on_error)
    else:
        results = explore(query, strokes, pool, provider, mcfg, args.k, st.reward,
                          aggregate=args.aggregate, on_error=args.on_error)
    text = json.dumps([r.to_dict() for r in results], indent=2)
    write_atomic(args.out, text + "\n")
    print(text)
    return 0


def cmd_render(args) -> int:
    st = load_settings(args)
    glyph = load_path(args.image, st.threshold)
    strokes, _ = read_strokes(args.strokes)
    if args.report:
        report = json.loads(Path(args.report).read_text(encoding="utf-8"))
    elif glyph.black_count > 0:
        report = aggregate_reward(glyph, strokes, True, st.reward)
    else:
        report = None
    spec = OverlaySpec(show_grid=args.grid is not None, grid_divisions=args.grid or 10)
    write_atomic(args.out, render_overlay(glyph, report, strokes, spec))
    return 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glyphstroke", description="Stroke-structure reward engine for glyph bitmaps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a stroke set against a glyph image")
    p.add_argument("--image", required=True)
    p.add_argument("--strokes", required=True, help="strokes JSON or raw model output text")
    p.add_argument("--report", help="also write the JSON report here")
    _add_reward_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("metrics", help="RE/CO/IS/CS/TS over a JSONL manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--jobs", type=int)
    p.add_argument("--is-mode", choices=["corpus", "sample"], default="corpus")
    p.add_argument("--sweep-alpha", help="comma-separated penalty values; one CSV row each")
    _add_reward_flags(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("stats", help="CC/FB/FA/BAR structural statistics")
    p.add_argument("images", nargs="*")
    p.add_argument("--manifest")
    p.add_argument("--threshold", type=int)
    p.add_argument("--csv")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("optimize", help="greedy reward-maximizing stroke fit")
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--report")
    p.add_argument("--max-strokes", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--candidates", type=int)
    p.add_argument("--refine-steps", type=int)
    p.add_argument("--min-gain", type=float)
    _add_reward_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("mask", help="stochastic stroke masking trials")
    p.add_argument("--image", required=True)
    p.add_argument("--strokes", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--temperature", type=float)
    p.add_argument("--base-rate", type=float)
    _add_reward_flags(p)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("explore", help="structure-guided matching against an image pool")
    p.add_argument("--query", required=True)
    p.add_argument("--strokes", required=True)
    p.add_argument("--pool-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--temperature", type=float)
    p.add_argument("--base-rate", type=float)
    p.add_argument("--provider", choices=["pixel", "remote"], default="pixel")
    p.add_argument("--endpoint")
    p.add_argument("--aggregate", choices=["max", "mean"], default="max")
    p.add_argument("--on-error", choices=["abort", "skip"], default="abort")
    p.add_argument("--exclude-self", action="store_true")
    p.add_argument("--baseline", action="store_true", help="unmasked similarity ranking")
    p.add_argument("--cache-dir")
    p.add_argument("--no-cache", action="store_true")
    _add_reward_flags(p)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("render", help="SVG overlay of strokes and coverage polygons")
    p.add_argument("--image", required=True)
    p.add_argument("--strokes", required=True)
    p.add_argument("--report")
    p.add_argument("--grid", type=int, metavar="N")
    p.add_argument("--out", required=True)
    _add_reward_flags(p)
    p.set_defaults(func=cmd_render)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (GlyphStrokeError, OSError, ValueError) as exc:
        print(f"error: {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
