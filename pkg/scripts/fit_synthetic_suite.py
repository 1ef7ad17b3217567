#!/usr/bin/env python3
"""Greedy stroke fitting over the synthetic glyph suite.

Prints one row per glyph (strokes, coverage, invalid count, r_s, seconds) and the
corpus metrics. With --out-dir, also writes each fitted stroke set and an SVG overlay.
"""

import argparse
import json
import time
from pathlib import Path

from glyphstroke.metrics import SampleSummary, summarize
from glyphstroke.optimizer import OptimizerConfig, greedy_fit
from glyphstroke.strokes import dumps_stroke_set
from glyphstroke.synthetic import synthetic_suite
from glyphstroke.visualize import OverlaySpec, render_overlay


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--suite-seed", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0, help="optimizer seed")
    ap.add_argument("--max-strokes", type=int, default=12)
    ap.add_argument("--out-dir", type=Path)
    args = ap.parse_args()

    ocfg = OptimizerConfig(max_strokes=args.max_strokes, rng_seed=args.seed)
    samples = []
    print(f"{'glyph':<14}{'n':>4}{'CO%':>9}{'inv':>5}{'r_s':>9}{'sec':>7}")
    for name, glyph in synthetic_suite(args.size, seed=args.suite_seed, count=args.count):
        t0 = time.perf_counter()
        strokes, rep = greedy_fit(glyph, ocfg)
        dt = time.perf_counter() - t0
        samples.append(SampleSummary.from_report(rep))
        print(f"{name:<14}{strokes.n:>4}{100 * rep.coverage_fraction:>9.2f}{rep.n_invalid:>5}{rep.r_s:>9.4f}{dt:>7.2f}")
        if args.out_dir:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            glyph.to_image().save(args.out_dir / f"{name}.png")
            (args.out_dir / f"{name}.json").write_text(dumps_stroke_set(strokes) + "\n")
            svg = render_overlay(glyph, rep, strokes, OverlaySpec(show_grid=True))
            (args.out_dir / f"{name}.svg").write_text(svg)

    m = summarize(samples)
    print(json.dumps(m.to_dict(), indent=2))


if __name__ == "__main__":
    main()
