#!/usr/bin/env python3
"""Effect of the invalid-stroke penalty alpha.

Two views per alpha. First, the reward of a fixed stroke set that contains
invalid strokes. Second, best-of-K selection: for every glyph, K random stroke
sets (foreground chords mixed with arbitrary strokes) are scored and the best
one under r_s is kept, a crude stand-in for a policy trained on the reward.
The corpus metrics of the kept sets show how alpha trades coverage for validity.
The greedy fitter is not used here because it never accepts invalid strokes.
"""

import argparse

import numpy as np

from glyphstroke.metrics import SampleSummary, summarize
from glyphstroke.optimizer import propose_candidates
from glyphstroke.reward import RewardConfig, aggregate_reward
from glyphstroke.strokes import Stroke, StrokeSet
from glyphstroke.synthetic import rect_glyph, synthetic_suite


def random_sets(glyph, rng, k):
    out = []
    for _ in range(k):
        chords = propose_candidates(glyph, rng, int(rng.integers(1, 7)))
        junk = [Stroke(tuple(rng.random(2)), tuple(rng.random(2))) for _ in range(int(rng.integers(0, 5)))]
        strokes = chords + junk
        order = rng.permutation(len(strokes))
        out.append(StrokeSet(tuple(strokes[i] for i in order)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphas", default="0,0.01,0.1,0.5")
    ap.add_argument("--size", type=int, default=96)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--k", type=int, default=48, help="random stroke sets per glyph")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    alphas = [float(a) for a in args.alphas.split(",")]

    g = rect_glyph(64, 0.0, 0.4, 1.0, 0.6)
    fixed = StrokeSet.from_pairs([((0.05, 0.5), (0.95, 0.5)), ((0.1, 0.05), (0.3, 0.2)),
                                  ((0.5, 0.05), (0.9, 0.1)), ((0.05, 0.5), (0.95, 0.5))])
    print("fixed stroke set (1 valid, 2 off-glyph, 1 duplicate)")
    for a in alphas:
        rep = aggregate_reward(g, fixed, True, RewardConfig(alpha=a))
        print(f"  alpha={a:<6} N_invalid={rep.n_invalid} r_s={rep.r_s:.6f}")

    rng = np.random.default_rng(args.seed)
    suite = synthetic_suite(args.size, seed=args.seed, count=args.count)
    pools = [(glyph, random_sets(glyph, rng, args.k)) for _, glyph in suite]
    # Coverage does not depend on alpha, so score each set once and reprice it per alpha.
    scored = []
    for glyph, sets in pools:
        scored.append([aggregate_reward(glyph, s, True, RewardConfig(alpha=0.0)) for s in sets])

    print(f"\nbest of {args.k} random stroke sets per glyph ({args.count} glyphs)")
    print(f"  {'alpha':<7}{'CO':>8}{'IS':>8}{'CS':>8}{'TS':>7}")
    for a in alphas:
        samples = []
        for reports in scored:
            best = max(reports, key=lambda r: r.coverage_fraction * (1 - a * r.n_invalid))
            samples.append(SampleSummary.from_report(best))
        m = summarize(samples)
        print(f"  {a:<7}{m.co:>8.2f}{m.is_pct:>8.2f}{m.cs:>8.2f}{m.ts:>7.2f}")


if __name__ == "__main__":
    main()
