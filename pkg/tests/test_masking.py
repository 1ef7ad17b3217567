import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from glyphstroke.errors import EmptyStrokeSet, LengthMismatch
from glyphstroke.geometry import polygon_region_intersection_area
from glyphstroke.masking import (
    MaskConfig,
    apply_mask,
    discard_probabilities,
    masking_trials,
    plan_mask,
    valid_strokes_with_coverage,
)
from glyphstroke.strokes import StrokeSet
from glyphstroke.synthetic import horizontal_bar, plus_sign

THREE = StrokeSet.from_pairs([((0.1, 0.5), (0.3, 0.5)), ((0.6, 0.5), (0.8, 0.5)), ((1.1, 0.5), (1.3, 0.5))])

ARMS = StrokeSet.from_pairs([((0.5, 0.5), (0.11, 0.5)), ((0.5, 0.5), (0.89, 0.5)),
                             ((0.5, 0.5), (0.5, 0.11)), ((0.5, 0.5), (0.5, 0.89))])


def _with_outcomes(plan, z):
    return dataclasses.replace(plan, outcomes=np.asarray(z, bool))


def test_defaults():
    cfg = MaskConfig()
    assert (cfg.temperature, cfg.base_rate, cfg.trials) == (0.4, 0.5, 3)


@pytest.mark.parametrize("kw", [{"temperature": 0}, {"base_rate": 0}, {"base_rate": 1}, {"trials": 0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        MaskConfig(**kw)


def test_single_stroke():
    plan = plan_mask(StrokeSet.from_pairs([((0.1, 0.1), (0.2, 0.2))]), MaskConfig(), np.random.default_rng(0))
    assert plan.normalized_weights.tolist() == [1.0]
    assert plan.probabilities.tolist() == [0.5]


def test_coincident_midpoints():
    s = StrokeSet.from_pairs([((0.1, 0.5), (0.9, 0.5)), ((0.5, 0.1), (0.5, 0.9))])
    plan = plan_mask(s, MaskConfig(), np.random.default_rng(0))
    assert plan.probabilities.tolist() == [0.5, 0.5]


def test_three_stroke_chain():
    plan = plan_mask(THREE, MaskConfig(), np.random.default_rng(0), center_index=0)
    assert plan.distances == pytest.approx([0.0, 0.5, 1.0])
    expected = oracles.discard_chain([0.0, 0.5, 1.0], 0.4, 0.5)
    assert plan.probabilities == pytest.approx(expected, abs=1e-12)
    assert plan.probabilities == pytest.approx([1.0, 0.314, 0.090], abs=1e-3)
    assert plan.weights == pytest.approx([1.0, 0.2865, 0.0821], abs=1e-4)
    assert plan.weights.mean() == pytest.approx(0.4562, abs=1e-4)


def test_empty_strokes():
    with pytest.raises(EmptyStrokeSet):
        plan_mask(StrokeSet(), MaskConfig(), np.random.default_rng(0))


def test_deterministic():
    a = plan_mask(ARMS, MaskConfig(), np.random.default_rng(9))
    b = plan_mask(ARMS, MaskConfig(), np.random.default_rng(9))
    assert a.to_dict() == b.to_dict()


def test_trial_rngs_independent_of_count():
    a = MaskConfig(trials=2).trial_rng(1).random(3)
    b = MaskConfig(trials=5).trial_rng(1).random(3)
    assert np.array_equal(a, b)


@settings(max_examples=40)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=12),
       st.integers(0, 2**32 - 1), st.floats(0.05, 2.0), st.floats(0.05, 0.95))
def test_plan_invariants(rows, seed, tau, rho):
    s = StrokeSet.from_pairs([((a, b), (c, d)) for a, b, c, d in rows])
    plan = plan_mask(s, MaskConfig(temperature=tau, base_rate=rho), np.random.default_rng(seed))
    assert any(np.array_equal(plan.center, m) for m in plan.midpoints)
    assert plan.normalized_weights.mean() == pytest.approx(1.0, abs=1e-9)
    assert np.all((0 <= plan.probabilities) & (plan.probabilities <= 1))
    assert plan.weights[plan.center_index] == 1.0 == plan.weights.max()
    order = np.argsort(plan.distances, kind="stable")
    p = plan.probabilities[order]
    assert np.all(np.diff(p) <= 1e-15)


def test_discard_probabilities_clip():
    _, _, p = discard_probabilities(np.array([0.0, 10.0]), 0.1, 0.9)
    assert p[0] == 1.0 and p[1] < 1e-9


def test_empirical_frequency():
    rng = np.random.default_rng(2024)
    hits = np.zeros(3)
    n = 20000
    for _ in range(n):
        hits += plan_mask(THREE, MaskConfig(), rng, center_index=0).outcomes
    p = oracles.discard_chain([0.0, 0.5, 1.0], 0.4, 0.5)
    assert np.all(np.abs(hits / n - p) <= 0.02)


# -- apply_mask -----------------------------------------------------------------

def test_apply_nothing():
    g = plus_sign(64)
    s, polys = valid_strokes_with_coverage(g, ARMS)
    plan = _with_outcomes(plan_mask(s, MaskConfig(), np.random.default_rng(0)), [0] * len(s))
    assert apply_mask(g, s, polys, plan) == g


def test_apply_everything_covered(full_black):
    g = full_black(50)
    s, polys = valid_strokes_with_coverage(g, StrokeSet.from_pairs([((0.01, 0.5), (0.99, 0.5))]))
    assert polygon_region_intersection_area(g, polys) == g.black_count
    plan = _with_outcomes(plan_mask(s, MaskConfig(), np.random.default_rng(0)), [1])
    assert apply_mask(g, s, polys, plan).black_count == 0


def test_apply_single_stroke_count():
    g = horizontal_bar(100)
    s, polys = valid_strokes_with_coverage(g, StrokeSet.from_pairs([((0.3, 0.5), (0.7, 0.5))]))
    plan = _with_outcomes(plan_mask(s, MaskConfig(), np.random.default_rng(0)), [1])
    out = apply_mask(g, s, polys, plan)
    assert g.black_count - out.black_count == oracles.covered_count(g.black_mask, [polys[0].vertices])


def test_apply_length_mismatch():
    g = plus_sign(64)
    s, polys = valid_strokes_with_coverage(g, ARMS)
    plan = plan_mask(s, MaskConfig(), np.random.default_rng(0))
    with pytest.raises(LengthMismatch):
        apply_mask(g, s, polys[:-1], plan)


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_apply_never_adds_black(seed):
    g = plus_sign(64)
    s, polys = valid_strokes_with_coverage(g, ARMS)
    for plan, out in masking_trials(g, s, polys, MaskConfig(rng_seed=seed)):
        assert not np.any(out.black_mask & ~g.black_mask)
        assert out.width == g.width and out.height == g.height


def test_trials_count_and_seeded():
    g = plus_sign(64)
    s, polys = valid_strokes_with_coverage(g, ARMS)
    a = masking_trials(g, s, polys, MaskConfig(trials=4, rng_seed=3))
    b = masking_trials(g, s, polys, MaskConfig(trials=4, rng_seed=3))
    assert len(a) == 4
    assert all(x[1] == y[1] for x, y in zip(a, b))
