from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectbar import (
    Bar,
    Rectangle,
    RectangleBarcode,
    are_delta_interleaved,
    bottleneck_distance,
    bottleneck_distance_1d,
    fixture_h_sphere,
    fixture_heart_circle,
    fixture_torus,
    grid_interleaving_oracle,
    is_delta_trivial,
    rectangle_barcode,
    shift,
    stability_experiment,
)
from rectbar.distance import delta_matching

from helpers import corpus, fixtures

INF = math.inf


def R(c, l1, l2, k=0):
    return Rectangle(k, c, l1, l2)


def battery():
    rects = []
    for c in range(6):
        rects.append(R(c, INF, INF))
        rects += [R(c, l1, INF) for l1 in range(1, c + 1)]
        rects += [R(c, INF, l2) for l2 in range(1, 6 - c)]
    return rects


rect_strategy = st.sampled_from(battery())
delta_strategy = st.sampled_from([i / 4 for i in range(13)])


# --- triviality ---------------------------------------------------------


def test_triviality_examples():
    assert is_delta_trivial(R(2, INF, 1), 1)
    assert not is_delta_trivial(R(2, INF, 1), 0.5)
    assert not is_delta_trivial(R(2, INF, INF), 1e6)
    with pytest.raises(ValueError):
        is_delta_trivial(R(2, INF, 1), -1)


def test_triviality_by_point_enumeration():
    # sample points of each rectangle and look for x and x + delta inside
    box = np.arange(-8, 14, 0.125)
    for r in battery():
        for d in [i / 4 for i in range(13)]:
            hit = any(r.contains(a, b) and r.contains(a + d, b + d)
                      for a in box for b in box if a < b + 1e-12)
            assert is_delta_trivial(r, d) == (not hit), (r.label(), d)


# --- interleaving ---------------------------------------------------------


def test_interleaving_examples():
    assert are_delta_interleaved(R(2, INF, 1), R(2, INF, 1), 0)
    assert are_delta_interleaved(R(2, INF, 1), R(2, INF, 1.5), 0.5)
    assert grid_interleaving_oracle(R(2, INF, 1), R(2, INF, 1.5), 0.5)
    assert not are_delta_interleaved(R(1, INF, INF), R(4, INF, INF), 1)
    assert not grid_interleaving_oracle(R(1, INF, INF), R(4, INF, INF), 1)


def test_oracle_golden_b_vs_n():
    # neither is 0.8-trivial; the oracle finds no interleaving
    assert not grid_interleaving_oracle(R(2, INF, 1), R(3, 1, INF), 0.4)
    assert not are_delta_interleaved(R(2, INF, 1), R(3, 1, INF), 0.4)


def test_oracle_identity_and_far_apart():
    for r in battery():
        assert grid_interleaving_oracle(r, r, 0)
    assert not grid_interleaving_oracle(R(0, INF, INF), R(5, INF, INF), 0.5)


def test_oracle_rejects_thin_grid():
    with pytest.raises(ValueError):
        grid_interleaving_oracle(R(2, INF, 1), R(3, 1, INF), 0.5, grid=[2, 3])


def test_oracle_accepts_explicit_grid():
    r, s, d = R(2, INF, 1), R(2, INF, 1.5), 0.5
    grid = sorted({e - t * d for e in (2, 3, 3.5) for t in (0, 1, 2)} | {10})
    assert grid_interleaving_oracle(r, s, d, grid=grid)


@settings(max_examples=300, deadline=None)
@given(rect_strategy, rect_strategy, delta_strategy, delta_strategy)
def test_interleaving_symmetric_and_monotone(r, s, d1, d2):
    lo, hi = sorted((d1, d2))
    assert are_delta_interleaved(r, s, lo) == are_delta_interleaved(s, r, lo)
    if are_delta_interleaved(r, s, lo):
        assert are_delta_interleaved(r, s, hi)


@settings(max_examples=150, deadline=None)
@given(rect_strategy, rect_strategy, st.sampled_from([0.1, 0.3, 0.6, 1.3, 2.7]))
def test_closed_form_matches_oracle_off_battery(r, s, d):
    assert are_delta_interleaved(r, s, d) == grid_interleaving_oracle(r, s, d)


def test_scaled_battery_matches_oracle():
    rects = battery()
    rng = np.random.default_rng(11)
    for _ in range(300):
        i, j = rng.integers(len(rects), size=2)
        lam = 0.3
        r, s = rects[i].scaled(lam), rects[j].scaled(lam)
        d = float(rng.choice([0.05, 0.15, 0.3, 0.45, 0.75]))
        assert are_delta_interleaved(r, s, d) == grid_interleaving_oracle(r, s, d)


# --- matching and bottleneck --------------------------------------------


def brute_matching_exists(rs1, rs2, d):
    """Try every partial injection from rs1 into rs2."""
    n, m = len(rs1), len(rs2)
    for image in itertools.product(range(-1, m), repeat=n):
        used = [j for j in image if j >= 0]
        if len(set(used)) != len(used):
            continue
        if any(j < 0 and not is_delta_trivial(rs1[i], 2 * d) for i, j in enumerate(image)):
            continue
        if any(j >= 0 and not are_delta_interleaved(rs1[i], rs2[j], d) for i, j in enumerate(image)):
            continue
        if any(j not in used and not is_delta_trivial(rs2[j], 2 * d) for j in range(m)):
            continue
        return True
    return False


def test_bottleneck_examples():
    heart = rectangle_barcode(fixture_heart_circle())
    assert bottleneck_distance(heart, heart) == 0
    moved = rectangle_barcode(shift(fixture_heart_circle(), 0.3))
    assert bottleneck_distance(heart, moved) <= 0.3 + 1e-9
    assert bottleneck_distance(RectangleBarcode([R(0, INF, INF)]), RectangleBarcode()) == INF
    assert bottleneck_distance(RectangleBarcode(), RectangleBarcode()) == 0


def test_degrees_never_match():
    a = RectangleBarcode([R(1, INF, INF, k=0)])
    b = RectangleBarcode([R(1, INF, INF, k=1)])
    assert bottleneck_distance(a, b) == INF


@settings(max_examples=80, deadline=None)
@given(st.lists(rect_strategy, max_size=3), st.lists(rect_strategy, max_size=3))
def test_bottleneck_is_least_feasible_delta(rs1, rs2):
    d = bottleneck_distance(RectangleBarcode(rs1), RectangleBarcode(rs2))
    if d == INF:
        assert not brute_matching_exists(rs1, rs2, 1e6)
        return
    assert brute_matching_exists(rs1, rs2, d)
    if d > 0:
        assert not brute_matching_exists(rs1, rs2, d - 1e-9)
    assert delta_matching(rs1, rs2, d) is not None


@settings(max_examples=80, deadline=None)
@given(st.lists(rect_strategy, max_size=3), st.lists(rect_strategy, max_size=3),
       st.lists(rect_strategy, max_size=3))
def test_bottleneck_pseudometric(x, y, z):
    a, b, c = RectangleBarcode(x), RectangleBarcode(y), RectangleBarcode(z)
    ab, ba = bottleneck_distance(a, b), bottleneck_distance(b, a)
    assert ab == ba
    assert bottleneck_distance(a, a) == 0
    assert bottleneck_distance(a, c) <= ab + bottleneck_distance(b, c) + 1e-9


def test_matching_object():
    m = delta_matching([R(2, INF, 1)], [R(2, INF, 1.5), R(4, INF, 0.5)], 0.5)
    assert m is not None
    assert m.pairs == [(R(2, INF, 1), R(2, INF, 1.5))]
    assert m.unmatched_right == [R(4, INF, 0.5)] and m.unmatched_left == []
    assert delta_matching([R(2, INF, INF)], [], 3) is None


def test_bottleneck_1d_examples():
    a = [Bar(0, 0, 1, "x", "y")]
    assert bottleneck_distance_1d(a, a) == 0
    assert bottleneck_distance_1d(a, []) == 0.5
    assert bottleneck_distance_1d([Bar(0, 0, INF, "x")], [Bar(0, 1, INF, "x")]) == 1
    assert bottleneck_distance_1d([Bar(0, 0, INF, "x")], []) == INF


# --- stability -----------------------------------------------------------


def test_stability_zero_magnitude():
    rep = stability_experiment(fixture_h_sphere(), trials=5, magnitude=0)
    assert all(t.d_bot == 0 and t.delta == 0 for t in rep.trials)


def test_constant_shift_within_delta():
    rep = stability_experiment(fixture_heart_circle(), trials=20, magnitude=0.5, constant=True)
    assert all(t.constant and t.within_delta for t in rep.trials)
    assert rep.within_delta_rate == 1.0


def test_stability_random_complexes():
    for seed, c in enumerate(corpus(30)):
        rep = stability_experiment(c, trials=8, magnitude=0.6, seed=seed)
        assert rep.ok
        assert all(t.d_bot <= 3 * t.delta + 1e-9 for t in rep.trials)


def test_stability_is_seeded():
    a = stability_experiment(fixture_torus(), trials=10, seed=4).to_doc()
    b = stability_experiment(fixture_torus(), trials=10, seed=4).to_doc()
    assert a == b
    assert set(a[0]) == {"trial", "delta", "d_bot", "bound_3delta_ok"}


def test_stability_falls_back_to_constant():
    # with zero retries every trial uses a common shift
    rep = stability_experiment(fixture_heart_circle(), trials=5, magnitude=0.4, max_rejects=0)
    assert all(t.constant for t in rep.trials)
    assert all(t.within_delta for t in rep.trials)


@pytest.mark.parametrize("name,c", fixtures())
def test_fixture_stability(name, c):
    assert stability_experiment(c, trials=25, magnitude=0.2, seed=1).ok
