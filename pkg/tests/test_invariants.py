from __future__ import annotations

import math

import pytest

from rectbar import (
    Rectangle,
    RectangleBarcode,
    boundary_depth,
    fixture_h_sphere,
    fixture_heart_circle,
    fixture_torus,
    invariant_report,
    non_cycle_depth,
    parse,
    rectangle_barcode,
    scale,
    spectral_invariant_set,
    spectral_spread,
    spectral_spread_generator,
    spread_bruteforce,
    sublevel_barcode,
)
from rectbar.complex import FilteredComplex
from rectbar.interlevel import comparison_rank

from helpers import corpus, fixtures

INF = math.inf
ZERO = parse(b'{"field": "GF2", "degrees": [], "boundaries": []}')
EMPTY = RectangleBarcode()


def rb(make):
    return rectangle_barcode(make())


def test_spectral_sets():
    assert spectral_invariant_set(rb(fixture_torus)) == {1, 2, 3, 4}
    assert spectral_invariant_set(rb(fixture_heart_circle)) == {1, 4}
    assert spectral_invariant_set(EMPTY) == set()


def test_depths():
    assert boundary_depth(rb(fixture_heart_circle)) == 1
    assert boundary_depth(rb(fixture_torus)) == 0
    assert boundary_depth(rb(fixture_h_sphere)) == 1
    assert non_cycle_depth(rb(fixture_heart_circle)) == 1
    assert non_cycle_depth(rb(fixture_torus)) == 0
    assert non_cycle_depth(rb(fixture_h_sphere)) == 1
    assert boundary_depth(EMPTY) == 0 and non_cycle_depth(EMPTY) == 0


def test_spread_per_generator():
    heart = rb(fixture_heart_circle)
    assert spectral_spread_generator(heart, "p_3") == 1
    assert spectral_spread_generator(heart, "p_1") == INF
    assert spectral_spread_generator(rb(fixture_h_sphere), "p_4") == 1
    with pytest.raises(KeyError):
        spectral_spread_generator(heart, "nope")


def test_spread_generator_needs_degree_when_names_repeat():
    c = FilteredComplex.build({0: [("x", 1)], 1: [("x", 2)]})
    b = rectangle_barcode(c)
    with pytest.raises(KeyError):
        spectral_spread_generator(b, "x")
    assert spectral_spread_generator(b, "x", degree=1) == INF
    assert set(invariant_report(b).spread_per_generator) == {"x@0", "x@1"}


def test_spread_examples():
    assert spectral_spread(rb(fixture_heart_circle)) == INF
    assert spectral_spread(RectangleBarcode([Rectangle(0, 3, 1, INF), Rectangle(0, 5, 2, INF)])) == 2
    assert spectral_spread(EMPTY) == 0


def test_spread_bruteforce_examples():
    assert spread_bruteforce(fixture_heart_circle(), 1) == INF
    assert spread_bruteforce(fixture_h_sphere(), 1) == 1
    for k in range(3):
        assert spread_bruteforce(ZERO, k) == 0


def test_spread_bruteforce_agrees():
    for c in [c for _, c in fixtures()] + list(corpus(100)):
        b = rectangle_barcode(c)
        for k in c.degrees:
            assert spread_bruteforce(c, k) == spectral_spread(b, k)


def test_off_grid_shifts_on_fixtures():
    # comparison ranks at off-grid d are positive exactly below the spread
    pts = [-INF] + [i / 10 for i in range(75)]
    for _, c in fixtures():
        b = rectangle_barcode(c)
        for k in c.degrees:
            w = spectral_spread(b, k)
            for d in (0.3, 0.7, 1.1, 1.9, 2.6):
                positive = any(
                    comparison_rank(c, k, (a, b), d) > 0
                    for a in pts for b in pts if a < b
                )
                assert positive == (d < w), (k, d)


def test_depth_matches_sublevel_bars():
    for c in [c for _, c in fixtures()] + list(corpus(60)):
        bars = sublevel_barcode(c)
        b = rectangle_barcode(c)
        longest = max((x.length for x in bars if x.death != INF), default=0.0)
        assert boundary_depth(b) == longest
        assert spectral_invariant_set(b) == {x.birth for x in bars if x.death == INF}


@pytest.mark.parametrize("lam", [0.5, 2.0, 4.0])
def test_invariants_scale_linearly(lam):
    for c in [c for _, c in fixtures()] + list(corpus(20)):
        a = invariant_report(rectangle_barcode(c))
        s = invariant_report(rectangle_barcode(scale(c, lam)))
        assert s.spectral_set == [x * lam for x in a.spectral_set]
        assert s.boundary_depth == a.boundary_depth * lam
        assert s.non_cycle_depth == a.non_cycle_depth * lam
        assert s.spread_global == a.spread_global * lam


def test_report_documents():
    rep = invariant_report(rb(fixture_h_sphere))
    doc = rep.to_doc()
    assert doc["spectral_set"] == [1, 6]
    assert doc["spread_global"] == "inf"
    assert doc["spread_per_generator"]["p_2"] == 1
    text = rep.to_text()
    assert text.startswith("spectral_set: {1, 6}\n")
    assert "boundary_depth: 1\n" in text
