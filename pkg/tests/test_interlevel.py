from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from rectbar import (
    Window,
    check_middle_exactness,
    check_weak_exactness,
    comparison_rank,
    critical_values,
    fixture_h_sphere,
    fixture_heart_circle,
    fixture_torus,
    interlevel_homology,
    parse,
    random_complex,
    rank_table,
    structure_map_rank,
)
from rectbar.complex import FilteredComplex
from rectbar.interlevel import exactness_sweep, table_grid

from helpers import corpus, fixtures

INF = math.inf
ZERO = parse(b'{"field": "GF2", "degrees": [], "boundaries": []}')


# --- a dense oracle, written against numpy and nothing from the package ---


def dense(c: FilteredComplex, k: int) -> np.ndarray:
    rows, cols = c.size(k - 1), c.size(k)
    out = np.zeros((rows, cols), dtype=np.uint8)
    for j, col in enumerate(c.columns(k) if cols else ()):
        for i in range(rows):
            out[i, j] = (col >> i) & 1
    return out


def row_reduce(m: np.ndarray):
    """Reduced row echelon form over GF(2) and the pivot columns."""
    m = m.copy() % 2
    pivots = []
    r = 0
    for j in range(m.shape[1]):
        hit = np.nonzero(m[r:, j])[0]
        if not len(hit):
            continue
        p = r + hit[0]
        m[[r, p]] = m[[p, r]]
        for i in np.nonzero(m[:, j])[0]:
            if i != r:
                m[i] ^= m[r]
        pivots.append(j)
        r += 1
        if r == m.shape[0]:
            break
    return m, pivots


def dense_rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return len(row_reduce(m)[1])


def nullspace(m: np.ndarray) -> np.ndarray:
    """Columns spanning the kernel of ``m``."""
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n, dtype=np.uint8)
    red, piv = row_reduce(m)
    free = [j for j in range(n) if j not in piv]
    out = np.zeros((n, len(free)), dtype=np.uint8)
    for t, f in enumerate(free):
        out[f, t] = 1
        for r, p in enumerate(piv):
            out[p, t] = red[r, f]
    return out


def in_window(c, k, a, b):
    return np.array([a < g.filtration <= b for g in c.generators(k)], dtype=bool)


def oracle_dim(c, k, a, b):
    if a >= b:
        return 0
    here = in_window(c, k, a, b)
    below = in_window(c, k - 1, a, b)
    above = in_window(c, k + 1, a, b)
    dk = dense(c, k)[np.ix_(below, here)]
    dk1 = dense(c, k + 1)[np.ix_(here, above)]
    return int(here.sum()) - dense_rank(dk) - dense_rank(dk1)


def oracle_map_rank(c, k, w1, w2):
    (a1, b1), (a2, b2) = w1, w2
    if a1 >= b1 or a2 >= b2:
        return 0
    h1, h2 = in_window(c, k, a1, b1), in_window(c, k, a2, b2)
    dk = dense(c, k)[np.ix_(in_window(c, k - 1, a1, b1), h1)]
    z = np.zeros((c.size(k), 0), dtype=np.uint8)
    if h1.any():
        z = np.zeros((c.size(k), nullspace(dk).shape[1]), dtype=np.uint8)
        z[h1] = nullspace(dk)
    z2 = z[h2]
    bnd = dense(c, k + 1)[np.ix_(h2, in_window(c, k + 1, a2, b2))]
    return dense_rank(np.hstack([bnd, z2])) - dense_rank(bnd)


# --- examples -----------------------------------------------------------


def test_critical_values():
    assert critical_values(fixture_torus()) == [1, 2, 3, 4]
    assert critical_values(ZERO) == []
    tied = FilteredComplex.build({0: [("a", 7), ("b", 7)]})
    assert critical_values(tied) == [7]


def test_interlevel_examples():
    assert interlevel_homology(fixture_heart_circle(), 0, (1.5, 2.5)).dimension == 1
    assert interlevel_homology(fixture_torus(), 1, Window(-INF, INF)).dimension == 2
    for _, c in fixtures():
        for k in c.degrees:
            h = interlevel_homology(c, k, (3, 2))
            assert h.dimension == 0 and h.cycle_basis == ()


def test_presentation_is_consistent():
    h = interlevel_homology(fixture_h_sphere(), 1, (2.5, 4.5))
    assert h.dimension == len(h.cycle_basis) - sum(1 for _ in h.boundary_span)
    for z in h.cycle_basis:
        assert z & ~h.support == 0


def test_structure_map_examples():
    heart, torus = fixture_heart_circle(), fixture_torus()
    assert structure_map_rank(heart, 0, (1.5, 2.5), (2.5, 3.5)) == 0
    assert structure_map_rank(torus, 0, (-INF, 1), (-INF, 4)) == 1
    for w in [(0.5, 2.5), (1.5, 3.5), (-INF, INF)]:
        assert structure_map_rank(heart, 0, w, w) == interlevel_homology(heart, 0, w).dimension
    with pytest.raises(ValueError):
        structure_map_rank(heart, 0, (1, 3), (0, 4))


def test_comparison_examples():
    heart = fixture_heart_circle()
    assert comparison_rank(heart, 0, (1.5, 2.5), 0.4) == 1
    assert comparison_rank(heart, 0, (1.5, 2.5), 1) == 0
    assert comparison_rank(heart, 0, (1.5, 2.5), 0) == 1
    with pytest.raises(ValueError):
        comparison_rank(heart, 0, (1.5, 2.5), -1)


def test_rank_table_examples():
    t = rank_table(fixture_torus(), 0)
    for (a, b), d in t.dims.items():
        assert d == (1 if a < 1 <= b else 0)
    assert not t.sampled
    assert all(v == 0 for v in rank_table(ZERO, 0).dims.values())
    assert rank_table(fixture_h_sphere(), 1).dim(2.5, 3.5) == 1


def test_rank_table_grid():
    assert table_grid([1, 2, 4]) == [-INF, 0, 1, 1.5, 2, 3, 4, 5, INF]
    assert table_grid([]) == [-INF, INF]


def test_rank_table_is_capped_on_large_grids():
    c = random_complex(3, n_generators=30, n_degrees=2)
    t = rank_table(c, 0)
    assert t.sampled
    assert len(t.pair_ranks) == 2000
    assert len(t.dim_values) == len(t.windows)


# --- against the dense oracle ------------------------------------------


def test_dims_match_dense_oracle():
    for c in [c for _, c in fixtures()] + list(corpus(40)):
        for k in c.degrees:
            for (a, b), d in rank_table(c, k).dims.items():
                assert d == oracle_dim(c, k, a, b), (c, k, a, b)


def test_map_ranks_match_dense_oracle():
    rng = np.random.default_rng(1)
    for c in [c for _, c in fixtures()] + list(corpus(40)):
        for k in c.degrees:
            t = rank_table(c, k)
            pairs = list(t.hmap_ranks.items())
            for i in rng.choice(len(pairs), size=min(60, len(pairs)), replace=False):
                (w1, w2), r = pairs[i]
                assert r == oracle_map_rank(c, k, w1, w2), (k, w1, w2)


# --- module properties --------------------------------------------------


def test_functoriality_on_grid():
    rng = np.random.default_rng(0)
    for c in [fixture_heart_circle(), fixture_h_sphere()] + list(corpus(12)):
        grid = table_grid(critical_values(c))
        for k in c.degrees:
            for _ in range(300):
                a1, a2, a3 = sorted(rng.choice(grid, size=3).tolist())
                b1, b2, b3 = sorted(rng.choice(grid, size=3).tolist())
                u, v, w = (a1, b1), (a2, b2), (a3, b3)
                r13 = structure_map_rank(c, k, u, w)
                assert r13 <= min(structure_map_rank(c, k, u, v), structure_map_rank(c, k, v, w))


def test_long_exact_sequence_identities():
    for c in [c for _, c in fixtures()] + list(corpus(30)):
        grid = table_grid(critical_values(c))
        degs = range(min(c.degrees, default=0) - 1, max(c.degrees, default=0) + 2)
        for a, b, d in itertools.combinations(grid, 3):
            euler = 0
            for k in degs:
                hab = interlevel_homology(c, k, (a, b)).dimension
                hbd = interlevel_homology(c, k, (b, d)).dimension
                had = interlevel_homology(c, k, (a, d)).dimension
                assert had <= hab + hbd
                euler += (-1) ** k * (hab - had + hbd)
            assert euler == 0


def test_dims_constant_on_cells():
    for _, c in fixtures():
        crit = critical_values(c)
        cuts = [-INF] + crit + [INF]
        for k in c.degrees:
            for (lo1, hi1), (lo2, hi2) in itertools.combinations_with_replacement(zip(cuts, cuts[1:]), 2):
                def inner(lo, hi):
                    lo = hi - 2 if lo == -INF else lo
                    hi = lo + 2 if hi == INF else hi
                    return [lo + (hi - lo) / 3, lo + 2 * (hi - lo) / 3]

                vals = {interlevel_homology(c, k, (a, b)).dimension
                        for a in inner(lo1, hi1) for b in inner(lo2, hi2) if a < b}
                assert len(vals) <= 1


def test_windows_without_critical_values_vanish():
    c = fixture_h_sphere()
    for k in c.degrees:
        assert interlevel_homology(c, k, (1.2, 1.8)).dimension == 0
        assert interlevel_homology(c, k, (6, 100)).dimension == 0


# --- exactness ----------------------------------------------------------


@pytest.mark.parametrize("name,c", fixtures())
def test_exactness_sweep_fixtures(name, c):
    for k in c.degrees:
        rep = exactness_sweep(c, k)
        assert rep.ok, rep.failures[:2]


def test_degenerate_quads():
    c = fixture_h_sphere()
    for k in c.degrees:
        for x in (0.5, 2, 3.5, 6):
            assert check_weak_exactness(c, k, (x, x, x + 1, x + 1))
            assert check_middle_exactness(c, k, (x, x, x, x))


def test_quad_preconditions():
    c = fixture_heart_circle()
    with pytest.raises(ValueError):
        check_weak_exactness(c, 0, (2, 1, 3, 4))
    with pytest.raises(ValueError):
        check_middle_exactness(c, 0, (1, 3, 2, 4))


def test_exactness_random_quads():
    rng = np.random.default_rng(5)
    for c in corpus(80):
        for k in c.degrees:
            grid = table_grid(critical_values(c))
            for _ in range(4):
                a, a2, b, b2 = sorted(rng.choice(grid, size=4).tolist())
                assert check_middle_exactness(c, k, (a, a2, b, b2))
                x, y, u, v = rng.choice(grid, size=4).tolist()
                quad = (min(x, y), max(x, y), min(u, v), max(u, v))
                assert check_weak_exactness(c, k, quad)
