"""Interlevel homology ``H_k`` of the quotient complexes ``C^b / C^a``.

Because filtration values live on a fixed basis, the quotient over the
window ``(a, b]`` has the generators with ``a < value <= b`` as a basis,
and its differential is the boundary matrix with everything outside the
window masked off.  All vectors below stay in full degree-``k``
coordinates (bit ``i`` is the ``i``-th degree-``k`` generator); a window
is just a bit mask.

Two windows that contain the same generators give identical chain data,
so every computation is cached on the *window class*: the pair of
positions of ``a`` and ``b`` among the critical values.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _backend
from .complex import FilteredComplex, Window
from .gf2 import SpanBasis, intersection

__all__ = [
    "HomologyPresentation",
    "RankTable",
    "ExactnessResult",
    "critical_values",
    "interlevel_homology",
    "structure_map_rank",
    "comparison_rank",
    "rank_table",
    "table_grid",
    "check_weak_exactness",
    "check_middle_exactness",
    "exactness_sweep",
    "HMAP_FULL_GRID",
    "HMAP_SAMPLE",
    "DIMS_FULL_GRID",
    "DIMS_SAMPLE",
]

INF = math.inf

# rank table budgets
HMAP_FULL_GRID = 25
HMAP_SAMPLE = 2000
DIMS_FULL_GRID = 101
DIMS_SAMPLE = 5000


def critical_values(c: FilteredComplex) -> List[float]:
    """Sorted distinct filtration values of all generators."""
    return sorted({g.filtration for g in c.generators()})


def _as_window(w) -> Window:
    return w if isinstance(w, Window) else Window(*w)


# ------------------------------------------------------------ chain data


class _Level:
    """Per-degree chain data of one complex, with class-keyed caches."""

    __slots__ = ("k", "crit", "n", "n_lo", "pos", "pos_lo", "pos_hi", "d", "d_hi",
                 "_masks", "_masks_lo", "_z", "_b", "_rank")

    def __init__(self, c: FilteredComplex, k: int, crit: List[float]):
        self.k = k
        self.crit = crit
        index = {v: i for i, v in enumerate(crit)}
        self.pos = [index[f] for f in c.filtrations(k)]
        self.pos_lo = [index[f] for f in c.filtrations(k - 1)]
        self.pos_hi = [index[f] for f in c.filtrations(k + 1)]
        self.n = len(self.pos)
        self.n_lo = len(self.pos_lo)
        self.d = c.columns(k)
        self.d_hi = c.columns(k + 1)
        self._masks: Dict[Tuple[int, int], int] = {}
        self._masks_lo: Dict[Tuple[int, int], int] = {}
        self._z: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        self._b: Dict[Tuple[int, int], SpanBasis] = {}
        self._rank: Dict[Tuple[int, int, int, int], int] = {}

    def cls(self, w: Window) -> Tuple[int, int]:
        return self.cls_ab(w.a, w.b)

    def cls_ab(self, a: float, b: float) -> Tuple[int, int]:
        ia = bisect_right(self.crit, a)
        ib = bisect_right(self.crit, b)
        if ib < ia:
            ib = ia
        return ia, ib

    @staticmethod
    def _mask(pos: Sequence[int], ia: int, ib: int) -> int:
        m = 0
        for i, p in enumerate(pos):
            if ia <= p < ib:
                m |= 1 << i
        return m

    def mask(self, key: Tuple[int, int]) -> int:
        m = self._masks.get(key)
        if m is None:
            m = self._masks[key] = self._mask(self.pos, *key)
        return m

    def mask_lo(self, key: Tuple[int, int]) -> int:
        m = self._masks_lo.get(key)
        if m is None:
            m = self._masks_lo[key] = self._mask(self.pos_lo, *key)
        return m

    def cycles(self, key: Tuple[int, int]) -> Tuple[int, ...]:
        """Basis of the cycles of the window (kernel of the masked boundary)."""
        z = self._z.get(key)
        if z is not None:
            return z
        ia, ib = key
        m_lo = self.mask_lo(key)
        n_lo = self.n_lo
        tagged = [
            (self.d[j] & m_lo) | (1 << (n_lo + j))
            for j, p in enumerate(self.pos)
            if ia <= p < ib
        ]
        if n_lo == 0:
            z = tuple(t >> n_lo for t in tagged)
        else:
            reduced, pivots = _backend.eliminate(tagged, n_lo)
            z = tuple(r >> n_lo for r, p in zip(reduced, pivots) if p < 0)
        self._z[key] = z
        return z

    def boundaries(self, key: Tuple[int, int]) -> SpanBasis:
        """Echelon basis of the boundaries of the window.  Do not mutate."""
        b = self._b.get(key)
        if b is not None:
            return b
        ia, ib = key
        m = self.mask(key)
        b = SpanBasis(self.d_hi[j] & m for j, p in enumerate(self.pos_hi) if ia <= p < ib)
        self._b[key] = b
        return b

    def dim(self, key: Tuple[int, int]) -> int:
        return len(self.cycles(key)) - self.boundaries(key).dim

    def map_rank(self, k1: Tuple[int, int], k2: Tuple[int, int]) -> int:
        key = k1 + k2
        r = self._rank.get(key)
        if r is not None:
            return r
        z1 = self.cycles(k1)
        if not z1 or k2[0] >= k2[1]:
            r = 0
        else:
            span = self.boundaries(k2).copy()
            m2 = self.mask(k2)
            r = sum(1 for z in z1 if span.add(z & m2))
        self._rank[key] = r
        return r


def _level(c: FilteredComplex, k: int) -> _Level:
    memo = c._memo.setdefault("interlevel", {})
    lv = memo.get(k)
    if lv is None:
        crit = memo.get("crit")
        if crit is None:
            crit = memo["crit"] = critical_values(c)
        lv = memo[k] = _Level(c, k, crit)
    return lv


# -------------------------------------------------------------- homology


@dataclass(frozen=True)
class HomologyPresentation:
    """``H_k`` of one window.

    ``cycle_basis`` spans the cycles; ``boundary_span`` answers
    membership for the boundaries (a subspace of that span).  Both use
    full degree-``k`` coordinates.
    """

    window: Window
    degree: int
    cycle_basis: Tuple[int, ...]
    boundary_span: SpanBasis = field(compare=False)
    dimension: int
    support: int = 0  # bit mask of the in-window degree-k generators

    def is_zero_class(self, z: int) -> bool:
        return self.boundary_span.contains(z)


def interlevel_homology(c: FilteredComplex, k: int, w) -> HomologyPresentation:
    w = _as_window(w)
    lv = _level(c, k)
    key = lv.cls(w)
    return HomologyPresentation(
        window=w,
        degree=k,
        cycle_basis=lv.cycles(key),
        boundary_span=lv.boundaries(key).copy(),
        dimension=lv.dim(key),
        support=lv.mask(key),
    )


def _check_comparable(w1: Window, w2: Window) -> None:
    if not (w1.a <= w2.a and w1.b <= w2.b):
        raise ValueError(f"windows ({w1.a}, {w1.b}] and ({w2.a}, {w2.b}] are not comparable")


def structure_map_rank(c: FilteredComplex, k: int, w1, w2) -> int:
    """Rank of ``H_k(w1) -> H_k(w2)`` for ``w1 <= w2`` (both bounds rise)."""
    w1, w2 = _as_window(w1), _as_window(w2)
    _check_comparable(w1, w2)
    lv = _level(c, k)
    return lv.map_rank(lv.cls(w1), lv.cls(w2))


def comparison_rank(c: FilteredComplex, k: int, w, d: float) -> int:
    """Rank of the map from ``(a, b]`` to ``(a + d, b + d]``."""
    if not d >= 0:
        raise ValueError("d must be non-negative")
    w = _as_window(w)
    return structure_map_rank(c, k, w, w.shifted(d))


# ------------------------------------------------------------ rank table


def table_grid(crit: Sequence[float]) -> List[float]:
    """Critical values, midpoints, ``min - 1``, ``max + 1`` and both infinities."""
    if not crit:
        return [-INF, INF]
    pts = set(crit)
    pts.update((x + y) / 2 for x, y in zip(crit, crit[1:]))
    pts.update((crit[0] - 1, crit[-1] + 1))
    return [-INF] + sorted(pts) + [INF]


class RankTable:
    """Dimensions and map ranks of one degree over the grid.

    Windows are the grid pairs ``a < b`` in lexicographic order.  The
    data live in index arrays (``dim_windows``/``dim_values`` and
    ``pair_w1``/``pair_w2``/``pair_ranks``); :attr:`dims` and
    :attr:`hmap_ranks` give dictionary views keyed by grid values.
    """

    def __init__(self, degree, grid, windows, dim_windows, dim_values,
                 pair_w1, pair_w2, pair_ranks, sampled):
        self.degree = degree
        self.grid = grid
        self.windows = windows
        self.dim_windows = dim_windows
        self.dim_values = dim_values
        self.pair_w1 = pair_w1
        self.pair_w2 = pair_w2
        self.pair_ranks = pair_ranks
        self.sampled = sampled
        self._dims = None
        self._ranks = None

    @property
    def dims(self) -> Dict[Tuple[float, float], int]:
        if self._dims is None:
            w = self.windows
            self._dims = {w[i]: d for i, d in zip(self.dim_windows.tolist(), self.dim_values.tolist())}
        return self._dims

    @property
    def hmap_ranks(self) -> Dict[Tuple[Tuple[float, float], Tuple[float, float]], int]:
        if self._ranks is None:
            w = self.windows
            self._ranks = {
                (w[i], w[j]): r
                for i, j, r in zip(self.pair_w1.tolist(), self.pair_w2.tolist(), self.pair_ranks.tolist())
            }
        return self._ranks

    def dim(self, a: float, b: float) -> int:
        return self.dims[(a, b)]


@lru_cache(maxsize=64)
def _window_index(n: int):
    """Grid indices of all windows ``i < j`` and the inverse lookup table."""
    wi, wj = np.triu_indices(n, k=1)
    table = np.full((n, n), -1, dtype=np.int64)
    table[wi, wj] = np.arange(len(wi))
    return wi, wj, table


@lru_cache(maxsize=16)
def _all_pairs(n: int):
    """Index pairs of comparable windows (both bounds weakly increase)."""
    wi, wj, _ = _window_index(n)
    ok = (wi[:, None] <= wi[None, :]) & (wj[:, None] <= wj[None, :])
    w1, w2 = np.nonzero(ok)
    return w1, w2


@lru_cache(maxsize=64)
def _sample_pairs(n: int, count: int, seed: int):
    """``count`` random comparable window pairs, as window indices."""
    rng = np.random.default_rng(seed)
    i1 = rng.integers(0, n - 1, size=count)
    j1 = rng.integers(i1 + 1, n)
    i2 = rng.integers(i1, n - 1)
    j2 = rng.integers(np.maximum(j1, i2 + 1), n)
    _, _, table = _window_index(n)
    return table[i1, j1], table[i2, j2]


def rank_table(
    c: FilteredComplex,
    k: int,
    seed: int = 0,
    full_grid: int = HMAP_FULL_GRID,
    sample: int = HMAP_SAMPLE,
) -> RankTable:
    """Dimensions and structure-map ranks over the critical grid.

    Map ranks cover every comparable pair of nonempty grid windows when
    the grid has at most ``full_grid`` points; otherwise ``sample``
    pairs drawn from a generator seeded with ``seed``.  Dimensions cover
    every window up to ``DIMS_FULL_GRID`` grid points and a sample of
    ``DIMS_SAMPLE`` beyond that.  Each distinct window class is
    computed once.
    """
    lv = _level(c, k)
    grid = table_grid(lv.crit)
    n = len(grid)
    wi, wj, _ = _window_index(n)
    windows = [(grid[i], grid[j]) for i, j in zip(wi.tolist(), wj.tolist())]
    gpos = np.array([bisect_right(lv.crit, x) for x in grid], dtype=np.int64)
    stride = len(lv.crit) + 1
    cid = gpos[wi] * stride + gpos[wj]
    sampled = False

    def decode(code: int) -> Tuple[int, int]:
        return divmod(code, stride)

    if n <= DIMS_FULL_GRID:
        dim_windows = np.arange(len(windows))
    else:
        sampled = True
        rng = np.random.default_rng(seed)
        dim_windows = np.sort(rng.choice(len(windows), size=min(DIMS_SAMPLE, len(windows)), replace=False))
    ucls, inv = np.unique(cid[dim_windows], return_inverse=True)
    dim_values = np.array([lv.dim(decode(x)) for x in ucls.tolist()], dtype=np.int64)[inv]

    if n <= full_grid:
        w1, w2 = _all_pairs(n)
    else:
        sampled = True
        w1, w2 = _sample_pairs(n, sample, seed)
    if len(w1):
        key = cid[w1] * (stride * stride) + cid[w2]
        ukey, inv = np.unique(key, return_inverse=True)
        vals = [
            lv.map_rank(decode(x // (stride * stride)), decode(x % (stride * stride)))
            for x in ukey.tolist()
        ]
        ranks = np.array(vals, dtype=np.int64)[inv]
    else:
        ranks = np.zeros(0, dtype=np.int64)
    return RankTable(k, grid, windows, dim_windows, dim_values, w1, w2, ranks, sampled)


# ------------------------------------------------------------- exactness


@dataclass(frozen=True)
class ExactnessResult:
    ok: bool
    condition: str = ""
    witness: Optional[int] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _image(lv: _Level, k1, k2) -> SpanBasis:
    """Preimage in the cycles of ``k2`` of the image of ``H(k1) -> H(k2)``."""
    span = lv.boundaries(k2).copy()
    if k2[0] < k2[1]:
        m2 = lv.mask(k2)
        for z in lv.cycles(k1):
            span.add(z & m2)
    return span


def _kernel(lv: _Level, k1, k2) -> SpanBasis:
    """Preimage in the cycles of ``k1`` of the kernel of ``H(k1) -> H(k2)``."""
    n = lv.n
    z1 = lv.cycles(k1)
    if k2[0] >= k2[1]:
        return SpanBasis(z1)
    m2 = lv.mask(k2)
    rows = list(lv.boundaries(k2).echelon()) + [(z & m2) | (z << n) for z in z1]
    reduced, pivots = _backend.eliminate(rows, n)
    span = SpanBasis(r >> n for r, p in zip(reduced, pivots) if p < 0 and r >> n)
    for b in lv.boundaries(k1).echelon():
        span.add(b)
    return span


def _sum(*spaces: SpanBasis) -> SpanBasis:
    out = SpanBasis()
    for s in spaces:
        for v in s.basis:
            out.add(v)
    return out


def _meet(u: SpanBasis, v: SpanBasis, n: int) -> SpanBasis:
    return SpanBasis(intersection(u.basis, v.basis, n))


def _same(u: SpanBasis, v: SpanBasis) -> Optional[int]:
    """None if the spans agree, else a vector in one but not the other."""
    for x in u.basis:
        if not v.contains(x):
            return x
    for x in v.basis:
        if not u.contains(x):
            return x
    return None


def _weak(lv: _Level, k00, k10, k01, k11) -> ExactnessResult:
    n = lv.n
    img = _image(lv, k00, k11)
    meet = _meet(_image(lv, k10, k11), _image(lv, k01, k11), n)
    bad = _same(img, meet)
    if bad is not None:
        return ExactnessResult(False, "image", bad, "image of the diagonal differs from the intersection of images")
    ker = _kernel(lv, k00, k11)
    both = _sum(_kernel(lv, k00, k10), _kernel(lv, k00, k01))
    bad = _same(ker, both)
    if bad is not None:
        return ExactnessResult(False, "kernel", bad, "kernel of the diagonal differs from the sum of kernels")
    return ExactnessResult(True)


def _middle(lv: _Level, k00, k10, k01, k11) -> ExactnessResult:
    n = lv.n
    lo = (1 << n) - 1
    # image of H(00) -> H(10) + H(01), as a subspace of Z10 + Z01 written x | y << n
    img = SpanBasis()
    m10 = lv.mask(k10) if k10[0] < k10[1] else 0
    m01 = lv.mask(k01) if k01[0] < k01[1] else 0
    for z in lv.cycles(k00):
        img.add((z & m10) | ((z & m01) << n))
    for b in lv.boundaries(k10).echelon():
        img.add(b)
    for b in lv.boundaries(k01).echelon():
        img.add(b << n)
    # kernel of (x, y) -> x + y in H(11)
    m11 = lv.mask(k11) if k11[0] < k11[1] else 0
    rows = list(lv.boundaries(k11).echelon()) if m11 else []
    rows += [(x & m11) | (x << n) for x in lv.cycles(k10)]
    rows += [(y & m11) | (y << (2 * n)) for y in lv.cycles(k01)]
    reduced, pivots = _backend.eliminate(rows, n)
    ker = SpanBasis(r >> n for r, p in zip(reduced, pivots) if p < 0 and r >> n)
    bad = _same(img, ker)
    if bad is not None:
        return ExactnessResult(
            False,
            "middle",
            bad,
            f"image and kernel differ at ({bad & lo:#x}, {bad >> n:#x})",
        )
    return ExactnessResult(True)


def _quad_keys(lv: _Level, a, a2, b, b2):
    return (
        lv.cls(Window(a, b)),
        lv.cls(Window(a2, b)),
        lv.cls(Window(a, b2)),
        lv.cls(Window(a2, b2)),
    )


def check_weak_exactness(c: FilteredComplex, k: int, quad) -> ExactnessResult:
    """Image and kernel conditions on the square with corners ``(a, b)``,
    ``(a', b)``, ``(a, b')``, ``(a', b')``.  ``quad = (a, a', b, b')``."""
    a, a2, b, b2 = quad
    if not (a <= a2 and b <= b2):
        raise ValueError("weak exactness needs a <= a' and b <= b'")
    lv = _level(c, k)
    return _weak(lv, *_quad_keys(lv, a, a2, b, b2))


def check_middle_exactness(c: FilteredComplex, k: int, quad) -> ExactnessResult:
    """Exactness of ``H(a,b) -> H(a',b) + H(a,b') -> H(a',b')`` in the middle,
    for ``a <= a' <= b <= b'``."""
    a, a2, b, b2 = quad
    if not (a <= a2 <= b <= b2):
        raise ValueError("middle exactness needs a <= a' <= b <= b'")
    lv = _level(c, k)
    return _middle(lv, *_quad_keys(lv, a, a2, b, b2))


@dataclass
class SweepReport:
    degree: int
    weak_checked: int = 0
    middle_checked: int = 0
    failures: List[Tuple[str, Tuple[float, float, float, float], ExactnessResult]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def exactness_sweep(c: FilteredComplex, k: int, grid: Optional[Sequence[float]] = None) -> SweepReport:
    """Check both exactness conditions on every quadruple of grid values.

    Quads whose four windows fall in the same classes share one check.
    """
    lv = _level(c, k)
    grid = list(grid) if grid is not None else table_grid(lv.crit)
    rep = SweepReport(k)
    weak_seen: Dict[tuple, ExactnessResult] = {}
    mid_seen: Dict[tuple, ExactnessResult] = {}
    for i, a in enumerate(grid):
        for a2 in grid[i:]:
            for j, b in enumerate(grid):
                for b2 in grid[j:]:
                    keys = _quad_keys(lv, a, a2, b, b2)
                    res = weak_seen.get(keys)
                    if res is None:
                        res = weak_seen[keys] = _weak(lv, *keys)
                    rep.weak_checked += 1
                    if not res:
                        rep.failures.append(("weak", (a, a2, b, b2), res))
                    if a2 <= b:
                        res = mid_seen.get(keys)
                        if res is None:
                            res = mid_seen[keys] = _middle(lv, *keys)
                        rep.middle_checked += 1
                        if not res:
                            rep.failures.append(("middle", (a, a2, b, b2), res))
    return rep
