"""Interleavings of rectangle modules, bottleneck distance, stability runs.

Rectangles here are treated as intervals in the plane: the predicates
look only at their geometry.  Degrees are kept apart in the bottleneck
distance, never inside the predicates.

For a rectangle ``I = [x, c) x [c, y)`` the closed-form test for a
``delta``-interleaving with ``J`` is: both are ``2 delta``-trivial, or
there are nonzero morphisms ``I -> J - delta`` and ``J -> I - delta``
and each round trip covers the support of the ``2 delta`` comparison
map.  :func:`grid_interleaving_oracle` decides the same question by
solving the defining equations on a finite grid.

All comparisons run on exact rationals: every float input is converted
to the :class:`~fractions.Fraction` it denotes, so ``(x - delta) + delta``
is ``x`` again and a candidate ``delta = y - x`` really closes the gap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.ndimage import label as _label
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .barcode import Bar, Rectangle, RectangleBarcode, rectangle_barcode
from .complex import FilteredComplex, PerturbError, perturb
from .gf2 import BitMatrix, solve

__all__ = [
    "Matching",
    "is_delta_trivial",
    "are_delta_interleaved",
    "grid_interleaving_oracle",
    "oracle_grid",
    "delta_matching",
    "bottleneck_distance",
    "bottleneck_by_degree",
    "bottleneck_distance_1d",
    "StabilityTrial",
    "StabilityReport",
    "stability_experiment",
]

INF = math.inf


# ---------------------------------------------------------------- predicates


def _q(x):
    """Exact value of a float; infinities stay as they are."""
    return Fraction(x) if math.isfinite(x) else x


def _edges(r: Rectangle):
    """``(left, c, top)`` of ``r`` as exact values."""
    return _q(r.left), _q(r.c), _q(r.top)


def _width(r: Rectangle):
    """``min(ell1, ell2)``, exactly."""
    lo, c, hi = _edges(r)
    return min(c - lo, hi - c)


def is_delta_trivial(r: Rectangle, delta: float) -> bool:
    """True iff no point ``x`` of ``r`` has ``x + (delta, delta)`` in ``r``."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return _width(r) <= _q(delta)


def _morphism(x1, c1, y1, x2, c2, y2) -> bool:
    """A nonzero map from the module on ``[x1,c1) x [c1,y1)`` to the one on
    ``[x2,c2) x [c2,y2)``: per coordinate ``lo2 <= lo1 < hi2 <= hi1``."""
    return x2 <= x1 < c2 <= c1 and c2 <= c1 < y2 <= y1


def _covers(r, s, d) -> bool:
    """``r`` meets its own ``-2d`` shift inside ``s - d`` (or that meet is empty).
    Both rectangles are given as exact ``(left, c, top)``."""
    (rl, rc, rt), (sl, sc, st) = r, s
    if min(rc - rl, rt - rc) <= 2 * d:
        return True
    return sl - d <= rl and rc - d <= sc and sc - d <= rc and rt - d <= st


def are_delta_interleaved(r1: Rectangle, r2: Rectangle, delta: float) -> bool:
    if delta < 0:
        raise ValueError("delta must be non-negative")
    d = _q(delta)
    e1, e2 = _edges(r1), _edges(r2)
    if _width(r1) <= 2 * d and _width(r2) <= 2 * d:
        return True
    (l1, c1, t1), (l2, c2, t2) = e1, e2
    return (
        _morphism(l1, c1, t1, l2 - d, c2 - d, t2 - d)
        and _morphism(l2, c2, t2, l1 - d, c1 - d, t1 - d)
        and _covers(e1, e2, d)
        and _covers(e2, e1, d)
    )


# ------------------------------------------------------------- grid oracle


def _endpoints(*rects: Rectangle) -> List[float]:
    out = set()
    for r in rects:
        out.add(r.c)
        if r.ell1 != INF:
            out.add(r.left)
        if r.ell2 != INF:
            out.add(r.top)
    return sorted(out)


def oracle_grid(r1: Rectangle, r2: Rectangle, delta: float) -> List[float]:
    """Finite endpoints of both rectangles with their shifts by
    ``0, +-delta, +-2 delta``."""
    return [float(x) for x in _exact_grid(r1, r2, delta)]


def _exact_grid(r1: Rectangle, r2: Rectangle, delta) -> List[Fraction]:
    d = _q(delta)
    e = [_q(x) for x in _endpoints(r1, r2)]
    return sorted({x + t * d for x in e for t in (-2, -1, 0, 1, 2)})


class _Coords:
    """Exact values replaced by their rank among all values in play, so
    the grid arithmetic below runs on integer arrays.  ``-inf`` and
    ``inf`` map below and above every rank."""

    def __init__(self, values):
        finite = sorted({v for v in values if v not in (INF, -INF)})
        self.rank = {v: i for i, v in enumerate(finite)}
        self.rank[-INF] = -1
        self.rank[INF] = len(finite)

    def __call__(self, xs) -> np.ndarray:
        return np.array([self.rank[x] for x in xs], dtype=np.int64)


def _support(pts: np.ndarray, edges) -> Tuple[np.ndarray, np.ndarray]:
    """Per-axis membership of the encoded ``pts`` in ``[lo, c) x [c, hi)``."""
    lo, c, hi = edges
    return (pts >= lo) & (pts < c), (pts >= c) & (pts < hi)


def _outer(ax: Tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    return np.logical_and.outer(ax[0], ax[1])


_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


def _morphism_components(src: np.ndarray, tgt: np.ndarray) -> Tuple[np.ndarray, int]:
    """Free scalars of grid morphisms between interval modules.

    ``src`` and ``tgt`` are the supports on the grid cells.  A morphism
    has one unknown per cell of ``src & tgt``; the commuting squares
    along each covering step either identify two unknowns or force one
    to vanish.  Returns a label per cell (0 = forced zero) and the
    number of free labels.
    """
    var = src & tgt
    labels, n = _label(var, structure=_CROSS)
    if n == 0:
        return labels, 0
    forced = np.zeros(n + 1, dtype=bool)
    for axis in (0, 1):
        lo = [slice(None), slice(None)]
        hi = [slice(None), slice(None)]
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        x_var, y_var = var[tuple(lo)], var[tuple(hi)]
        # x carries an unknown, y is in the target but not the source
        m = x_var & tgt[tuple(hi)] & ~src[tuple(hi)]
        forced[labels[tuple(lo)][m]] = True
        # y carries an unknown, x is in the source but not the target
        m = y_var & src[tuple(lo)] & ~tgt[tuple(lo)]
        forced[labels[tuple(hi)][m]] = True
    forced[0] = True
    free = np.flatnonzero(~forced)
    relabel = np.zeros(n + 1, dtype=np.int64)
    relabel[free] = np.arange(1, len(free) + 1)
    return relabel[labels], len(free)


def grid_interleaving_oracle(
    r1: Rectangle,
    r2: Rectangle,
    delta: float,
    grid: Optional[Sequence[float]] = None,
    max_free: int = 16,
) -> bool:
    """Decide a ``delta``-interleaving by solving the defining equations.

    Unknowns are the values of ``F: M -> N[delta]`` and
    ``G: N -> M[delta]`` on the cells of ``grid x grid`` (plus the cell
    below the grid).  Commuting squares are linear; the two round-trip
    identities are bilinear, so every solution for ``F`` is enumerated
    and the remaining system in ``G`` is solved over GF(2).

    ``grid`` must contain every finite endpoint ``e`` of both rectangles
    together with ``e - delta`` and ``e - 2 delta``; it defaults to
    :func:`oracle_grid`.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    # every float is a dyadic rational, so one power of two turns all
    # of them into integers and the exact arithmetic below stays cheap
    finite = [x for x in _endpoints(r1, r2) + [delta] + list(grid or ()) if math.isfinite(x)]
    unit = max((x.as_integer_ratio()[1] for x in finite), default=1)

    def iq(x):
        if not math.isfinite(x):
            return x
        num, den = x.as_integer_ratio()
        return num * (unit // den)

    d = iq(delta)
    ends = [iq(x) for x in _endpoints(r1, r2)]
    base = {x + t * d for x in ends for t in (-2, -1, 0, 1, 2)}
    if grid is not None:
        have = {iq(x) for x in grid}
        need = {x - t * d for x in ends for t in (0, 1, 2)}
        missing = sorted(x / unit for x in need - have)
        if missing:
            raise ValueError(f"grid is missing {missing[:5]}")
        base |= have
    base = sorted(base)
    cells_q = [-INF] + base
    fine_q = [-INF] + sorted(set(base) | {x - d for x in base})
    e1 = (iq(r1.left), iq(r1.c), iq(r1.top))
    e2 = (iq(r2.left), iq(r2.c), iq(r2.top))
    shifted = lambda e, t: tuple(x - t for x in e)  # noqa: E731
    enc = _Coords(
        cells_q + fine_q + [x + d for x in fine_q] + [x + 2 * d for x in fine_q]
        + list(e1) + list(e2) + list(shifted(e1, d)) + list(shifted(e2, d))
    )
    cells = enc(cells_q)
    fine = enc(fine_q)
    e1i, e2i = tuple(enc(e1)), tuple(enc(e2))
    e1d, e2d = tuple(enc(shifted(e1, d))), tuple(enc(shifted(e2, d)))

    # module supports on the cells
    sup_m = _outer(_support(cells, e1i))
    sup_n = _outer(_support(cells, e2i))
    lab_f, nf = _morphism_components(sup_m, _outer(_support(cells, e2d)))
    lab_g, ng = _morphism_components(sup_n, _outer(_support(cells, e1d)))

    # round trips, evaluated on the refined cells
    fine_d = enc([x + d for x in fine_q])
    fine_2d = enc([x + 2 * d for x in fine_q])
    here = np.searchsorted(cells, fine, side="right") - 1
    ahead = np.searchsorted(cells, fine_d, side="right") - 1

    def phi(e) -> np.ndarray:
        now = _support(fine, e)
        later = _support(fine_2d, e)
        return np.logical_and.outer(now[0] & later[0], now[1] & later[1])

    def triples(lab_first, lab_second, target):
        first = lab_first[here[:, None], here].ravel()
        second = lab_second[ahead[:, None], ahead].ravel()
        width = int(second.max()) + 1
        code = np.unique((first * width + second) * 2 + target.ravel())
        return [(x // 2 // width, x // 2 % width, x & 1) for x in code.tolist()]

    # G(v + delta) F(v) = phi_M(v)  and  F(u + delta) G(u) = phi_N(u)
    eq_m = triples(lab_f, lab_g, phi(e1i))  # (f label, g label, rhs)
    eq_n = [(f, g, t) for g, f, t in triples(lab_g, lab_f, phi(e2i))]
    eqs = eq_m + eq_n

    if nf > max_free:
        raise ValueError(f"too many free scalars for enumeration ({nf})")
    for bits in itertools.product((0, 1), repeat=nf):
        fval = (0,) + bits
        rows = []
        rhs = 0
        feasible = True
        for f, g, t in eqs:
            coef = fval[f]
            if coef and g:
                if t:
                    rhs |= 1 << len(rows)
                rows.append(1 << (g - 1))
            elif t:
                feasible = False
                break
        if not feasible:
            continue
        if not rows:
            return True
        cols = [0] * ng
        for i, row in enumerate(rows):
            cols[row.bit_length() - 1] |= 1 << i
        if solve(BitMatrix(len(rows), ng, cols), rhs) is not None:
            return True
    return False


# ---------------------------------------------------------------- matching


@dataclass
class Matching:
    delta: float
    pairs: List[Tuple[Rectangle, Rectangle]] = field(default_factory=list)
    unmatched_left: List[Rectangle] = field(default_factory=list)
    unmatched_right: List[Rectangle] = field(default_factory=list)


def _perfect(adj: List[List[int]], n: int):
    """Maximum matching on an ``n x n`` bipartite graph; the match array
    if it is perfect, else None."""
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rows, cols = [], []
    for i, nbrs in enumerate(adj):
        rows.extend([i] * len(nbrs))
        cols.extend(nbrs)
    g = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    match = maximum_bipartite_matching(g, perm_type="column")
    if (match < 0).any():
        return None
    return match


def _match_with_escape(left, right, linked, escapable):
    """Perfect matching on items plus dummies.  ``linked(a, b)`` says ``a``
    and ``b`` may pair; ``escapable(x)`` says ``x`` may stay unmatched."""
    n, m = len(left), len(right)
    size = n + m
    adj: List[List[int]] = []
    for i, a in enumerate(left):
        nbrs = [j for j, b in enumerate(right) if linked(a, b)]
        if escapable(a):
            nbrs.append(m + i)
        adj.append(nbrs)
    for j, b in enumerate(right):
        nbrs = [j] if escapable(b) else []
        nbrs.extend(range(m, m + n))
        adj.append(nbrs)
    return _perfect(adj, size)


def delta_matching(rs1: Sequence[Rectangle], rs2: Sequence[Rectangle], delta: float) -> Optional[Matching]:
    """A ``delta``-matching between two lists of same-degree rectangles, or None."""
    rs1, rs2 = list(rs1), list(rs2)
    match = _match_with_escape(
        rs1, rs2,
        lambda a, b: are_delta_interleaved(a, b, delta),
        lambda x: is_delta_trivial(x, 2 * delta),
    )
    if match is None:
        return None
    out = Matching(float(delta))
    m = len(rs2)
    taken = set()
    for i, a in enumerate(rs1):
        j = int(match[i])
        if j < m:
            out.pairs.append((a, rs2[j]))
            taken.add(j)
        else:
            out.unmatched_left.append(a)
    out.unmatched_right = [b for j, b in enumerate(rs2) if j not in taken]
    return out


def _candidates(rs: Sequence[Rectangle]) -> List[Fraction]:
    ends = [_q(x) for x in _endpoints(*rs)] if rs else []
    cands = {Fraction(0)}
    cands.update(abs(x - y) for x in ends for y in ends)
    cands.update(_width(r) / 2 for r in rs if _width(r) != INF)
    return sorted(cands)


def _smallest(cands: Sequence, ok) -> float:
    """Least candidate accepted by the monotone test ``ok``; inf if none."""
    lo, hi = 0, len(cands)
    if not cands or not ok(cands[-1]):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])


def bottleneck_by_degree(b1: RectangleBarcode, b2: RectangleBarcode) -> Dict[int, float]:
    out = {}
    for k in sorted(set(b1.degrees) | set(b2.degrees)):
        r1, r2 = b1.in_degree(k), b2.in_degree(k)
        out[k] = _smallest(
            _candidates(r1 + r2),
            lambda d: delta_matching(r1, r2, d) is not None,
        )
    return out


def bottleneck_distance(b1: RectangleBarcode, b2: RectangleBarcode) -> float:
    """Bottleneck distance; rectangles of different degrees never match."""
    return max(bottleneck_by_degree(b1, b2).values(), default=0.0)


def _bar_cost(a: Bar, b: Bar) -> float:
    if (a.death == INF) != (b.death == INF):
        return INF
    dd = 0.0 if a.death == INF else abs(a.death - b.death)
    return max(abs(a.birth - b.birth), dd)


def bottleneck_distance_1d(s1: Sequence[Bar], s2: Sequence[Bar]) -> float:
    """Bottleneck distance between bar multisets, degree by degree."""
    worst = 0.0
    for k in sorted({b.degree for b in s1} | {b.degree for b in s2}):
        a = [b for b in s1 if b.degree == k]
        c = [b for b in s2 if b.degree == k]
        cands = {0.0}
        cands.update(_bar_cost(x, y) for x in a for y in c)
        cands.update(x.length / 2 for x in a + c)
        cands = sorted(x for x in cands if x != INF)

        def ok(d, a=a, c=c):
            return _match_with_escape(
                a, c, lambda x, y: _bar_cost(x, y) <= d, lambda x: x.length <= 2 * d
            ) is not None

        worst = max(worst, _smallest(cands, ok))
    return worst


# --------------------------------------------------------------- stability


@dataclass
class StabilityTrial:
    trial: int
    delta: float
    d_bot: float
    bound_3delta_ok: bool
    within_delta: bool
    constant: bool = False

    def to_doc(self) -> dict:
        return {
            "trial": self.trial,
            "delta": self.delta,
            "d_bot": "inf" if self.d_bot == INF else self.d_bot,
            "bound_3delta_ok": self.bound_3delta_ok,
        }


@dataclass
class StabilityReport:
    trials: List[StabilityTrial]

    @property
    def ok(self) -> bool:
        return all(t.bound_3delta_ok for t in self.trials)

    @property
    def within_delta_rate(self) -> float:
        if not self.trials:
            return 1.0
        return sum(t.within_delta for t in self.trials) / len(self.trials)

    def to_doc(self) -> list:
        return [t.to_doc() for t in self.trials]


def stability_experiment(
    c: FilteredComplex,
    trials: int = 100,
    magnitude: float = 0.2,
    seed: int = 0,
    constant: bool = False,
    max_rejects: int = 100,
) -> StabilityReport:
    """Perturb filtration values at random and compare rectangle barcodes.

    Each trial draws independent shifts uniform in
    ``[-magnitude, magnitude]`` and retries until the result is still a
    valid complex; after ``max_rejects`` failures it falls back to one
    common shift, which is always valid.  ``constant=True`` uses a
    common shift from the start.  Trials get their own generators
    spawned from ``seed``.
    """
    if magnitude < 0:
        raise ValueError("magnitude must be non-negative")
    base = rectangle_barcode(c)
    keys = [(g.degree, g.name) for g in c.generators()]
    out = []
    for t, ss in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(ss)
        g = None
        used_constant = constant
        if not constant:
            for _ in range(max_rejects):
                vals = rng.uniform(-magnitude, magnitude, size=len(keys)).tolist()
                try:
                    g, delta = perturb(c, dict(zip(keys, vals)))
                    break
                except PerturbError:
                    g = None
        if g is None:
            used_constant = True
            s = float(rng.uniform(-magnitude, magnitude))
            g, delta = perturb(c, {k: s for k in keys})
        d = bottleneck_distance(base, rectangle_barcode(g))
        out.append(
            StabilityTrial(
                trial=t,
                delta=delta,
                d_bot=d,
                bound_3delta_ok=d <= 3 * delta + 1e-9,
                within_delta=d <= delta + 1e-9,
                constant=used_constant,
            )
        )
    return StabilityReport(out)
