"""Sublevel barcodes, rectangle barcodes and their verification.

The rectangle barcode is read off the sublevel pairing: an infinite bar
``[c, inf)`` in degree ``k`` gives a rectangle with both sides infinite,
and a finite bar ``[c, d)`` gives a rectangle in degree ``k`` of width
``d - c`` above the diagonal plus one in degree ``k + 1`` of the same
width to the left of it.  That rule is never trusted on its own:
:func:`rectangle_barcode` checks the result against the rank invariant
computed from interlevel homology and raises on any mismatch.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _backend
from .complex import FilteredComplex, Window
from .interlevel import critical_values, rank_table, structure_map_rank

__all__ = [
    "Bar",
    "Rectangle",
    "RectangleBarcode",
    "VerificationFailure",
    "VerificationReport",
    "VerificationError",
    "sublevel_barcode",
    "derive_rectangles",
    "rectangle_barcode",
    "verify_decomposition",
    "rectangle_multiplicity_oracle",
    "bars_to_doc",
    "fmt_num",
]

INF = math.inf


def fmt_num(x: float) -> str:
    """Stable text form of an extended real: ``inf``, ``-inf`` or 12 significant digits."""
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return format(x, ".12g")


def _doc_num(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if float(x).is_integer() and abs(x) < 2**53:
        return int(x)
    return float(x)


def _from_doc_num(x) -> float:
    if x == "inf":
        return INF
    if x == "-inf":
        return -INF
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"expected a number or 'inf', got {x!r}")
    return float(x)


@dataclass(frozen=True, order=True)
class Bar:
    """Half-open bar ``[birth, death)`` of the sublevel barcode."""

    degree: int
    birth: float
    death: float
    birth_generator: str
    death_generator: Optional[str] = None

    def __post_init__(self):
        if not self.birth < self.death:
            raise ValueError(f"bar needs birth < death, got [{self.birth}, {self.death})")
        if math.isinf(self.death) != (self.death_generator is None):
            raise ValueError("death generator must be given exactly for finite bars")

    @property
    def length(self) -> float:
        return self.death - self.birth

    def to_doc(self) -> dict:
        d = {"birth": _doc_num(self.birth), "death": _doc_num(self.death),
             "birth_generator": self.birth_generator}
        if self.death_generator is not None:
            d["death_generator"] = self.death_generator
        return d


RTYPES = ("S", "B", "N")


@dataclass(frozen=True, order=True)
class Rectangle:
    """``R(c; ell1, ell2) = [c - ell1, c) x [c, c + ell2)`` in one degree.

    The finite edges are stored as well as the lengths.  A rectangle
    built with :meth:`from_edges` keeps its edge values exactly, which
    matters when they are filtration values: ``c - (c - x)`` need not
    be ``x`` in floating point.
    """

    degree: int
    c: float
    ell1: float
    ell2: float
    rtype: str = ""
    generator: str = ""
    lo: float = field(default=None, compare=False, repr=False)
    hi: float = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise ValueError("corner must be finite")
        if not (self.ell1 > 0 and self.ell2 > 0):
            raise ValueError("side lengths must be positive")
        inferred = _rtype(self.ell1, self.ell2)
        if self.rtype == "":
            object.__setattr__(self, "rtype", inferred)
        elif self.rtype != inferred:
            raise ValueError(
                f"type {self.rtype!r} does not match lengths ({self.ell1}, {self.ell2})"
            )
        if self.lo is None:
            object.__setattr__(self, "lo", self.c - self.ell1)
        if self.hi is None:
            object.__setattr__(self, "hi", self.c + self.ell2)
        if not self.lo < self.c < self.hi:
            raise ValueError("edges must satisfy left < c < top")

    @classmethod
    def from_edges(cls, degree: int, left: float, c: float, top: float,
                   rtype: str = "", generator: str = "") -> "Rectangle":
        """The rectangle ``[left, c) x [c, top)``; ``left`` may be ``-inf``
        and ``top`` may be ``inf``."""
        return cls(degree, c, c - left, top - c, rtype, generator, left, top)

    @property
    def left(self) -> float:
        return self.lo

    @property
    def top(self) -> float:
        return self.hi

    def contains(self, a: float, b: float) -> bool:
        # an infinite top edge also holds the window bound b = inf
        return self.lo <= a < self.c <= b and (b < self.hi or self.hi == INF)

    def shape(self) -> Tuple[int, float, float, float, str]:
        """Everything except the witness name."""
        return (self.degree, self.c, self.ell1, self.ell2, self.rtype)

    def scaled(self, lam: float) -> "Rectangle":
        return Rectangle.from_edges(self.degree, self.lo * lam, self.c * lam, self.hi * lam,
                                    self.rtype, self.generator)

    def label(self) -> str:
        return f"R({fmt_num(self.c)}; {fmt_num(self.ell1)}, {fmt_num(self.ell2)})"

    def to_doc(self) -> dict:
        d = {"c": _doc_num(self.c), "ell1": _doc_num(self.ell1), "ell2": _doc_num(self.ell2),
             "type": self.rtype, "generator": self.generator}
        # edges that c and the lengths do not reproduce travel explicitly
        if self.lo != self.c - self.ell1:
            d["left"] = _doc_num(self.lo)
        if self.hi != self.c + self.ell2:
            d["top"] = _doc_num(self.hi)
        return d


def _rtype(ell1: float, ell2: float) -> str:
    if ell1 == INF and ell2 == INF:
        return "S"
    if ell1 == INF:
        return "B"
    if ell2 == INF:
        return "N"
    raise ValueError("a rectangle with two finite sides is not a valid summand here")


class RectangleBarcode:
    """Multiset of rectangles over all degrees, kept sorted."""

    __slots__ = ("rectangles",)

    def __init__(self, rectangles: Iterable[Rectangle] = ()):
        self.rectangles: Tuple[Rectangle, ...] = tuple(sorted(rectangles))

    def __iter__(self):
        return iter(self.rectangles)

    def __len__(self) -> int:
        return len(self.rectangles)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RectangleBarcode):
            return NotImplemented
        return self.rectangles == other.rectangles

    def __hash__(self) -> int:
        return hash(self.rectangles)

    def __repr__(self) -> str:
        return "RectangleBarcode([" + ", ".join(
            f"{r.degree}:{r.label()}" for r in self.rectangles) + "])"

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(sorted({r.degree for r in self.rectangles}))

    def in_degree(self, k: int) -> Tuple[Rectangle, ...]:
        return tuple(r for r in self.rectangles if r.degree == k)

    def shape(self) -> Counter:
        """The multiset of rectangles without witness names."""
        return Counter(r.shape() for r in self.rectangles)

    def scaled(self, lam: float) -> "RectangleBarcode":
        return RectangleBarcode(r.scaled(lam) for r in self.rectangles)

    def to_doc(self) -> dict:
        return {
            "degrees": [
                {"degree": k, "rectangles": [r.to_doc() for r in self.in_degree(k)]}
                for k in self.degrees
            ]
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "RectangleBarcode":
        rects = []
        for entry in doc.get("degrees", []):
            k = entry["degree"]
            if isinstance(k, bool) or not isinstance(k, int):
                raise ValueError("degree must be an integer")
            for r in entry.get("rectangles", []):
                edges = [_from_doc_num(r[key]) if key in r else None for key in ("left", "top")]
                rects.append(
                    Rectangle(k, _from_doc_num(r["c"]), _from_doc_num(r["ell1"]),
                              _from_doc_num(r["ell2"]), r.get("type", ""), r.get("generator", ""),
                              *edges)
                )
        return cls(rects)

    def to_text(self, degree: Optional[int] = None) -> str:
        """One line per rectangle: ``deg k: R(c; ell1, ell2) [T] name``."""
        lines = [
            f"deg {r.degree}: {r.label()} [{r.rtype}] {r.generator}"
            for r in self.rectangles
            if degree is None or r.degree == degree
        ]
        return "".join(line + "\n" for line in lines)


def bars_to_doc(bars: Sequence[Bar]) -> dict:
    degs = sorted({b.degree for b in bars})
    return {"degrees": [{"degree": k, "bars": [b.to_doc() for b in bars if b.degree == k]}
                        for k in degs]}


# --------------------------------------------------------------- pairing


def sublevel_barcode(c: FilteredComplex) -> List[Bar]:
    """Bars of sublevel homology in every degree.

    Generators are put in the total order (value, degree, name) and the
    combined boundary matrix is column-reduced.  Pairs whose two values
    coincide have zero length and produce no bar.
    """
    gens = sorted(c.generators(), key=lambda g: g.order_key)
    where = {(g.degree, g.name): i for i, g in enumerate(gens)}
    cols = []
    for g in gens:
        lower = c.generators(g.degree - 1)
        col = c.columns(g.degree)[c.index(g.degree, g.name)]
        v = 0
        i = 0
        while col:
            if col & 1:
                v |= 1 << where[(g.degree - 1, lower[i].name)]
            col >>= 1
            i += 1
        cols.append(v)
    _, lows = _backend.reduce_boundary(cols)
    killed = {low: j for j, low in enumerate(lows) if low >= 0}
    bars = []
    for i, g in enumerate(gens):
        if lows[i] >= 0:
            continue  # g kills a class
        j = killed.get(i)
        if j is None:
            bars.append(Bar(g.degree, g.filtration, INF, g.name))
        elif gens[j].filtration > g.filtration:
            bars.append(Bar(g.degree, g.filtration, gens[j].filtration, g.name, gens[j].name))
    return sorted(bars)


def derive_rectangles(c: FilteredComplex) -> RectangleBarcode:
    """Rectangles from the sublevel pairing, without verification."""
    rects = []
    for bar in sublevel_barcode(c):
        if bar.death == INF:
            rects.append(Rectangle(bar.degree, bar.birth, INF, INF, "S", bar.birth_generator))
        else:
            rects.append(Rectangle.from_edges(bar.degree, -INF, bar.birth, bar.death,
                                              "B", bar.birth_generator))
            rects.append(Rectangle.from_edges(bar.degree + 1, bar.birth, bar.death, INF,
                                              "N", bar.death_generator))
    return RectangleBarcode(rects)


# ---------------------------------------------------------- verification


@dataclass(frozen=True)
class VerificationFailure:
    degree: int
    kind: str  # "dim" or "rank"
    points: Tuple[Tuple[float, float], ...]
    expected: int  # computed from homology
    counted: int  # rectangles containing the point(s)

    def describe(self) -> str:
        pts = " -> ".join(f"({fmt_num(a)}, {fmt_num(b)})" for a, b in self.points)
        what = "dim" if self.kind == "dim" else "map rank"
        return (f"degree {self.degree}: {what} at {pts} is {self.expected}, "
                f"rectangles give {self.counted}")


@dataclass
class VerificationReport:
    dims_checked: int = 0
    ranks_checked: int = 0
    failures: List[VerificationFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok

    @property
    def first(self) -> Optional[VerificationFailure]:
        return self.failures[0] if self.failures else None


class VerificationError(RuntimeError):
    def __init__(self, report: VerificationReport):
        self.report = report
        n = len(report.failures)
        super().__init__(f"rectangle barcode failed verification ({n} mismatches); "
                         f"first: {report.first.describe()}")


def verify_decomposition(c: FilteredComplex, rb: RectangleBarcode, seed: int = 0) -> VerificationReport:
    """Compare ``rb`` with interlevel homology on the rank-table grid.

    Every window dimension must equal the number of rectangles holding
    the point ``(a, b)``; every sampled map rank must equal the number
    holding both endpoints.  All mismatches are reported.
    """
    rep = VerificationReport()
    degrees = sorted(set(c.degrees) | set(rb.degrees))
    for k in degrees:
        rects = rb.in_degree(k)
        table = rank_table(c, k, seed=seed)
        member = _membership(rects, table.windows)
        counted = member[:, table.dim_windows].sum(axis=0)
        rep.dims_checked += len(counted)
        for i in np.nonzero(counted != table.dim_values)[0].tolist():
            p = table.windows[int(table.dim_windows[i])]
            rep.failures.append(
                VerificationFailure(k, "dim", (p,), int(table.dim_values[i]), int(counted[i]))
            )
        both = (member[:, table.pair_w1] & member[:, table.pair_w2]).sum(axis=0)
        rep.ranks_checked += len(both)
        for i in np.nonzero(both != table.pair_ranks)[0].tolist():
            p1 = table.windows[int(table.pair_w1[i])]
            p2 = table.windows[int(table.pair_w2[i])]
            rep.failures.append(
                VerificationFailure(k, "rank", (p1, p2), int(table.pair_ranks[i]), int(both[i]))
            )
    return rep


def _membership(rects: Sequence[Rectangle], windows: Sequence[Tuple[float, float]]) -> np.ndarray:
    """Boolean matrix: rectangle ``r`` contains the point of window ``w``."""
    if not windows:
        return np.zeros((len(rects), 0), dtype=bool)
    a = np.array([w[0] for w in windows])
    b = np.array([w[1] for w in windows])
    out = np.zeros((len(rects), len(windows)), dtype=bool)
    for i, r in enumerate(rects):
        top = np.ones_like(b, dtype=bool) if r.hi == INF else b < r.hi
        out[i] = (a >= r.lo) & (a < r.c) & (b >= r.c) & top
    return out


def rectangle_barcode(c: FilteredComplex) -> RectangleBarcode:
    """The verified rectangle barcode of ``c``.

    Raises :class:`VerificationError` if the derived rectangles disagree
    with the rank invariant anywhere on the grid.
    """
    memo = c._memo.get("rectangle_barcode")
    if memo is not None:
        return memo
    rb = derive_rectangles(c)
    rep = verify_decomposition(c, rb)
    if not rep.ok:
        raise VerificationError(rep)
    c._memo["rectangle_barcode"] = rb
    return rb


def _half_gap(crit: Sequence[float]) -> float:
    gaps = [y - x for x, y in zip(crit, crit[1:])]
    return min(gaps) / 2 if gaps else 0.5


def rectangle_multiplicity_oracle(c: FilteredComplex, k: int, c0: float, l: float, u: float) -> int:
    """Multiplicity of ``R(c0; c0 - l, u - c0)`` in degree ``k`` from map ranks alone.

    With ``eps`` below half the smallest gap between critical values,
    ``N(x, y)`` is the rank from window ``(x, c0]`` to
    ``(c0 - eps, y]``; it counts rectangles with corner ``c0``, left
    edge at most ``x`` and top edge above ``y``.  The alternating sum of
    ``N`` over the four corners ``(l or l - eps, u - eps or u)`` isolates
    left edge ``l`` and top edge ``u``.
    """
    if not (l < c0 < u):
        raise ValueError("need l < c0 < u")
    eps = _half_gap(critical_values(c))

    def rank(x: Optional[float], y: float) -> int:
        # x is None stands for a left edge below -inf: nothing qualifies
        if x is None:
            return 0
        return structure_map_rank(c, k, Window(x, c0), Window(c0 - eps, y))

    top_in = INF if u == INF else u - eps
    left_out = None if l == -INF else l - eps
    total = rank(l, top_in) - rank(left_out, top_in)
    if u != INF:  # nothing has a top edge beyond +inf
        total += rank(left_out, u) - rank(l, u)
    return total
