"""Numerical invariants read off a rectangle barcode.

The maxima over an empty family (no B or no N rectangles) are 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

from .barcode import RectangleBarcode, fmt_num
from .complex import FilteredComplex
from .interlevel import _level, critical_values

__all__ = [
    "InvariantReport",
    "spectral_invariant_set",
    "boundary_depth",
    "non_cycle_depth",
    "spectral_spread_generator",
    "spectral_spread",
    "spread_bruteforce",
    "invariant_report",
]

INF = math.inf


def spectral_invariant_set(rb: RectangleBarcode) -> Set[float]:
    """Corners of the rectangles with both sides infinite."""
    return {r.c for r in rb if r.rtype == "S"}


def boundary_depth(rb: RectangleBarcode) -> float:
    return max((r.ell2 for r in rb if r.rtype == "B"), default=0.0)


def non_cycle_depth(rb: RectangleBarcode) -> float:
    return max((r.ell1 for r in rb if r.rtype == "N"), default=0.0)


def spectral_spread_generator(rb: RectangleBarcode, name: str, degree: Optional[int] = None) -> float:
    """``min(ell1, ell2)`` of the rectangle witnessed by ``name``.

    Names may repeat across degrees; pass ``degree`` to disambiguate.
    """
    hits = [r for r in rb if r.generator == name and (degree is None or r.degree == degree)]
    if len(hits) != 1:
        where = "" if degree is None else f" in degree {degree}"
        raise KeyError(f"{name!r} witnesses {len(hits)} rectangles{where}, expected exactly one")
    r = hits[0]
    return min(r.ell1, r.ell2)


def spectral_spread(rb: RectangleBarcode, degree: Optional[int] = None) -> float:
    return max(
        (min(r.ell1, r.ell2) for r in rb if degree is None or r.degree == degree),
        default=0.0,
    )


def spread_bruteforce(c: FilteredComplex, k: int) -> float:
    """Spread in degree ``k`` from comparison-map ranks alone.

    Windows run over ``(a, b]`` with ``a`` a critical value or ``-inf``
    and ``b`` a critical value.  A rank that is positive at shift ``d``
    stays positive for smaller shifts, and ranks only change at
    differences of critical values, so the supremum is the largest such
    difference ``d0`` with a positive rank just below it.  A positive
    rank past the whole critical range means the spread is infinite.
    """
    crit = critical_values(c)
    lv = _level(c, k)
    if not crit or lv.n == 0:
        return 0.0
    lefts = [-INF] + crit
    windows = [(a, b) for a in lefts for b in crit if a < b]

    def positive(d: float) -> bool:
        for a, b in windows:
            if lv.map_rank(lv.cls_ab(a, b), lv.cls_ab(a + d, b + d)) > 0:
                return True
        return False

    if positive(crit[-1] - crit[0] + 1):
        return INF
    diffs = sorted({y - x for x in crit for y in crit if y > x})
    if not diffs:
        return 0.0
    levels = sorted(set(diffs) | {0.0})
    eps = min(y - x for x, y in zip(levels, levels[1:])) / 4
    for d0 in reversed(diffs):
        if positive(d0 - eps):
            return d0
    return 0.0


@dataclass
class InvariantReport:
    spectral_set: List[float]
    boundary_depth: float
    non_cycle_depth: float
    spread_global: float
    spread_per_generator: Dict[str, float] = field(default_factory=dict)

    def to_doc(self) -> dict:
        def num(x):
            if x == INF:
                return "inf"
            return int(x) if float(x).is_integer() else x

        return {
            "spectral_set": [num(x) for x in self.spectral_set],
            "boundary_depth": num(self.boundary_depth),
            "non_cycle_depth": num(self.non_cycle_depth),
            "spread_global": num(self.spread_global),
            "spread_per_generator": {k: num(v) for k, v in self.spread_per_generator.items()},
        }

    def to_text(self) -> str:
        lines = [
            "spectral_set: {" + ", ".join(fmt_num(x) for x in self.spectral_set) + "}",
            f"boundary_depth: {fmt_num(self.boundary_depth)}",
            f"non_cycle_depth: {fmt_num(self.non_cycle_depth)}",
            f"spread_global: {fmt_num(self.spread_global)}",
        ]
        lines += [f"spread[{k}]: {fmt_num(v)}" for k, v in self.spread_per_generator.items()]
        return "\n".join(lines) + "\n"


def invariant_report(rb: RectangleBarcode) -> InvariantReport:
    """All invariants at once.  Per-generator keys are ``name`` or,
    when a name labels rectangles in several degrees, ``name@degree``."""
    counts: Dict[str, int] = {}
    for r in rb:
        counts[r.generator] = counts.get(r.generator, 0) + 1
    per = {}
    for r in rb:
        key = r.generator if counts[r.generator] == 1 else f"{r.generator}@{r.degree}"
        per[key] = min(r.ell1, r.ell2)
    return InvariantReport(
        spectral_set=sorted(spectral_invariant_set(rb)),
        boundary_depth=boundary_depth(rb),
        non_cycle_depth=non_cycle_depth(rb),
        spread_global=spectral_spread(rb),
        spread_per_generator=per,
    )
