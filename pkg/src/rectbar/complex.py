"""Filtered chain complexes over GF(2).

A :class:`FilteredComplex` is a graded vector space with one basis
element (a :class:`Generator`) per critical point, a boundary matrix in
each degree, and a finite filtration value per generator.  The value of
a chain is the maximum over its support, so the two axioms
(``d o d = 0`` and boundaries never raise the filtration) can be checked
on the basis.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .gf2 import BitMatrix, kernel_basis

__all__ = [
    "Generator",
    "FilteredComplex",
    "Window",
    "Violation",
    "ValidationReport",
    "StructuralError",
    "ParseError",
    "SemanticError",
    "InvariantViolation",
    "PerturbError",
    "validate",
    "parse",
    "serialize",
    "fixture_torus",
    "fixture_heart_circle",
    "fixture_h_sphere",
    "perturb",
    "shift",
    "scale",
    "random_complex",
]


class StructuralError(ValueError):
    """The complex is malformed (matrix shapes, duplicate names, bad values)."""


class ParseError(ValueError):
    """Syntax error in a complex document, with a 1-based position."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg = msg
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {msg}" if line else msg)


class SemanticError(ValueError):
    """Well-formed document that names something impossible."""

    def __init__(self, msg: str, name: Optional[str] = None):
        self.name = name
        super().__init__(msg)


class InvariantViolation(ValueError):
    """The complex breaks an axiom; ``report`` lists every violation."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(v.message for v in report.violations))


class PerturbError(ValueError):
    """Shifted filtration is not monotone along some boundary entry."""

    def __init__(self, source: "Generator", target: "Generator"):
        self.witness = (source.name, target.name)
        self.source = source
        self.target = target
        super().__init__(
            f"boundary of {source.name} contains {target.name} but the shifted "
            f"values are {source.filtration!r} < {target.filtration!r}"
        )


@dataclass(frozen=True, order=True)
class Generator:
    name: str
    degree: int
    filtration: float

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise StructuralError(f"generator name must be a non-empty string, got {self.name!r}")
        if isinstance(self.degree, bool) or not isinstance(self.degree, int):
            raise StructuralError(f"degree of {self.name} must be an integer")
        if isinstance(self.filtration, bool) or not isinstance(self.filtration, (int, float)):
            raise StructuralError(f"filtration of {self.name} must be a number")
        if not math.isfinite(self.filtration):
            raise StructuralError(f"filtration of {self.name} must be finite, got {self.filtration!r}")

    @property
    def order_key(self) -> Tuple[float, int, str]:
        """Position in the total order used to break filtration ties."""
        return (self.filtration, self.degree, self.name)


@dataclass(frozen=True)
class Window:
    """The half-open action window ``(a, b]``."""

    a: float
    b: float

    def __post_init__(self):
        if math.isnan(self.a) or math.isnan(self.b):
            raise ValueError("window bounds may not be NaN")

    @property
    def empty(self) -> bool:
        return self.a >= self.b

    def __contains__(self, t: float) -> bool:
        return self.a < t <= self.b

    def shifted(self, d: float) -> "Window":
        return Window(self.a + d, self.b + d)

    def __le__(self, other: "Window") -> bool:
        return self.a <= other.a and self.b <= other.b


class FilteredComplex:
    """A finite filtered chain complex over GF(2).

    ``generators`` maps each degree to its ordered generators; degree
    ``k`` coordinates follow that order.  ``boundaries[k]`` lists one
    int bitset per degree-``k`` generator, over degree ``k - 1``
    coordinates.  Missing degrees mean zero.

    Instances are treated as immutable.  ``_memo`` caches derived data
    (interlevel presentations and the like) and takes no part in
    equality.
    """

    def __init__(
        self,
        generators: Mapping[int, Sequence[Generator]],
        boundaries: Optional[Mapping[int, Union[BitMatrix, Sequence[int]]]] = None,
    ):
        gens: Dict[int, Tuple[Generator, ...]] = {}
        for k in sorted(generators):
            gs = tuple(generators[k])
            if not gs:
                continue
            seen = set()
            for g in gs:
                if not isinstance(g, Generator):
                    raise StructuralError(f"degree {k}: expected Generator, got {g!r}")
                if g.degree != k:
                    raise StructuralError(f"generator {g.name} has degree {g.degree} but is listed in degree {k}")
                if g.name in seen:
                    raise StructuralError(f"duplicate generator name {g.name!r} in degree {k}")
                seen.add(g.name)
            gens[k] = gs
        self._gens = gens
        self._index = {k: {g.name: i for i, g in enumerate(gs)} for k, gs in gens.items()}

        cols: Dict[int, Tuple[int, ...]] = {}
        for k, d in (boundaries or {}).items():
            n_src = len(gens.get(k, ()))
            n_tgt = len(gens.get(k - 1, ()))
            if isinstance(d, BitMatrix):
                if d.shape != (n_tgt, n_src):
                    raise StructuralError(
                        f"boundary in degree {k} has shape {d.shape}, expected {(n_tgt, n_src)}"
                    )
                column_list = d.columns
            else:
                column_list = tuple(int(c) for c in d)
                if len(column_list) != n_src:
                    raise StructuralError(
                        f"boundary in degree {k} has {len(column_list)} columns, expected {n_src}"
                    )
                for j, c in enumerate(column_list):
                    if c < 0 or c >> n_tgt:
                        raise StructuralError(
                            f"boundary column of {gens[k][j].name} has entries outside degree {k - 1}"
                        )
            if any(column_list):
                cols[k] = tuple(column_list)
        self._cols = cols
        self._memo: dict = {}

    @classmethod
    def build(
        cls,
        generators: Mapping[int, Iterable[Tuple[str, float]]],
        boundary: Optional[Mapping[int, Mapping[str, Iterable[str]]]] = None,
    ) -> "FilteredComplex":
        """Convenience constructor from names.

        ``generators[k]`` is a list of ``(name, filtration)`` and
        ``boundary[k][source]`` lists the target names in degree ``k - 1``.
        """
        gens = {k: [Generator(n, k, f) for n, f in gs] for k, gs in generators.items()}
        index = {k: {g.name: i for i, g in enumerate(gs)} for k, gs in gens.items()}
        cols: Dict[int, List[int]] = {}
        for k, table in (boundary or {}).items():
            if k not in index:
                if table:
                    name = next(iter(table))
                    raise SemanticError(f"unknown generator {name!r} in degree {k}", name)
                continue
            col = [0] * len(gens[k])
            lower = index.get(k - 1, {})
            for src, targets in table.items():
                if src not in index[k]:
                    raise SemanticError(f"unknown generator {src!r} in degree {k}", src)
                v = 0
                for t in targets:
                    if t not in lower:
                        raise SemanticError(f"unknown generator {t!r} in degree {k - 1}", t)
                    v ^= 1 << lower[t]
                col[index[k][src]] = v
            cols[k] = col
        return cls(gens, cols)

    @property
    def degrees(self) -> Tuple[int, ...]:
        """Degrees that carry at least one generator, ascending."""
        return tuple(self._gens)

    def generators(self, k: Optional[int] = None) -> Tuple[Generator, ...]:
        if k is None:
            return tuple(g for gs in self._gens.values() for g in gs)
        return self._gens.get(k, ())

    def size(self, k: Optional[int] = None) -> int:
        if k is None:
            return sum(len(gs) for gs in self._gens.values())
        return len(self._gens.get(k, ()))

    def index(self, k: int, name: str) -> int:
        return self._index[k][name]

    def generator(self, name: str, degree: Optional[int] = None) -> Generator:
        """Look a generator up by name (and degree, when names repeat)."""
        hits = [
            self._gens[k][idx[name]]
            for k, idx in self._index.items()
            if name in idx and (degree is None or degree == k)
        ]
        if not hits:
            raise KeyError(name)
        if len(hits) > 1:
            raise KeyError(f"name {name!r} occurs in several degrees; pass degree=")
        return hits[0]

    def columns(self, k: int) -> Tuple[int, ...]:
        """Boundary columns of degree ``k`` as bitsets over degree ``k - 1``."""
        c = self._cols.get(k)
        if c is None:
            return (0,) * self.size(k)
        return c

    def boundary(self, k: int) -> BitMatrix:
        return BitMatrix(self.size(k - 1), self.size(k), self.columns(k))

    def filtrations(self, k: int) -> Tuple[float, ...]:
        return tuple(g.filtration for g in self._gens.get(k, ()))

    def boundary_names(self, k: int) -> Dict[str, Tuple[str, ...]]:
        lower = self._gens.get(k - 1, ())
        out = {}
        for g, c in zip(self._gens.get(k, ()), self.columns(k)):
            if c:
                out[g.name] = tuple(lower[i].name for i in range(len(lower)) if (c >> i) & 1)
        return out

    def _key(self):
        return (
            tuple((k, gs) for k, gs in self._gens.items()),
            tuple(sorted(self._cols.items())),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, FilteredComplex):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        parts = ", ".join(f"{k}: {len(gs)}" for k, gs in self._gens.items())
        return f"FilteredComplex({{{parts}}})"

    def with_filtrations(self, values: Mapping[Tuple[int, str], float]) -> "FilteredComplex":
        """Same boundaries, new filtration values keyed by ``(degree, name)``."""
        gens = {
            k: [Generator(g.name, k, values.get((k, g.name), g.filtration)) for g in gs]
            for k, gs in self._gens.items()
        }
        return FilteredComplex(gens, self._cols)


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    kind: str  # "boundary_squared" or "filtration"
    degree: int
    witness: Tuple[str, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(c: FilteredComplex) -> ValidationReport:
    """Check both axioms on the basis and list every violation."""
    out: List[Violation] = []
    for k in c.degrees:
        lower = c.generators(k - 1)
        for g, col in zip(c.generators(k), c.columns(k)):
            if not col:
                continue
            for i, y in enumerate(lower):
                if (col >> i) & 1 and y.filtration > g.filtration:
                    out.append(
                        Violation(
                            "filtration",
                            k,
                            (g.name, y.name),
                            f"boundary of {g.name} (filtration {g.filtration!r}) contains "
                            f"{y.name} (filtration {y.filtration!r})",
                        )
                    )
    for k in c.degrees:
        d_lo = c.boundary(k - 1)
        for g, col in zip(c.generators(k), c.columns(k)):
            if col and d_lo.matvec(col):
                out.append(
                    Violation(
                        "boundary_squared",
                        k,
                        (g.name,),
                        f"boundary of the boundary of {g.name} (degree {k}) is nonzero",
                    )
                )
    return ValidationReport(tuple(out))


# ------------------------------------------------------------------- format


def _position(text: str, pos: int) -> Tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _reject_constant(name: str):
    raise ParseError(f"non-finite number {name} is not allowed")


def parse(text: Union[bytes, str], validate_result: bool = True) -> FilteredComplex:
    """Read a complex document.

    Raises :class:`ParseError` for malformed text, :class:`SemanticError`
    for undefined or duplicate names and bad values, and
    :class:`InvariantViolation` when the complex breaks an axiom
    (unless ``validate_result`` is false).
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"input is not UTF-8: {e.reason}", 1, e.start + 1) from None
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    except ParseError as e:
        bad = re.search(r"-?Infinity|NaN", text)
        line, col = _position(text, bad.start()) if bad else (0, 0)
        raise ParseError(e.msg, line, col) from None

    if not isinstance(doc, dict):
        raise SemanticError("top level must be an object")
    extra = set(doc) - {"field", "degrees", "boundaries"}
    if extra:
        raise SemanticError(f"unknown top-level keys: {sorted(extra)}")
    if doc.get("field") != "GF2":
        raise SemanticError(f'"field" must be "GF2", got {doc.get("field")!r}')
    degrees = doc.get("degrees", [])
    boundaries = doc.get("boundaries", [])
    if not isinstance(degrees, list) or not isinstance(boundaries, list):
        raise SemanticError('"degrees" and "boundaries" must be arrays')

    gens: Dict[int, List[Tuple[str, float]]] = {}
    for entry in degrees:
        k = _int_field(entry, "degree", "degree entry")
        glist = entry.get("generators", [])
        if not isinstance(glist, list):
            raise SemanticError(f"degree {k}: generators must be an array")
        if k in gens:
            raise SemanticError(f"degree {k} listed twice")
        names = set()
        items = []
        for g in glist:
            if not isinstance(g, dict) or not isinstance(g.get("name"), str) or not g.get("name"):
                raise SemanticError(f"degree {k}: each generator needs a non-empty string name")
            name = g["name"]
            f = g.get("filtration")
            if isinstance(f, bool) or not isinstance(f, (int, float)):
                raise SemanticError(f"generator {name!r}: filtration must be a number", name)
            if not math.isfinite(f):
                raise SemanticError(f"generator {name!r}: filtration must be finite", name)
            if name in names:
                raise SemanticError(f"duplicate generator name {name!r} in degree {k}", name)
            names.add(name)
            items.append((name, float(f)))
        gens[k] = items

    table: Dict[int, Dict[str, List[str]]] = {}
    for entry in boundaries:
        k = _int_field(entry, "degree", "boundary entry")
        cols = entry.get("columns", [])
        if not isinstance(cols, list):
            raise SemanticError(f"boundary degree {k}: columns must be an array")
        known = {n for n, _ in gens.get(k, [])}
        lower = {n for n, _ in gens.get(k - 1, [])}
        dest = table.setdefault(k, {})
        for col in cols:
            if not isinstance(col, dict) or not isinstance(col.get("source"), str):
                raise SemanticError(f"boundary degree {k}: each column needs a string source")
            src = col["source"]
            if src not in known:
                raise SemanticError(f"unknown generator {src!r} in degree {k}", src)
            if src in dest:
                raise SemanticError(f"column for {src!r} listed twice", src)
            targets = col.get("targets", [])
            if not isinstance(targets, list) or not all(isinstance(t, str) for t in targets):
                raise SemanticError(f"column {src!r}: targets must be an array of names", src)
            for t in targets:
                if t not in lower:
                    raise SemanticError(f"unknown generator {t!r} in degree {k - 1}", t)
            if len(set(targets)) != len(targets):
                raise SemanticError(f"column {src!r}: repeated target", src)
            dest[src] = targets

    c = FilteredComplex.build(gens, table)
    if validate_result:
        report = validate(c)
        if not report.ok:
            raise InvariantViolation(report)
    return c


def _int_field(entry, key: str, what: str) -> int:
    if not isinstance(entry, dict):
        raise SemanticError(f"each {what} must be an object")
    k = entry.get(key)
    if isinstance(k, bool) or not isinstance(k, int):
        raise SemanticError(f"{what}: {key!r} must be an integer")
    return k


def _num(x: float):
    if float(x).is_integer() and abs(x) < 2**53:
        return int(x)
    return float(x)


def serialize(c: FilteredComplex) -> bytes:
    """Canonical document: degrees ascending, generators in stored order,
    columns sorted by source name and targets by name; zero columns omitted."""
    degrees = [
        {
            "degree": k,
            "generators": [{"name": g.name, "filtration": _num(g.filtration)} for g in c.generators(k)],
        }
        for k in c.degrees
    ]
    boundaries = []
    for k in c.degrees:
        names = c.boundary_names(k)
        if not names:
            continue
        boundaries.append(
            {
                "degree": k,
                "columns": [
                    {"source": s, "targets": sorted(names[s])} for s in sorted(names)
                ],
            }
        )
    doc = {"field": "GF2", "degrees": degrees, "boundaries": boundaries}
    return (json.dumps(doc, indent=2, allow_nan=False) + "\n").encode("utf-8")


# ----------------------------------------------------------------- fixtures


def fixture_torus() -> FilteredComplex:
    """Height function on the upright torus: four critical points, zero differential."""
    return FilteredComplex.build(
        {0: [("p_1", 1)], 1: [("p_2", 2), ("p_3", 3)], 2: [("p_4", 4)]},
    )


def fixture_heart_circle() -> FilteredComplex:
    """Heart-shaped circle: two minima and two maxima."""
    return FilteredComplex.build(
        {0: [("p_1", 1), ("p_2", 2)], 1: [("p_3", 3), ("p_4", 4)]},
        {1: {"p_3": ["p_1", "p_2"], "p_4": ["p_1", "p_2"]}},
    )


def fixture_h_sphere() -> FilteredComplex:
    """H-shaped sphere: six critical points in degrees 0, 1, 2."""
    return FilteredComplex.build(
        {
            0: [("p_1", 1), ("p_2", 2)],
            1: [("p_3", 3), ("p_4", 4)],
            2: [("p_5", 5), ("p_6", 6)],
        },
        {1: {"p_3": ["p_1", "p_2"]}, 2: {"p_5": ["p_4"], "p_6": ["p_4"]}},
    )


# ----------------------------------------------------------- transformations


ShiftKey = Union[str, Tuple[int, str]]


def _lookup_shift(shifts: Mapping[ShiftKey, float], g: Generator) -> float:
    if (g.degree, g.name) in shifts:
        return shifts[(g.degree, g.name)]
    return shifts.get(g.name, 0.0)


def perturb(c: FilteredComplex, shifts: Mapping[ShiftKey, float]) -> Tuple[FilteredComplex, float]:
    """Add a per-generator shift to every filtration value.

    ``shifts`` is keyed by name or by ``(degree, name)``; missing
    generators keep their value.  Returns ``(complex, sup_norm)``, where
    ``sup_norm`` is the largest absolute shift actually applied.  Raises
    :class:`PerturbError` naming the first boundary entry whose shifted
    values break monotonicity.
    """
    known = {g.name for g in c.generators()} | {(g.degree, g.name) for g in c.generators()}
    for key in shifts:
        if key not in known:
            raise KeyError(f"no generator {key!r}")
    values = {}
    norm = 0.0
    for g in c.generators():
        s = float(_lookup_shift(shifts, g))
        if not math.isfinite(s):
            raise ValueError(f"shift for {g.name} must be finite")
        values[(g.degree, g.name)] = g.filtration + s
        norm = max(norm, abs(s))
    out = c.with_filtrations(values)
    for k in out.degrees:
        lower = out.generators(k - 1)
        for g, col in zip(out.generators(k), out.columns(k)):
            for i, y in enumerate(lower):
                if (col >> i) & 1 and y.filtration > g.filtration:
                    raise PerturbError(g, y)
    return out, norm


def shift(c: FilteredComplex, s: float) -> FilteredComplex:
    """Translate every filtration value by ``s``; always valid."""
    return c.with_filtrations({(g.degree, g.name): g.filtration + s for g in c.generators()})


def scale(c: FilteredComplex, lam: float) -> FilteredComplex:
    """Multiply every filtration value by ``lam > 0``."""
    if not (isinstance(lam, (int, float)) and math.isfinite(lam) and lam > 0):
        raise ValueError(f"scale factor must be a positive finite number, got {lam!r}")
    return c.with_filtrations({(g.degree, g.name): g.filtration * lam for g in c.generators()})


def random_complex(
    seed: int,
    n_generators: int = 8,
    n_degrees: int = 3,
    ties: bool = False,
    zero_prob: float = 0.25,
) -> FilteredComplex:
    """Deterministic random valid complex.

    Generators are spread over degrees ``0 .. n_degrees - 1``.  Values
    are distinct integers, or small integers with repeats when ``ties``
    is set.  The boundary of ``x`` is a random cycle of the lower degree
    supported on generators of strictly smaller value, so both axioms
    hold by construction.
    """
    if n_generators < 0 or n_degrees < 0:
        raise ValueError("sizes must be non-negative")
    rng = random.Random(seed)
    if n_generators == 0 or n_degrees == 0:
        return FilteredComplex({})
    if ties:
        values = [float(rng.randint(1, max(2, n_generators // 2))) for _ in range(n_generators)]
    else:
        values = [float(v) for v in rng.sample(range(1, 4 * n_generators + 1), n_generators)]
    degs = sorted(rng.randrange(n_degrees) for _ in range(n_generators))
    gens: Dict[int, List[Generator]] = {}
    for i, (k, v) in enumerate(zip(degs, values)):
        gens.setdefault(k, []).append(Generator(f"x{i}", k, v))

    cols: Dict[int, List[int]] = {}
    for k in sorted(gens):
        lower = gens.get(k - 1, [])
        d_lower = cols.get(k - 1, [0] * len(lower))
        column = []
        for g in gens[k]:
            support = [i for i, y in enumerate(lower) if y.filtration < g.filtration]
            if not support or rng.random() < zero_prob:
                column.append(0)
                continue
            sub = BitMatrix(len(gens.get(k - 2, [])), len(support), [d_lower[i] for i in support])
            v = 0
            for z in kernel_basis(sub):
                if rng.random() < 0.5:
                    for j, i in enumerate(support):
                        if (z >> j) & 1:
                            v ^= 1 << i
            column.append(v)
        cols[k] = column
    return FilteredComplex(gens, cols)
