"""Linear algebra over GF(2) with int bitsets.

A vector of length ``n`` is a Python ``int`` whose bit ``i`` is the
``i``-th coordinate.  :class:`BitMatrix` stores its columns that way, so a
column is a vector in the row space and ``m @ x`` XORs the columns picked
out by the bits of ``x``.

Elimination runs in column order with the lowest set bit as pivot, which
makes every returned basis deterministic.
"""

from __future__ import annotations

from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from . import _backend

__all__ = [
    "BitMatrix",
    "SpanBasis",
    "rank",
    "kernel_basis",
    "solve",
    "image_membership_matrix",
    "intersection",
    "from_bits",
    "to_bits",
    "popcount",
]


def from_bits(bits: Iterable[int]) -> int:
    """Pack a 0/1 sequence (index 0 first) into an int."""
    v = 0
    for i, b in enumerate(bits):
        if b & 1:
            v |= 1 << i
    return v


def to_bits(v: int, n: int) -> Tuple[int, ...]:
    """Unpack the low ``n`` bits of ``v`` into a tuple."""
    return tuple((v >> i) & 1 for i in range(n))


def popcount(v: int) -> int:
    return bin(v).count("1")


def _check_width(v: int, n: int, what: str) -> None:
    if v < 0 or v >> n:
        raise ValueError(f"{what} does not fit in {n} bits")


class BitMatrix:
    """Immutable ``rows x cols`` matrix over GF(2), stored by columns."""

    __slots__ = ("_rows", "_cols", "_columns", "_hash")

    def __init__(self, rows: int, cols: int, columns: Optional[Sequence[int]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if columns is None:
            columns = (0,) * cols
        columns = tuple(int(c) for c in columns)
        if len(columns) != cols:
            raise ValueError(f"expected {cols} columns, got {len(columns)}")
        for j, c in enumerate(columns):
            _check_width(c, rows, f"column {j}")
        self._rows = rows
        self._cols = cols
        self._columns = columns
        self._hash: Optional[int] = None

    @classmethod
    def from_dense(cls, table: Sequence[Sequence[int]], cols: Optional[int] = None) -> "BitMatrix":
        """Build from a row-major table of 0/1 entries.

        ``cols`` is only needed for matrices with zero rows.
        """
        rows = len(table)
        if rows == 0:
            return cls(0, cols or 0)
        ncols = len(table[0])
        if cols is not None and cols != ncols:
            raise ValueError("cols disagrees with the table width")
        columns = [0] * ncols
        for i, row in enumerate(table):
            if len(row) != ncols:
                raise ValueError("ragged table")
            for j, e in enumerate(row):
                if e not in (0, 1, True, False):
                    raise ValueError(f"entry ({i}, {j}) is not a bit: {e!r}")
                if e:
                    columns[j] |= 1 << i
        return cls(rows, ncols, columns)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> Tuple[int, int]:
        return (self._rows, self._cols)

    @property
    def columns(self) -> Tuple[int, ...]:
        return self._columns

    def column(self, j: int) -> int:
        return self._columns[j]

    def row(self, i: int) -> int:
        if not 0 <= i < self._rows:
            raise IndexError(i)
        v = 0
        for j, c in enumerate(self._columns):
            if (c >> i) & 1:
                v |= 1 << j
        return v

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self._rows and 0 <= j < self._cols):
            raise IndexError(ij)
        return (self._columns[j] >> i) & 1

    def to_dense(self) -> List[List[int]]:
        return [[(c >> i) & 1 for c in self._columns] for i in range(self._rows)]

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self._cols, self._rows, [self.row(i) for i in range(self._rows)])

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def matvec(self, x: int) -> int:
        _check_width(x, self._cols, "vector")
        out = 0
        j = 0
        while x:
            if x & 1:
                out ^= self._columns[j]
            x >>= 1
            j += 1
        return out

    def __matmul__(self, other):
        if isinstance(other, BitMatrix):
            if other.rows != self._cols:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            return BitMatrix(self._rows, other.cols, [self.matvec(c) for c in other.columns])
        return self.matvec(other)

    def is_zero(self) -> bool:
        return not any(self._columns)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and self._columns == other._columns

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._rows, self._cols, self._columns))
        return self._hash

    def __repr__(self) -> str:
        return f"BitMatrix({self._rows}, {self._cols}, {list(self._columns)})"


def rank(m: BitMatrix) -> int:
    """GF(2) rank of ``m``."""
    if m.rows == 0 or m.cols == 0:
        return 0
    _, pivots = _backend.eliminate(m.columns, m.rows)
    return sum(1 for p in pivots if p >= 0)


def kernel_basis(m: BitMatrix) -> List[int]:
    """Basis of ``{x : m x = 0}`` as int bitsets of width ``m.cols``.

    Each column is tagged with its own index above the row bits, so the
    tags of columns that reduce to zero are exactly the kernel vectors.
    """
    n = m.rows
    tagged = [c | (1 << (n + j)) for j, c in enumerate(m.columns)]
    reduced, pivots = _backend.eliminate(tagged, n)
    return [r >> n for r, p in zip(reduced, pivots) if p < 0]


def solve(m: BitMatrix, b: int) -> Optional[int]:
    """Some ``x`` with ``m x = b``, or ``None`` when ``b`` is not in the image."""
    _check_width(b, m.rows, "right-hand side")
    n = m.rows
    tagged = [c | (1 << (n + j)) for j, c in enumerate(m.columns)]
    reduced, pivots = _backend.eliminate(tagged, n)
    owner = {p: r for r, p in zip(reduced, pivots) if p >= 0}
    low_mask = (1 << n) - 1
    v = b
    while v & low_mask:
        low = v & low_mask
        p = (low & -low).bit_length() - 1
        r = owner.get(p)
        if r is None:
            return None
        v ^= r
    return v >> n


class SpanBasis:
    """Echelon basis of a subspace, answering membership queries.

    Rows are kept keyed by their lowest set bit, so reducing a vector
    costs at most one XOR per basis element.  ``add`` mutates; the
    module-level functions never hand out an instance they still use.
    """

    __slots__ = ("_owner", "_basis")

    def __init__(self, vectors: Iterable[int] = ()):
        self._owner: dict = {}
        self._basis: List[int] = []
        for v in vectors:
            self.add(v)

    def reduce(self, v: int) -> int:
        owner = self._owner
        while v:
            p = (v & -v).bit_length() - 1
            r = owner.get(p)
            if r is None:
                return v
            v ^= r
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; return True iff it enlarged the span."""
        r = self.reduce(v)
        if not r:
            return False
        self._owner[(r & -r).bit_length() - 1] = r
        self._basis.append(v)
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    __contains__ = contains

    @property
    def dim(self) -> int:
        return len(self._owner)

    def __len__(self) -> int:
        return len(self._owner)

    @property
    def basis(self) -> Tuple[int, ...]:
        """The inserted vectors that were independent, in insertion order."""
        return tuple(self._basis)

    def echelon(self) -> Tuple[int, ...]:
        return tuple(self._owner[p] for p in sorted(self._owner))

    def copy(self) -> "SpanBasis":
        out = SpanBasis()
        out._owner = dict(self._owner)
        out._basis = list(self._basis)
        return out

    def __iter__(self) -> Iterator[int]:
        return iter(self._basis)

    def __repr__(self) -> str:
        return f"SpanBasis(dim={self.dim})"


def image_membership_matrix(generators: Iterable[int]) -> SpanBasis:
    """Reduced form of ``span(generators)`` for membership queries."""
    return SpanBasis(generators)


def intersection(u: Sequence[int], v: Sequence[int], n: int) -> List[int]:
    """Basis of ``span(u) & span(v)`` inside GF(2)^n (Zassenhaus).

    Both inputs must be linearly independent families.
    """
    rows = [x | (x << n) for x in u] + list(v)
    reduced, pivots = _backend.eliminate(rows, n)
    return [r >> n for r, p in zip(reduced, pivots) if p < 0 and r >> n]
