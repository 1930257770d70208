from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectbar import _backend
from rectbar._kernels_py import eliminate as py_eliminate
from rectbar._kernels_py import reduce_boundary as py_reduce
from rectbar.gf2 import (
    BitMatrix,
    SpanBasis,
    from_bits,
    image_membership_matrix,
    intersection,
    kernel_basis,
    rank,
    solve,
    to_bits,
)


@st.composite
def matrices(draw, max_rows=9, max_cols=9):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    cols = draw(st.lists(st.integers(0, (1 << r) - 1), min_size=c, max_size=c))
    return BitMatrix(r, c, cols)


def image_by_enumeration(m: BitMatrix):
    """Every vector m x, by trying all x.  Slow and obviously right."""
    return {m.matvec(x) for x in range(1 << m.cols)}


# --- small fixed cases ---------------------------------------------------


def test_rank_examples():
    assert rank(BitMatrix(0, 0)) == 0
    assert rank(BitMatrix.identity(2)) == 2
    assert rank(BitMatrix.from_dense([[1, 1], [1, 1]])) == 1


def test_kernel_examples():
    assert kernel_basis(BitMatrix.identity(2)) == []
    assert kernel_basis(BitMatrix.from_dense([[1, 1]])) == [0b11]
    assert sorted(kernel_basis(BitMatrix(0, 3))) == [1, 2, 4]


def test_solve_examples():
    assert solve(BitMatrix.identity(2), from_bits([1, 0])) == from_bits([1, 0])
    x = solve(BitMatrix.from_dense([[1, 1]]), 1)
    assert x in (0b01, 0b10)
    assert solve(BitMatrix(1, 1, [0]), 1) is None


def test_solve_rejects_wrong_width():
    with pytest.raises(ValueError):
        solve(BitMatrix.identity(2), 0b100)


def test_membership_examples():
    s = image_membership_matrix([0b01])
    assert 0b01 in s
    assert 0b10 not in s
    assert 0 in image_membership_matrix([])
    assert s.dim == 1


def test_dense_round_trip_and_indexing():
    table = [[1, 0, 1], [0, 1, 1]]
    m = BitMatrix.from_dense(table)
    assert m.shape == (2, 3)
    assert m.to_dense() == table
    assert m[0, 2] == 1 and m[1, 0] == 0
    assert m.row(1) == from_bits([0, 1, 1])
    assert m.T.to_dense() == [list(r) for r in zip(*table)]
    assert to_bits(m.column(2), 2) == (1, 1)


def test_bitmatrix_rejects_bad_shapes():
    with pytest.raises(ValueError):
        BitMatrix(2, 1, [0b100])
    with pytest.raises(ValueError):
        BitMatrix(2, 2, [1])


def test_matmul_matches_dense_product():
    a = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    b = BitMatrix.from_dense([[1, 0], [1, 1], [0, 1]])
    dense = [[sum(x * y for x, y in zip(row, col)) % 2 for col in zip(*b.to_dense())]
             for row in a.to_dense()]
    assert (a @ b).to_dense() == dense


def test_span_basis_add_and_copy():
    s = SpanBasis()
    assert s.add(0b011)
    assert s.add(0b110)
    assert not s.add(0b101)
    t = s.copy()
    t.add(0b001)
    assert s.dim == 2 and t.dim == 3
    assert s.basis == (0b011, 0b110)


# --- properties ---------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_equals_log_image_size(m):
    assert 1 << rank(m) == len(image_by_enumeration(m))


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    ker = kernel_basis(m)
    assert m.cols == rank(m) + len(ker)
    for v in ker:
        assert m.matvec(v) == 0
    assert SpanBasis(ker).dim == len(ker)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_of_transpose(m):
    assert rank(m) == rank(m.T)


@settings(max_examples=200, deadline=None)
@given(matrices(), st.data())
def test_solve_on_image(m, data):
    w = data.draw(st.integers(0, (1 << m.cols) - 1))
    b = m.matvec(w)
    x = solve(m, b)
    assert x is not None and m.matvec(x) == b


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=6, max_cols=6), st.data())
def test_solve_exact_on_any_rhs(m, data):
    b = data.draw(st.integers(0, (1 << m.rows) - 1))
    x = solve(m, b)
    if x is None:
        assert b not in image_by_enumeration(m)
    else:
        assert m.matvec(x) == b


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7), st.data())
def test_intersection_by_enumeration(n, data):
    vecs = st.lists(st.integers(0, (1 << n) - 1), max_size=n)
    u = SpanBasis(data.draw(vecs)).basis
    v = SpanBasis(data.draw(vecs)).basis

    def span(family):
        out = {0}
        for x in family:
            out |= {y ^ x for y in out}
        return out

    meet = intersection(u, v, n)
    assert span(meet) == span(u) & span(v)
    assert SpanBasis(meet).dim == len(meet)


# --- compiled and pure kernels agree ------------------------------------


@pytest.mark.skipif(_backend.BACKEND != "cython", reason="compiled kernels not built")
@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, (1 << 150) - 1), max_size=70), st.integers(0, 150))
def test_compiled_kernels_agree(vecs, limit):
    from rectbar import _ckernels

    assert _ckernels.eliminate(vecs, limit) == py_eliminate(vecs, limit)
    assert _ckernels.reduce_boundary(vecs) == py_reduce(vecs)


def test_pure_kernels_exhaustive_tiny():
    # every family of up to three vectors of width 3
    for k in range(4):
        for vecs in itertools.product(range(8), repeat=k):
            reduced, pivots = py_eliminate(list(vecs), 3)
            live = [p for p in pivots if p >= 0]
            assert len(set(live)) == len(live)
            assert len(live) == rank(BitMatrix(3, k, list(vecs)))
