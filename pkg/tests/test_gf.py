import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spirkit import gf
from spirkit.errors import DimensionError, FieldError
from spirkit.gf import FieldMatrix

import oracles


@st.composite
def small_matrices(draw, max_rows=4, max_cols=4):
    q = draw(st.sampled_from([2, 3, 5]))
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    entries = draw(st.lists(st.lists(st.integers(0, q - 1), min_size=cols, max_size=cols),
                            min_size=rows, max_size=rows))
    return q, entries


def test_mat_mul_hand_value():
    a = FieldMatrix(3, [[1, 2], [1, 1], [1, 1], [1, 0]])
    b = FieldMatrix(3, [[1], [2]])
    assert gf.mat_mul(a, b).tolist() == [[2], [0], [0], [1]]
    assert (a @ b).tolist() == oracles.matmul(3, a.tolist(), b.tolist())


def test_mat_mul_shape_mismatch():
    with pytest.raises(DimensionError):
        gf.mat_mul(FieldMatrix(3, [[1, 2]]), FieldMatrix(3, [[1, 2]]))


def test_mixed_fields_rejected():
    with pytest.raises(FieldError):
        gf.mat_mul(FieldMatrix(3, [[1]]), FieldMatrix(5, [[1]]))


@pytest.mark.parametrize("q", [0, 1, 4, 9, 65537])
def test_bad_modulus(q):
    with pytest.raises(FieldError):
        FieldMatrix(q, [[0]])


def test_entries_must_be_reduced():
    with pytest.raises(FieldError):
        FieldMatrix(3, [[3]])
    with pytest.raises(FieldError):
        FieldMatrix(3, [[-1]])
    assert FieldMatrix.reduce(3, [[3, -1]]).tolist() == [[0, 2]]


def test_immutable():
    a = FieldMatrix(3, [[1, 2]])
    with pytest.raises(ValueError):
        a.array[0, 0] = 0


def test_rank_hand_value():
    assert gf.rank(FieldMatrix(3, [[0, 1, 2], [1, 1, 1]])) == 2


def test_empty_shapes():
    e = FieldMatrix.zeros(3, 0, 4)
    assert e.shape == (0, 4)
    assert gf.rank(e) == 0
    assert gf.rank(FieldMatrix.zeros(5, 3, 0)) == 0


def test_solve_left_hand_value():
    a = FieldMatrix(3, [[1, 1, 1], [0, 1, 1], [1, 1, 0]])
    v = gf.solve_left(a, (1, 0, 0))
    assert v == (1, 2, 0)
    assert oracles.vecmat(3, v, a.tolist()) == (1, 0, 0)


def test_solve_left_inconsistent():
    a = FieldMatrix(3, [[0, 1, 2], [1, 1, 1]]).column_block(1, 3)
    assert gf.solve_left(a, (1, 0)) is not None
    assert gf.solve_left(FieldMatrix(3, [[1, 1], [2, 2]]), (1, 0)) is None


def test_vandermonde_explicit_points():
    v = gf.vandermonde(5, 3, 2, points=(2, 4, 3))
    assert v.tolist() == [[1, 2], [1, 4], [1, 3]]


def test_vandermonde_default_points_are_primitive_powers():
    g = gf.primitive_root(5)
    assert g == 2
    v = gf.vandermonde(5, 3, 3)
    assert [row[1] for row in v.tolist()] == [pow(g, i, 5) for i in range(1, 4)]


@pytest.mark.parametrize("kwargs", [
    dict(q=3, n=3, width=2),
    dict(q=5, n=3, width=2, points=(1, 1, 2)),
    dict(q=5, n=3, width=2, points=(0, 1, 2)),
    dict(q=5, n=3, width=2, points=(1, 2)),
])
def test_vandermonde_rejects(kwargs):
    with pytest.raises((FieldError, DimensionError)):
        gf.vandermonde(**kwargs)


@pytest.mark.parametrize("q", [2, 3, 5, 7, 11, 13, 65521])
def test_primitive_root_generates(q):
    g = gf.primitive_root(q)
    if q < 100:
        assert len({pow(g, i, q) for i in range(1, q)}) == q - 1
    for smaller in range(2, min(g, 50)):
        assert len({pow(smaller, i, q) for i in range(1, q)}) < q - 1


def test_all_vectors_order():
    v = gf.all_vectors(3, 2)
    assert v.tolist() == [list(p) for p in itertools.product(range(3), repeat=2)]
    assert gf.all_vectors(3, 0).shape == (1, 0)


def test_iter_matrices_count():
    assert sum(1 for _ in gf.iter_matrices(2, 3, 2)) == 64


def test_dict_round_trip():
    a = FieldMatrix(5, [[1, 2, 3], [4, 0, 1]])
    assert FieldMatrix.from_dict(a.to_dict()) == a
    with pytest.raises((FieldError, DimensionError)):
        FieldMatrix.from_dict({"q": 5, "rows": [[1, 2], [3]]})
    with pytest.raises((FieldError, DimensionError)):
        FieldMatrix.from_dict({"q": 5, "rows": [[1.5]]})


def test_rref_shape():
    r, pivots = gf.rref(FieldMatrix(3, [[0, 2, 1], [0, 1, 2], [1, 0, 0]]))
    assert pivots == [0, 1]
    assert r.tolist()[:2] == [[1, 0, 0], [0, 1, 2]]


@settings(max_examples=150, deadline=None)
@given(small_matrices())
def test_rank_matches_span_count(data):
    q, entries = data
    assert gf.rank(FieldMatrix(q, entries)) == oracles.rank(q, entries)


@settings(max_examples=150, deadline=None)
@given(small_matrices(), st.data())
def test_solve_left_matches_enumeration(data, draw):
    q, entries = data
    target = draw.draw(st.lists(st.integers(0, q - 1), min_size=len(entries[0]), max_size=len(entries[0])))
    sols = oracles.left_solutions(q, entries, target)
    got = gf.solve_left(FieldMatrix(q, entries), target)
    if sols:
        assert got in sols
    else:
        assert got is None


@settings(max_examples=100, deadline=None)
@given(small_matrices(max_rows=3, max_cols=3))
def test_full_rank_square_iff_nonzero_det(data):
    q, entries = data
    n = min(len(entries), len(entries[0]))
    square = [row[:n] for row in entries[:n]]
    assert (gf.rank(FieldMatrix(q, square)) == n) == (oracles.det(q, square) != 0)


@settings(max_examples=100, deadline=None)
@given(small_matrices(), small_matrices())
def test_mat_mul_matches_oracle(a, b):
    q, ea = a
    eb = [[v % q for v in row] for row in b[1]]
    eb = (eb * 4)[: len(ea[0])]
    assert gf.mat_mul(FieldMatrix(q, ea), FieldMatrix(q, eb)).tolist() == oracles.matmul(q, ea, eb)


def test_large_prime_no_overflow():
    q = 65521
    a = FieldMatrix(q, [[q - 1] * 64] * 2)
    assert gf.mat_mul(a, a.T).tolist() == [[64 % q] * 2] * 2
    assert gf.rank(a) == 1


def test_rowspan_contains_basis():
    a = FieldMatrix(3, [[0, 1, 2], [1, 1, 1]])
    assert not gf.rowspan_contains_basis(a, 1)
    assert gf.rowspan_contains_basis(FieldMatrix(3, [[1, 1, 1], [0, 1, 1], [1, 1, 0]]), 1)
    assert isinstance(a.array, np.ndarray)
