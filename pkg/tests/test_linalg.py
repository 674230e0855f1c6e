from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from koszulcat import kernels, _kernels_py
from koszulcat.field import GF, QQ, Field, Scalar
from koszulcat.sparse import (
    SparseMatrix, kernel_basis, quotient, rank, rref, solve, image_basis,
)

from oracles import dense_rref

try:
    from koszulcat import _kernels as _kernels_c
except ImportError:  # pragma: no cover
    _kernels_c = None

IMPLS = [_kernels_py] + ([_kernels_c] if _kernels_c else [])


@pytest.fixture(params=IMPLS, ids=lambda m: m.IMPLEMENTATION)
def impl(request, monkeypatch):
    m = request.param
    for name in ("axpy", "reduce_vec", "echelonize", "matmul_cols"):
        monkeypatch.setattr(kernels, name, getattr(m, name))
    return m


F2, F101 = GF(2), GF(101)


def mat(rows, field=QQ):
    return SparseMatrix.from_dense(rows, field)


def test_field_basics():
    assert QQ.tag == "q" and F101.tag == "p=101"
    assert Field.from_tag("p=7") == GF(7)
    with pytest.raises(ValueError):
        GF(9)
    with pytest.raises(ZeroDivisionError):
        QQ.inv(QQ.zero)
    assert Scalar(1, GF(5)) / 2 == 3
    assert Scalar(Fraction(1, 3)) * 3 == 1
    with pytest.raises(ZeroDivisionError):
        Scalar(1, GF(5)) / 5
    assert QQ.from_text(QQ.to_text(QQ.coerce(Fraction(-7, 3)))) == Fraction(-7, 3)


def test_rref_examples(impl):
    r, piv, _ = rref(SparseMatrix.identity(3))
    assert (r, piv) == (3, [0, 1, 2])
    assert rref(mat([[1, 2], [2, 4]]))[0] == 1
    assert rref(mat([[1, 1], [1, 1]], F2))[0] == 1
    assert rref(SparseMatrix.zero(0, 0))[0] == 0


def test_kernel_examples(impl):
    assert kernel_basis(SparseMatrix.zero(2, 3)).ncols == 3
    assert kernel_basis(SparseMatrix.identity(4)).ncols == 0
    K = kernel_basis(mat([[1, 2], [2, 4]]))
    assert K.ncols == 1
    v = K.column(0)
    # proportional to (2, -1)
    assert v.get(0, 0) * -1 == 2 * v.get(1, 0)


def test_quotient_examples(impl):
    proj, sec = quotient(3, SparseMatrix.zero(3, 0))
    assert proj == SparseMatrix.identity(3)
    proj, sec = quotient(2, SparseMatrix.identity(2))
    assert proj.nrows == 0
    sub = mat([[1], [1], [0]])
    proj, sec = quotient(3, sub)
    assert proj.nrows == 2
    assert (proj @ sub).is_zero()
    assert proj @ sec == SparseMatrix.identity(2)
    with pytest.raises(ValueError):
        quotient(4, sub)


def test_stored_entries_are_valid():
    with pytest.raises(ValueError):
        SparseMatrix(2, 2, QQ, {0: {0: QQ.zero}}, check=True)
    with pytest.raises(IndexError):
        SparseMatrix.from_entries(2, 2, [(2, 0, 1)])
    M = SparseMatrix.from_entries(2, 2, [(0, 0, 1), (0, 0, -1), (1, 1, 3)])
    assert M.entries() == [(1, 1, 3)]


def dense_matrices(max_dim=8, field_p=0):
    vals = st.integers(-3, 3)
    return st.integers(0, max_dim).flatmap(
        lambda m: st.integers(0, max_dim).flatmap(
            lambda n: st.lists(st.lists(vals, min_size=n, max_size=n), min_size=m, max_size=m).map(
                lambda rows: (m, n, rows))))


@pytest.mark.parametrize("field", [QQ, F101], ids=["Q", "F101"])
@given(data=dense_matrices())
def test_against_dense_oracle(field, data):
    m, n, rows = data
    M = SparseMatrix.from_entries(m, n, [(i, j, x) for i, r in enumerate(rows) for j, x in enumerate(r) if x], field)
    r, piv, R = rref(M)
    if m and n:
        er, epiv, ER = dense_rref(rows, field.p)
        assert (r, piv) == (er, epiv)
        dense = R.to_dense()
        for i in range(m):
            for j in range(n):
                assert dense[i][j] == field.coerce(ER[i][j])
    else:
        assert r == 0
    assert rank(M) == rank(M.T) == r
    K = kernel_basis(M)
    assert K.ncols == n - r
    assert (M @ K).is_zero()
    assert rank(K) == K.ncols
    proj, sec = quotient(m, M)
    assert proj.nrows == m - r
    assert (proj @ M).is_zero()
    assert proj @ sec == SparseMatrix.identity(m - r, field)
    assert image_basis(M).ncols == r


@given(data=dense_matrices(6), xs=st.lists(st.integers(-4, 4), min_size=6, max_size=6))
def test_solve(data, xs):
    m, n, rows = data
    M = SparseMatrix.from_entries(m, n, [(i, j, x) for i, r in enumerate(rows) for j, x in enumerate(r) if x])
    x = {j: QQ.coerce(xs[j]) for j in range(n) if xs[j]}
    b = M.apply(x)
    y = solve(M, b)
    assert y is not None and M.apply(y) == b
    if rank(M) < m:
        # something outside the image
        proj, sec = quotient(m, M)
        bad = sec.column(0)
        assert solve(M, bad) is None


def test_kernels_agree_on_mod_p_and_q():
    import random
    rnd = random.Random(5)
    for p in (0, 7, 101):
        rows = [{j: rnd.randint(1, 6) for j in rnd.sample(range(30), 5)} for _ in range(25)]
        if p:
            rows = [{j: x % p for j, x in r.items() if x % p} for r in rows]
        else:
            rows = [{j: QQ.coerce(x) for j, x in r.items()} for r in rows]
        results = [m.echelonize([dict(r) for r in rows], p) for m in IMPLS]
        assert all(res[0] == results[0][0] for res in results)


def test_matrix_algebra():
    A = mat([[1, 2], [0, 1]])
    B = mat([[0, 1], [1, 0]])
    assert (A @ B).to_dense() == [[2, 1], [1, 0]]
    assert (A - A).is_zero()
    assert A.T.T == A
    assert (A + B).scale(2) == A.scale(2) + B.scale(2)
    assert A.select_columns([1]).to_dense() == [[2], [1]]
