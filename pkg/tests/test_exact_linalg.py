from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from stokesdata.errors import UsageError
from stokesdata.exact_linalg import (ExactMatrix, GaussianRational, RationalPolynomial, charpoly,
                                     conjugacy_equivalent, det, inverse, jordan_sizes_from_ranks,
                                     mat_mul, nullspace, rank, rank_sequence,
                                     subspace_intersection, subspace_sum)

M = ExactMatrix.from_rows
x = RationalPolynomial.x()


def test_gaussian_rational_normalization():
    z = GaussianRational(Fraction(2, 4), Fraction(-3, 6))
    assert z.to_quad() == [1, 2, -1, 2]
    assert GaussianRational(0).to_quad() == [0, 1, 0, 1]
    with pytest.raises(UsageError):
        GaussianRational.coerce(0.5)
    with pytest.raises(UsageError):
        GaussianRational.from_quad([1, 0, 0, 1])


def test_mat_mul_examples():
    A = M([[0, 2], [1, 0]])
    assert mat_mul(ExactMatrix.identity(2), A) == A
    assert mat_mul(A, A) == M([[2, 0], [0, 2]])
    half = Fraction(1, 2)
    assert M([[2, 0], [0, 2]]) @ M([[1, 1 + half], [0, -1]]) == M([[2, 3], [0, -2]])
    with pytest.raises(UsageError):
        mat_mul(M([[1, 2]]), M([[1, 2]]))


def test_rank_examples():
    assert rank(ExactMatrix.zeros(3, 3)) == 0
    assert rank(ExactMatrix.identity(3)) == 3
    assert rank(M([[1, 1], [1, 1]])) == 1
    assert rank(M([[1, 1j], [1j, -1]])) == 1


def test_subspace_intersection_examples():
    e = lambda *v: M([[c] for c in v])
    assert subspace_intersection(e(1, 0), e(0, 1)).cols == 0
    got = subspace_intersection(ExactMatrix.identity(2), e(1, 1))
    assert got.cols == 1 and rank(got.hstack(e(1, 1))) == 1
    A = M([[1, 0], [0, 1], [0, 0]])
    B = M([[0, 0], [1, 0], [0, 1]])
    got = subspace_intersection(A, B)
    assert got.cols == 1 and rank(got.hstack(e(0, 1, 0))) == 1
    # same answer without the coordinate-subspace shortcut
    got2 = subspace_intersection(M([[1, 1], [0, 1], [0, 0]]), B)
    assert got2.cols == 1 and rank(got2.hstack(e(0, 1, 0))) == 1
    with pytest.raises(UsageError):
        subspace_intersection(e(1, 0), e(1, 0, 0))


def test_charpoly_examples():
    assert charpoly(ExactMatrix.identity(2)) == (x - 1) ** 2
    assert charpoly(M([[0, 2], [1, 0]])) == x ** 2 - 2
    assert charpoly(M([[3, 2], [-2, -1]])) == (x - 1) ** 2
    assert str(charpoly(M([[3, 2], [-2, -1]]))) == "x^2 - 2*x + 1"
    with pytest.raises(UsageError):
        charpoly(M([[1, 2]]))


def test_conjugacy_examples():
    A = M([[1, 2, 0], [0, 1, 0], [3, 0, 2]])
    P = M([[1, 1, 0], [0, 1, 2], [1, 0, 1]])
    assert conjugacy_equivalent(A, P @ A @ inverse(P))
    assert not conjugacy_equivalent(M([[1, 1], [0, 1]]), ExactMatrix.identity(2))
    assert conjugacy_equivalent(ExactMatrix.diag([2, 3]), ExactMatrix.diag([3, 2]))
    # complex case: rotation by i is diagonalizable over Q(i)
    assert conjugacy_equivalent(M([[0, -1], [1, 0]]), ExactMatrix.diag([1j, -1j]))
    with pytest.raises(UsageError):
        conjugacy_equivalent(ExactMatrix.identity(2), ExactMatrix.identity(3))


def test_jordan_sizes():
    J = M([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    N = J - ExactMatrix.identity(4)
    assert jordan_sizes_from_ranks(4, rank_sequence(N, 4)) == [3, 1]


def test_doc_roundtrip_and_validation():
    A = M([[Fraction(1, 3), 2j], [0, -1]])
    assert ExactMatrix.from_doc(A.to_doc()) == A
    nested = {"rows": 1, "cols": 2, "entries": [[[1, 1, 0, 1], [2, 1, 0, 1]]]}
    assert ExactMatrix.from_doc(nested) == M([[1, 2]])
    with pytest.raises(UsageError):
        ExactMatrix.from_doc({"rows": 2, "cols": 2, "entries": []})
    with pytest.raises(UsageError):
        ExactMatrix.from_doc({"rows": 1, "cols": 1, "entries": [[1.5, 1, 0, 1]]})


def test_det_inverse():
    A = M([[2, 1j], [1, 1]])
    assert det(A) == GaussianRational(2, -1)
    assert A @ inverse(A) == ExactMatrix.identity(2)
    with pytest.raises(ZeroDivisionError):
        inverse(M([[1, 1], [1, 1]]))


# --- properties --------------------------------------------------------------

small = st.integers(-3, 3)


@st.composite
def gauss_matrix(draw, rows=None, cols=None, complex_ok=True):
    r = rows or draw(st.integers(1, 4))
    c = cols or draw(st.integers(1, 4))
    vals = []
    for _ in range(r * c):
        a, b = draw(small), draw(small) if complex_ok else 0
        d = draw(st.integers(1, 3))
        vals.append(GaussianRational(Fraction(a, d), Fraction(b, d)))
    return ExactMatrix(r, c, vals)


def _to_sympy(A):
    return sympy.Matrix(A.rows, A.cols, lambda i, j: sympy.Rational(A[i, j].real.numerator,
                                                                    A[i, j].real.denominator)
                        + sympy.I * sympy.Rational(A[i, j].imag.numerator, A[i, j].imag.denominator))


@settings(max_examples=60, deadline=None)
@given(gauss_matrix())
def test_rank_and_det_agree_with_sympy(A):
    S = _to_sympy(A)
    assert rank(A) == S.rank()
    if A.is_square():
        d = sympy.nsimplify(sympy.expand(S.det()))
        got = det(A)
        assert sympy.simplify(d - (sympy.Rational(got.real.numerator, got.real.denominator)
                                   + sympy.I * sympy.Rational(got.imag.numerator,
                                                              got.imag.denominator))) == 0


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_rank_of_product(data):
    A = data.draw(gauss_matrix())
    B = data.draw(gauss_matrix(rows=A.cols))
    assert rank(A @ B) <= min(rank(A), rank(B))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_dimension_formula(data):
    n = data.draw(st.integers(1, 4))
    A = data.draw(gauss_matrix(rows=n))
    B = data.draw(gauss_matrix(rows=n))
    inter = subspace_intersection(A, B)
    assert rank(A) + rank(B) == inter.cols + subspace_sum(A, B).cols
    # intersection lies in both spans
    if inter.cols:
        assert rank(A.hstack(inter)) == rank(A)
        assert rank(B.hstack(inter)) == rank(B)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_charpoly_and_conjugacy_invariance(data):
    n = data.draw(st.integers(1, 4))
    A = data.draw(gauss_matrix(rows=n, cols=n, complex_ok=data.draw(st.booleans())))
    P = data.draw(gauss_matrix(rows=n, cols=n))
    if rank(P) < n:
        return
    B = P @ A @ inverse(P)
    assert charpoly(B) == charpoly(A)
    assert conjugacy_equivalent(A, A)
    assert conjugacy_equivalent(A, B) and conjugacy_equivalent(B, A)
    assert nullspace(A).cols == n - rank(A)
