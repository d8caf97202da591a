from itertools import combinations

from hypothesis import given, strategies as st

from hearthkit.arith import GaussRat, PolyRat, T, poly_gcd
from hearthkit.linalg import GF, QQ, Mat
from hearthkit.polymat import MatrixPoly, det, smith_normal_form


def test_identity_kernel_and_cokernel():
    I = Mat.identity(QQ, 2)
    assert I.kernel().ncols == 0
    assert I.rank() == 2
    assert I.cokernel_projection().shape == (0, 2)


def test_coordinate_projection():
    A = Mat.from_rows(QQ, [[1, 0]])
    K = A.kernel()
    assert K.to_json() == [["0"], ["1"]]
    assert A.rank() == 1
    assert A.cokernel_projection().nrows == 0


def test_all_ones():
    A = Mat.from_rows(QQ, [[1] * 3] * 3)
    assert A.rank() == 1
    assert A.kernel().ncols == 2
    assert A.cokernel_projection().nrows == 2


def test_prime_field_arithmetic():
    F = GF(5)
    A = Mat.from_rows(F, [[2, 3], [1, 4]])
    assert A.rank() == 1  # 2*4 - 3*1 = 5
    assert (A @ A.kernel()).is_zero()


def _diag(M):
    return [M.rows[i][i] for i in range(min(M.nrows, M.ncols))]


def test_snf_already_diagonal():
    A = MatrixPoly([[1, 0], [0, T]])
    S = smith_normal_form(A)
    assert [p.monic() for p in S.invariant_factors] == [PolyRat.const(1), T]


def test_snf_triangular():
    A = MatrixPoly([[T, T ** 2], [0, T]])
    S = smith_normal_form(A)
    # d1 = gcd of entries = t and d1*d2 = det = t^2
    assert [p.monic() for p in S.invariant_factors] == [T, T]
    assert S.U @ A @ S.V == S.D


def test_snf_zero():
    S = smith_normal_form(MatrixPoly.zeros(2, 3))
    assert S.rank == 0 and S.D == MatrixPoly.zeros(2, 3)


def test_gauss_rational_ops():
    z = GaussRat.parse(["1/2", "-3"])
    assert (z * z.conj()).im == 0
    assert z.norm2() == (z * z.conj()).re


ints = st.integers(-9, 9)


@st.composite
def rational_matrices(draw):
    n, m = draw(st.integers(1, 6)), draw(st.integers(1, 6))
    return Mat.from_rows(QQ, [[draw(ints) for _ in range(m)] for _ in range(n)])


@given(rational_matrices())
def test_rank_nullity(A):
    r = A.rank()
    K = A.kernel()
    assert K.ncols + r == A.ncols
    assert (A @ K).is_zero() if K.ncols else True
    assert A.cokernel_projection().nrows + r == A.nrows


@st.composite
def poly_matrices(draw):
    n, m = draw(st.integers(1, 3)), draw(st.integers(1, 3))
    coeffs = st.lists(st.integers(-3, 3), min_size=0, max_size=3)
    return MatrixPoly([[PolyRat(draw(coeffs)) for _ in range(m)] for _ in range(n)])


def _minor_gcd(A, k):
    g = PolyRat()
    for rows in combinations(range(A.nrows), k):
        for cols in combinations(range(A.ncols), k):
            g = poly_gcd(g, det(A.submatrix(rows, cols)))
    return g.monic() if not g.is_zero() else g


@given(poly_matrices())
def test_snf_determinantal_divisors(A):
    S = smith_normal_form(A)
    assert S.U @ A @ S.V == S.D
    prod = PolyRat.const(1)
    for k in range(1, min(A.nrows, A.ncols) + 1):
        prod = prod * S.D.rows[k - 1][k - 1]
        expect = _minor_gcd(A, k)
        got = prod.monic() if not prod.is_zero() else prod
        assert got == expect


@given(rational_matrices())
def test_matrix_ops_deterministic(A):
    assert A.rref()[0].key() == Mat.from_rows(QQ, A.rows()).rref()[0].key()
