"""Matrices over Q[t] and Smith normal form."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .arith import ONE, ZERO, PolyRat, rat
from .linalg import QQ, Mat


class MatrixPoly:
    """Dense matrix with PolyRat entries."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence], ncols: int | None = None):
        self.rows = [[PolyRat.parse(e) for e in r] for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else (ncols or 0)
        if ncols is not None and self.rows and self.ncols != ncols:
            raise ValueError("column count mismatch")
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged polynomial matrix")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "MatrixPoly":
        return cls([[ZERO] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "MatrixPoly":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def scalar(cls, n: int, p: PolyRat) -> "MatrixPoly":
        return cls([[p if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, entries: Sequence[PolyRat]) -> "MatrixPoly":
        n = len(entries)
        return cls([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_mat(cls, M: Mat) -> "MatrixPoly":
        return cls([[PolyRat.const(v) for v in r] for r in M.rows()], M.ncols)

    @classmethod
    def parse(cls, value, nrows: int | None = None, ncols: int | None = None) -> "MatrixPoly":
        if isinstance(value, MatrixPoly):
            return value
        rows = [[PolyRat.parse(e) for e in r] for r in value]
        if not rows:
            return cls.zeros(nrows or 0, ncols or 0)
        return cls(rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> PolyRat:
        return self.rows[ij[0]][ij[1]]

    def copy(self) -> "MatrixPoly":
        return MatrixPoly([list(r) for r in self.rows], self.ncols)

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixPoly) and self.shape == other.shape and self.rows == other.rows

    def __add__(self, other: "MatrixPoly") -> "MatrixPoly":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return MatrixPoly([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "MatrixPoly") -> "MatrixPoly":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return MatrixPoly([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> "MatrixPoly":
        return MatrixPoly([[-a for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: "MatrixPoly") -> "MatrixPoly":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        for r in self.rows:
            row = []
            for j in range(other.ncols):
                acc = ZERO
                for a, b in zip(r, cols[j]):
                    if a.coeffs and b.coeffs:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatrixPoly(out, other.ncols)

    def scale(self, p) -> "MatrixPoly":
        p = PolyRat.parse(p) if not isinstance(p, PolyRat) else p
        return MatrixPoly([[a * p for a in r] for r in self.rows], self.ncols)

    @property
    def T(self) -> "MatrixPoly":
        return MatrixPoly([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)], self.nrows)

    def submatrix(self, rows, cols) -> "MatrixPoly":
        rows, cols = list(rows), list(cols)
        return MatrixPoly([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.rows for e in r)

    def map_entries(self, f: Callable[[PolyRat], PolyRat]) -> "MatrixPoly":
        return MatrixPoly([[f(a) for a in r] for r in self.rows], self.ncols)

    def evaluate(self, s) -> Mat:
        s = rat(s)
        return Mat.from_rows(QQ, [[a(s) for a in r] for r in self.rows], self.ncols)

    def coefficient(self, k: int) -> Mat:
        """Matrix of t**k coefficients."""
        return Mat.from_rows(QQ, [[a.coeffs[k] if k < len(a.coeffs) else 0 for a in r] for r in self.rows],
                             self.ncols)

    def substitute_power(self, k: int) -> "MatrixPoly":
        return self.map_entries(lambda a: a.substitute_power(k))

    def max_degree(self) -> int:
        return max((a.degree() for r in self.rows for a in r), default=-1)

    @staticmethod
    def hstack(mats: Sequence["MatrixPoly"], nrows: int | None = None) -> "MatrixPoly":
        mats = list(mats)
        if not mats:
            return MatrixPoly.zeros(nrows or 0, 0)
        nr = mats[0].nrows
        return MatrixPoly([sum((M.rows[i] for M in mats), []) for i in range(nr)], sum(M.ncols for M in mats))

    @staticmethod
    def vstack(mats: Sequence["MatrixPoly"], ncols: int | None = None) -> "MatrixPoly":
        mats = list(mats)
        if not mats:
            return MatrixPoly.zeros(0, ncols or 0)
        return MatrixPoly([list(r) for M in mats for r in M.rows], mats[0].ncols)

    @staticmethod
    def block_diag(mats: Sequence["MatrixPoly"]) -> "MatrixPoly":
        nc = sum(M.ncols for M in mats)
        out = []
        c0 = 0
        for M in mats:
            for r in M.rows:
                out.append([ZERO] * c0 + list(r) + [ZERO] * (nc - c0 - M.ncols))
            c0 += M.ncols
        return MatrixPoly(out, nc)

    def to_json(self) -> list:
        return [[a.to_json() for a in r] for r in self.rows]

    def __repr__(self) -> str:
        return "MatrixPoly([" + ", ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self.rows) + "])"


def det(M: MatrixPoly) -> PolyRat:
    """Determinant by cofactor expansion (small matrices only)."""
    if M.nrows != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    n = M.nrows
    if n == 0:
        return ONE
    if n == 1:
        return M.rows[0][0]
    total = ZERO
    for j in range(n):
        a = M.rows[0][j]
        if a.is_zero():
            continue
        minor = MatrixPoly([r[:j] + r[j + 1:] for r in M.rows[1:]], n - 1)
        term = a * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


@dataclass
class SmithForm:
    """U @ A @ V == D with U, V unimodular and D diagonal with d_i | d_{i+1}."""

    D: MatrixPoly
    U: MatrixPoly
    V: MatrixPoly
    U_inv: MatrixPoly
    V_inv: MatrixPoly
    rank: int

    @property
    def invariant_factors(self) -> list[PolyRat]:
        return [self.D.rows[i][i] for i in range(self.rank)]


def smith_normal_form(A: MatrixPoly) -> SmithForm:
    """Smith normal form over Q[t]; pivots are nonzero entries of least degree, ties row-major."""
    m, n = A.shape
    D = [list(r) for r in A.rows]
    U = [list(r) for r in MatrixPoly.identity(m).rows]
    Ui = [list(r) for r in MatrixPoly.identity(m).rows]
    V = [list(r) for r in MatrixPoly.identity(n).rows]
    Vi = [list(r) for r in MatrixPoly.identity(n).rows]

    def swap_rows(i, j):
        if i == j:
            return
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        if i == j:
            return
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]
        for r in Ui:
            r[src] = r[src] - q * r[dst]

    def add_col(dst, src, q):
        # col_dst += q * col_src
        for r in D:
            r[dst] = r[dst] + q * r[src]
        for r in V:
            r[dst] = r[dst] + q * r[src]
        Vi[src] = [a - q * b for a, b in zip(Vi[src], Vi[dst])]

    def scale_row(i, c: Fraction):
        cp = PolyRat.const(c)
        ci = PolyRat.const(1 / c)
        D[i] = [a * cp for a in D[i]]
        U[i] = [a * cp for a in U[i]]
        for r in Ui:
            r[i] = r[i] * ci

    rank = 0
    for k in range(min(m, n)):
        while True:
            best = None
            for i in range(k, m):
                for j in range(k, n):
                    e = D[i][j]
                    if not e.is_zero() and (best is None or e.degree() < best[0]):
                        best = (e.degree(), i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(k, i)
            swap_cols(k, j)
            piv = D[k][k]
            clean = True
            for i in range(k + 1, m):
                if not D[i][k].is_zero():
                    q, r = divmod(D[i][k], piv)
                    add_row(i, k, -q)
                    if not r.is_zero():
                        clean = False
            for j in range(k + 1, n):
                if not D[k][j].is_zero():
                    q, r = divmod(D[k][j], piv)
                    add_col(j, k, -q)
                    if not r.is_zero():
                        clean = False
            if not clean:
                continue
            bad = None
            for i in range(k + 1, m):
                for j in range(k + 1, n):
                    if not (D[i][j] % piv).is_zero():
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is not None:
                add_row(k, bad, ONE)
                continue
            lc = piv.lc()
            if lc != 1:
                scale_row(k, 1 / lc)
            rank += 1
            break
        if best is None:
            break
    return SmithForm(MatrixPoly(D, n), MatrixPoly(U, m), MatrixPoly(V, n),
                     MatrixPoly(Ui, m), MatrixPoly(Vi, n), rank)


def solve_poly(A: MatrixPoly, B: MatrixPoly) -> MatrixPoly | None:
    """Some X over Q[t] with A @ X == B, or None if no polynomial solution exists."""
    if A.nrows != B.nrows:
        raise ValueError("solve_poly: row mismatch")
    snf = smith_normal_form(A)
    UB = snf.U @ B
    Y = MatrixPoly.zeros(A.ncols, B.ncols)
    for i in range(A.nrows):
        for j in range(B.ncols):
            e = UB.rows[i][j]
            if i < snf.rank:
                q, r = divmod(e, snf.D.rows[i][i])
                if not r.is_zero():
                    return None
                Y.rows[i][j] = q
            elif not e.is_zero():
                return None
    return snf.V @ Y


def kernel_poly(A: MatrixPoly) -> MatrixPoly:
    """Columns form a basis of the free module ker A."""
    snf = smith_normal_form(A)
    return snf.V.submatrix(range(A.ncols), range(snf.rank, A.ncols))


def column_basis(A: MatrixPoly) -> MatrixPoly:
    """A basis of the column module of A (rank many columns)."""
    snf = smith_normal_form(A)
    return (A @ snf.V).submatrix(range(A.nrows), range(snf.rank))


def is_unimodular(A: MatrixPoly) -> bool:
    if A.nrows != A.ncols:
        return False
    snf = smith_normal_form(A)
    return snf.rank == A.nrows and all(d.is_unit() for d in snf.invariant_factors)
