"""Dense exact matrices over Q and F_p, backed by FLINT.

Subspaces are represented by matrices whose columns form a basis.  The
canonical basis of a subspace is the transpose of the reduced row echelon
form of its spanning set, so two subspaces are equal iff their canonical
bases are equal.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import flint

from .arith import rat

DEFAULT_PRIME = 5


class Field:
    name = "?"
    p: int | None = None

    def __call__(self, x):
        raise NotImplementedError

    def zero(self):
        return self(0)

    def one(self):
        return self(1)


class RationalField(Field):
    name = "Q"
    p = None

    def __call__(self, x) -> Fraction:
        return rat(x)

    def _flint(self, nrows: int, ncols: int, flat: Sequence):
        return flint.fmpq_mat(nrows, ncols, [v if isinstance(v, (int, flint.fmpq)) else
                                             flint.fmpq(v.numerator, v.denominator) for v in flat])

    def _empty(self, nrows: int, ncols: int):
        return flint.fmpq_mat(nrows, ncols)

    def _from_flint(self, x) -> Fraction:
        return Fraction(int(x.p), int(x.q))

    def inv(self, x: Fraction) -> Fraction:
        return 1 / x

    def elements(self):
        raise ValueError("Q is infinite")

    def key(self):
        return ("Q",)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


class PrimeField(Field):
    name = "Fp"

    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __call__(self, x) -> int:
        if isinstance(x, bool):
            raise TypeError("booleans are not scalars")
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, flint.nmod):
            return int(x)
        f = rat(x)
        if f.denominator % self.p == 0:
            raise ZeroDivisionError(f"{f} is not defined modulo {self.p}")
        return f.numerator * pow(f.denominator, -1, self.p) % self.p

    def _flint(self, nrows: int, ncols: int, flat: Sequence):
        return flint.nmod_mat(nrows, ncols, [int(v) for v in flat], self.p)

    def _empty(self, nrows: int, ncols: int):
        return flint.nmod_mat(nrows, ncols, self.p)

    def _from_flint(self, x) -> int:
        return int(x)

    def inv(self, x: int) -> int:
        return pow(x, -1, self.p)

    def elements(self):
        return range(self.p)

    def key(self):
        return ("Fp", self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def default_prime() -> int:
    """The prime used for finite-field work, overridable via HEARTHKIT_PRIME."""
    value = os.environ.get("HEARTHKIT_PRIME")
    return int(value) if value else DEFAULT_PRIME


def field_from_name(name: str, p: int | None = None) -> Field:
    if name in ("Q", "QQ"):
        return QQ
    if name in ("Fp", "GF", "F_p"):
        return GF(p if p is not None else default_prime())
    raise ValueError(f"unknown field {name!r}")


class Mat:
    """Immutable-by-convention exact matrix."""

    __slots__ = ("field", "m", "nrows", "ncols")

    def __init__(self, field: Field, m, nrows: int | None = None, ncols: int | None = None):
        self.field = field
        self.m = m
        self.nrows = m.nrows() if nrows is None else nrows
        self.ncols = m.ncols() if ncols is None else ncols

    # construction
    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], ncols: int | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else (ncols or 0)
        if ncols is not None and rows and nc != ncols:
            raise ValueError("row length mismatch")
        for r in rows:
            if len(r) != nc:
                raise ValueError("ragged matrix")
        flat = [field(v) for r in rows for v in r]
        return cls(field, field._flint(nr, nc, flat))

    @classmethod
    def from_flat(cls, field: Field, nrows: int, ncols: int, flat: Sequence) -> "Mat":
        if field.p is None:
            return cls(field, field._flint(nrows, ncols, [v if type(v) is int else field(v) for v in flat]))
        return cls(field, field._flint(nrows, ncols, [field(v) for v in flat]))

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Mat":
        return cls(field, field._empty(nrows, ncols), nrows, ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        m = field._empty(n, n)
        for i in range(n):
            m[i, i] = 1
        return cls(field, m, n, n)

    @classmethod
    def from_columns(cls, field: Field, cols: Sequence[Sequence], nrows: int) -> "Mat":
        cols = [list(c) for c in cols]
        flat = [field(cols[j][i]) for i in range(nrows) for j in range(len(cols))]
        return cls(field, field._flint(nrows, len(cols), flat))

    @classmethod
    def unit_columns(cls, field: Field, n: int, indices: Sequence[int]) -> "Mat":
        out = field._empty(n, len(indices))
        for j, i in enumerate(indices):
            out[i, j] = 1
        return cls(field, out, n, len(indices))

    # access
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.field._from_flint(self.m[i, j])

    def rows(self) -> list[list]:
        conv = self.field._from_flint
        flat = self.m.entries()
        c = self.ncols
        return [[conv(flat[i * c + j]) for j in range(c)] for i in range(self.nrows)]

    def columns(self) -> list[list]:
        rows = self.rows()
        return [[rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)]

    def column(self, j: int) -> "Mat":
        return self.submatrix(range(self.nrows), [j])

    def flat(self) -> list:
        conv = self.field._from_flint
        return [conv(x) for x in self.m.entries()]

    def to_json(self) -> list:
        return [[str(v) for v in r] for r in self.rows()]

    def key(self) -> tuple:
        return (self.nrows, self.ncols, tuple(str(x) for x in self.m.entries()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.field == other.field and \
            (self.nrows == 0 or self.ncols == 0 or self.m == other.m)

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Mat({self.field!r}, {self.to_json()})"

    # arithmetic
    def _check(self, other: "Mat"):
        if self.field != other.field:
            raise ValueError("matrices over different fields")

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Mat(self.field, self.m + other.m, self.nrows, self.ncols)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Mat(self.field, self.m - other.m, self.nrows, self.ncols)

    def __neg__(self) -> "Mat":
        return Mat(self.field, -self.m, self.nrows, self.ncols)

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        if self.ncols == 0:
            return Mat.zeros(self.field, self.nrows, other.ncols)
        return Mat(self.field, self.m * other.m, self.nrows, other.ncols)

    def scale(self, c) -> "Mat":
        c = self.field(c)
        if isinstance(c, Fraction):
            c = flint.fmpq(c.numerator, c.denominator)
        return Mat(self.field, self.m * c, self.nrows, self.ncols)

    @property
    def T(self) -> "Mat":
        return Mat(self.field, self.m.transpose(), self.ncols, self.nrows)

    def is_zero(self) -> bool:
        return self.nrows == 0 or self.ncols == 0 or self.m == self.field._empty(self.nrows, self.ncols)

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and self == Mat.identity(self.field, self.nrows)

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Mat":
        rows, cols = list(rows), list(cols)
        if not rows or not cols:
            return Mat.zeros(self.field, len(rows), len(cols))
        ents = self.m.entries()
        c = self.ncols
        flat = [ents[i * c + j] for i in rows for j in cols]
        return Mat(self.field, type(self.m)(len(rows), len(cols), flat, *self._mod_args()))

    def _mod_args(self):
        return (self.field.p,) if self.field.p is not None else ()

    # shape manipulation
    @staticmethod
    def hstack(field: Field, mats: Sequence["Mat"], nrows: int | None = None) -> "Mat":
        mats = list(mats)
        if not mats:
            return Mat.zeros(field, nrows or 0, 0)
        nr = mats[0].nrows
        rows_out = [[] for _ in range(nr)]
        for M in mats:
            if M.nrows != nr:
                raise ValueError("hstack row mismatch")
            ents = M.m.entries()
            c = M.ncols
            for i in range(nr):
                rows_out[i].extend(ents[i * c:(i + 1) * c])
        nc = sum(M.ncols for M in mats)
        flat = [x for r in rows_out for x in r]
        return Mat(field, _raw(field, nr, nc, flat))

    @staticmethod
    def vstack(field: Field, mats: Sequence["Mat"], ncols: int | None = None) -> "Mat":
        mats = list(mats)
        if not mats:
            return Mat.zeros(field, 0, ncols or 0)
        nc = mats[0].ncols
        flat = []
        for M in mats:
            if M.ncols != nc:
                raise ValueError("vstack column mismatch")
            flat.extend(M.m.entries())
        nr = sum(M.nrows for M in mats)
        return Mat(field, _raw(field, nr, nc, flat))

    @staticmethod
    def block_diag(field: Field, mats: Sequence["Mat"]) -> "Mat":
        nr = sum(M.nrows for M in mats)
        nc = sum(M.ncols for M in mats)
        out = field._empty(nr, nc)
        r0 = c0 = 0
        for M in mats:
            ents = M.m.entries() if M.nrows and M.ncols else []
            for i in range(M.nrows):
                for j in range(M.ncols):
                    v = ents[i * M.ncols + j]
                    if v != 0:
                        out[r0 + i, c0 + j] = v
            r0 += M.nrows
            c0 += M.ncols
        return Mat(field, out, nr, nc)

    @staticmethod
    def kron(A: "Mat", B: "Mat") -> "Mat":
        F = A.field
        nr, nc = A.nrows * B.nrows, A.ncols * B.ncols
        if nr == 0 or nc == 0:
            return Mat.zeros(F, nr, nc)
        ae, be = A.m.entries(), B.m.entries()
        bnz = [(k, l, be[k * B.ncols + l]) for k in range(B.nrows) for l in range(B.ncols)
               if be[k * B.ncols + l] != 0]
        out = F._empty(nr, nc)
        for i in range(A.nrows):
            for j in range(A.ncols):
                a = ae[i * A.ncols + j]
                if a == 0:
                    continue
                for k, l, b in bnz:
                    out[i * B.nrows + k, j * B.ncols + l] = a * b
        return Mat(F, out, nr, nc)

    # elimination
    def rref(self) -> tuple["Mat", list[int]]:
        """Reduced row echelon form and pivot columns."""
        if self.nrows == 0 or self.ncols == 0:
            return self, []
        R, rank = self.m.rref()
        pivots = []
        r = 0
        for j in range(self.ncols):
            if r >= rank:
                break
            if R[r, j] != 0:
                pivots.append(j)
                r += 1
        return Mat(self.field, R, self.nrows, self.ncols), pivots

    def rank(self) -> int:
        if self.nrows == 0 or self.ncols == 0:
            return 0
        return self.m.rank()

    def kernel(self) -> "Mat":
        """Columns form a basis of the right kernel."""
        n = self.ncols
        R, piv = self.rref()
        pset = set(piv)
        free = [j for j in range(n) if j not in pset]
        F = self.field
        out = F._empty(n, len(free))
        ents = R.m.entries() if piv else []
        for k, f in enumerate(free):
            out[f, k] = 1
            for i, pj in enumerate(piv):
                v = ents[i * n + f]
                if v != 0:
                    out[pj, k] = -v
        return Mat(F, out, n, len(free))

    def colspace(self) -> "Mat":
        """Canonical basis of the column space."""
        if self.ncols == 0 or self.nrows == 0:
            return Mat.zeros(self.field, self.nrows, 0)
        R, piv = self.T.rref()
        return R.submatrix(range(len(piv)), range(R.ncols)).T

    def cokernel_projection(self) -> "Mat":
        """Full-row-rank matrix whose kernel is the column space."""
        return self.T.kernel().T

    def solve(self, B: "Mat") -> "Mat | None":
        """Some X with self @ X == B, or None if inconsistent."""
        if B.nrows != self.nrows:
            raise ValueError("solve: row mismatch")
        n = self.ncols
        if B.ncols == 0:
            return Mat.zeros(self.field, n, 0)
        if self.nrows == 0:
            return Mat.zeros(self.field, n, B.ncols)
        aug = Mat.hstack(self.field, [self, B])
        R, piv = aug.rref()
        if piv and piv[-1] >= n:
            return None
        F = self.field
        m = B.ncols
        out = F._empty(n, m)
        ents = R.m.entries()
        w = aug.ncols
        for i, pj in enumerate(piv):
            for k in range(m):
                v = ents[i * w + n + k]
                if v != 0:
                    out[pj, k] = v
        return Mat(F, out, n, m)

    def inverse(self) -> "Mat":
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        if self.nrows == 0:
            return self
        try:
            return Mat(self.field, self.m.inv(), self.nrows, self.ncols)
        except ZeroDivisionError:
            raise ZeroDivisionError("matrix is singular") from None

    def right_inverse(self) -> "Mat":
        """Some X with self @ X == identity, for a matrix of full row rank."""
        if self.nrows == 0:
            return Mat.zeros(self.field, self.ncols, 0)
        n, c = self.nrows, self.ncols
        ents = self.m.entries()
        unit = {}
        for j in range(c):
            col = [ents[i * c + j] for i in range(n)]
            nz = [i for i, v in enumerate(col) if v != 0]
            if len(nz) == 1 and col[nz[0]] == 1:
                unit.setdefault(nz[0], j)
        if len(unit) == n:
            # cokernel projections from rref kernels contain an identity block
            return Mat._placed(self.field, c, n, {(unit[i], i): 1 for i in range(n)})
        _, piv = self.rref()
        if len(piv) < n:
            raise ValueError("matrix does not have full row rank")
        S = self.submatrix(range(n), piv).inverse()
        se = S.m.entries()
        return Mat._placed(self.field, c, n, {(piv[a], b): se[a * n + b] for a in range(n) for b in range(n)
                                               if se[a * n + b] != 0})

    @staticmethod
    def _placed(field: Field, nrows: int, ncols: int, entries: dict) -> "Mat":
        out = field._empty(nrows, ncols)
        for (i, j), v in entries.items():
            out[i, j] = v
        return Mat(field, out, nrows, ncols)

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def charpoly_coeffs(self) -> list:
        """Characteristic polynomial, lowest coefficient first."""
        if self.nrows == 0:
            return [self.field(1)]
        return [self.field._from_flint(c) for c in self.m.charpoly().coeffs()]

    def power(self, k: int) -> "Mat":
        out = Mat.identity(self.field, self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def poly_eval(self, coeffs: Sequence) -> "Mat":
        """sum coeffs[i] * self**i via Horner."""
        n = self.nrows
        acc = Mat.zeros(self.field, n, n)
        I = Mat.identity(self.field, n)
        for c in reversed(list(coeffs)):
            acc = acc @ self + I.scale(c)
        return acc


def _raw(field: Field, nr: int, nc: int, flat: list):
    if isinstance(field, RationalField):
        return flint.fmpq_mat(nr, nc, flat)
    return flint.nmod_mat(nr, nc, flat, field.p)


def _fmul(F: Field, a, b):
    if F.p is None:
        return a * b
    return a * b % F.p


# subspace helpers (bases as columns)

def span(field: Field, n: int, mats: Sequence[Mat]) -> Mat:
    mats = [M for M in mats if M.ncols]
    if not mats:
        return Mat.zeros(field, n, 0)
    return Mat.hstack(field, mats).colspace()


def contains(U: Mat, W: Mat) -> bool:
    """Whether colspace(W) is contained in colspace(U)."""
    if W.ncols == 0:
        return True
    if U.ncols == 0:
        return W.is_zero()
    return Mat.hstack(U.field, [U, W]).rank() == U.rank()


def intersect(U: Mat, W: Mat) -> Mat:
    F = U.field
    if U.ncols == 0 or W.ncols == 0:
        return Mat.zeros(F, U.nrows, 0)
    K = Mat.hstack(F, [U, -W]).kernel()
    return (U @ K.submatrix(range(U.ncols), range(K.ncols))).colspace()


def complement_basis(sub: Mat, ambient: Mat) -> Mat:
    """Columns of ambient (in order) extending a basis of sub to one of colspace(ambient)."""
    F = sub.field
    chosen = []
    cur = sub
    r = sub.rank()
    for j in range(ambient.ncols):
        c = ambient.column(j)
        trial = Mat.hstack(F, [cur, c]) if cur.ncols else c
        rr = trial.rank()
        if rr > r:
            chosen.append(j)
            cur, r = trial, rr
    return ambient.submatrix(range(ambient.nrows), chosen)


class Subquotient:
    """The quotient colspace(cycles) / colspace(boundaries) with chosen representatives."""

    def __init__(self, cycles: Mat, boundaries: Mat):
        F = cycles.field
        self.field = F
        self.ambient_dim = cycles.nrows
        self.boundaries = boundaries.colspace()
        if not contains(cycles, self.boundaries):
            raise ValueError("boundaries are not contained in cycles")
        self.reps = complement_basis(self.boundaries, cycles)
        self.dim = self.reps.ncols
        self._basis = Mat.hstack(F, [self.boundaries, self.reps]) if (self.boundaries.ncols + self.dim) \
            else Mat.zeros(F, self.ambient_dim, 0)

    def coords(self, vectors: Mat) -> Mat:
        """Coordinates (dim x k) of cycle columns modulo boundaries."""
        if self.dim == 0:
            return Mat.zeros(self.field, 0, vectors.ncols)
        X = self._basis.solve(vectors)
        if X is None:
            raise ValueError("vector is not a cycle")
        b = self.boundaries.ncols
        return X.submatrix(range(b, b + self.dim), range(X.ncols))

    def induced(self, target: "Subquotient", chain_map: Mat) -> Mat:
        """Matrix of the map induced on subquotients by a chain-level map."""
        return target.coords(chain_map @ self.reps)
