"""The projective-space model at X = point.

Objects of D(P^r) are bounded complexes of sums of line bundles O(a) with homogeneous polynomial
differentials (``LineComplex``).  Under O(-j) <-> P_j (the indecomposable projectives of C_V) these
are the same as bounded complexes of projective C_V objects, so the derived twist F -> F(1) just
shifts twists, and RGamma is computed termwise once every twist is at least -r.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import comb
from typing import Iterable, Mapping

from .errors import NotInHeartError, PreconditionError, StabilizationError, ValidationError
from .homotopy import CohomologyObject, Complex
from .linalg import QQ, Mat
from .quiver import Quiver, Representation, RepMorphism, hom_space, point_quiver

Mono = tuple[int, ...]


# --- symmetric and exterior powers of V = <x_0..x_r> ---

@lru_cache(maxsize=None)
def monomials(r: int, d: int) -> tuple[Mono, ...]:
    """Lexicographic monomial basis of S^d V as exponent tuples (x_0^d first)."""
    if d < 0:
        return ()
    out = []
    for c in combinations_with_replacement(range(r + 1), d):
        e = [0] * (r + 1)
        for i in c:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(r: int, d: int) -> dict[Mono, int]:
    return {m: i for i, m in enumerate(monomials(r, d))}


def sym_dim(r: int, d: int) -> int:
    return comb(d + r, r) if d >= 0 else 0


def variable(r: int, k: int) -> Mono:
    return tuple(1 if i == k else 0 for i in range(r + 1))


def unit_mono(r: int) -> Mono:
    return (0,) * (r + 1)


def mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def mono_str(m: Mono) -> str:
    parts = [f"x{i}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e]
    return "*".join(parts) or "1"


@lru_cache(maxsize=None)
def mult_matrix(r: int, mono: Mono, d: int) -> Mat:
    """Multiplication by a monomial, S^d V -> S^{d+deg} V."""
    src = monomials(r, d)
    idx = monomial_index(r, d + sum(mono))
    return Mat.unit_columns(QQ, sym_dim(r, d + sum(mono)), [idx[mono_mul(s, mono)] for s in src])


@lru_cache(maxsize=None)
def wedge_basis(r: int, p: int) -> tuple[tuple[int, ...], ...]:
    """Sorted index tuples spanning Lambda^p V."""
    if p < 0 or p > r + 1:
        return ()
    return tuple(combinations(range(r + 1), p))


class TruncatedSymAlgebra:
    """A_V = S^0 V + ... + S^r V with multiplication truncated above degree r."""

    def __init__(self, r: int):
        if r < 1:
            raise ValidationError("r must be at least 1")
        self.r = r

    def dim(self, i: int) -> int:
        return sym_dim(self.r, i) if 0 <= i <= self.r else 0

    def multiply(self, i: int, j: int) -> Mat:
        """S^i (x) S^j -> S^{i+j}; source index a * dim S^j + b."""
        r = self.r
        if i + j > r:
            return Mat.zeros(QQ, 0, self.dim(i) * self.dim(j))
        idx = monomial_index(r, i + j)
        cols = [idx[mono_mul(a, b)] for a in monomials(r, i) for b in monomials(r, j)]
        return Mat.unit_columns(QQ, self.dim(i + j), cols)


def _block_matrix(row_sizes: list[int], col_sizes: list[int], blocks: Mapping[tuple[int, int], Mat]) -> Mat:
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    R, C = roff[-1], coff[-1]
    out = QQ._empty(R, C)
    for (ri, ci), B in blocks.items():
        if B.nrows != row_sizes[ri] or B.ncols != col_sizes[ci]:
            raise ValueError("block has the wrong shape")
        if not B.nrows or not B.ncols:
            continue
        ents = B.m.entries()
        for a in range(B.nrows):
            for b in range(B.ncols):
                x = ents[a * B.ncols + b]
                if x != 0:
                    out[roff[ri] + a, coff[ci] + b] += x
    return Mat(QQ, out, R, C)


# --- C_V objects ---

@lru_cache(maxsize=None)
def cv_quiver(r: int) -> Quiver:
    """Vertices 0..r; arrow i*(r+1)+k is the action of x_k from M_i to M_{i+1}."""
    return Quiver([str(i) for i in range(r + 1)], [(i, i + 1) for i in range(r) for _ in range(r + 1)])


class CVObject:
    """A graded A_V-module M_0, ..., M_r with commuting actions x_k: M_i -> M_{i+1}."""

    __slots__ = ("r", "rep", "_twist")

    def __init__(self, r: int, rep: Representation, check: bool = True):
        if r < 1:
            raise ValidationError("r must be at least 1")
        if rep.quiver != cv_quiver(r):
            raise ValidationError("representation is not over the C_V quiver for this r")
        self.r, self.rep = r, rep
        self._twist = None
        if check:
            self._check_commutative()

    @classmethod
    def build(cls, r: int, dims, actions) -> "CVObject":
        """``actions[i][k]`` is the matrix of x_k: M_i -> M_{i+1}."""
        dims = [int(d) for d in dims]
        if len(dims) != r + 1:
            raise ValidationError(f"expected {r + 1} components, got {len(dims)}")
        maps = []
        for i in range(r):
            acts = actions[i] if i < len(actions) else None
            for k in range(r + 1):
                A = acts[k] if acts is not None else None
                if A is None:
                    maps.append(Mat.zeros(QQ, dims[i + 1], dims[i]))
                elif isinstance(A, Mat):
                    maps.append(A)
                else:
                    maps.append(Mat.from_rows(QQ, A, dims[i]) if dims[i + 1] else Mat.zeros(QQ, 0, dims[i]))
        return cls(r, Representation.build(cv_quiver(r), QQ, dims, maps))

    @classmethod
    def zero(cls, r: int) -> "CVObject":
        return cls(r, Representation.zero(cv_quiver(r), QQ), check=False)

    @classmethod
    def line_bundle(cls, r: int, m: int) -> "CVObject":
        """Phi(O(m)) for m >= -r: components S^{m+i} V with multiplication."""
        if m < -r:
            raise PreconditionError(f"O({m}) is not in the heart of the 0-th t-structure")
        dims = [sym_dim(r, m + i) for i in range(r + 1)]
        acts = [[mult_matrix(r, variable(r, k), m + i) if m + i >= 0 else Mat.zeros(QQ, dims[i + 1], 0)
                 for k in range(r + 1)] for i in range(r)]
        return cls.build(r, dims, acts)

    @classmethod
    def projective(cls, r: int, j: int) -> "CVObject":
        """The indecomposable projective P_j = A_V shifted to start in degree j."""
        if not 0 <= j <= r:
            raise ValidationError("projective index out of range")
        return cls.line_bundle(r, -j)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.rep.dims

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def act(self, i: int, k: int) -> Mat:
        return self.rep.maps[i * (self.r + 1) + k]

    def act_mono(self, i: int, mono: Mono) -> Mat:
        """Action of a monomial from M_i to M_{i + deg}."""
        out = Mat.identity(QQ, self.dims[i])
        pos = i
        for k, e in enumerate(mono):
            for _ in range(e):
                if pos >= self.r:
                    return Mat.zeros(QQ, 0, self.dims[i])
                out = self.act(pos, k) @ out
                pos += 1
        return out

    def _check_commutative(self):
        r = self.r
        for i in range(r - 1):
            for k in range(r + 1):
                for l in range(k + 1, r + 1):
                    if not (self.act(i + 1, k) @ self.act(i, l) == self.act(i + 1, l) @ self.act(i, k)):
                        raise ValidationError(f"actions of x{k} and x{l} do not commute on M_{i}",
                                              location=f"actions.{i}")

    def key(self):
        return (self.r, self.rep.key())

    def __eq__(self, other):
        return isinstance(other, CVObject) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"CVObject(r={self.r}, dims={self.dims})"

    def to_json(self) -> dict:
        return {"kind": "cv-object", "r": self.r, "dims": list(self.dims),
                "actions": {str(i): [self.act(i, k).to_json() for k in range(self.r + 1)] for i in range(self.r)}}

    @classmethod
    def from_json(cls, data: dict) -> "CVObject":
        try:
            r = int(data["r"])
            dims = [int(d) for d in data["dims"]]
            acts_in = data.get("actions", {})
            acts = []
            for i in range(r):
                row = acts_in.get(str(i), acts_in.get(i))
                if row is None:
                    acts.append(None)
                    continue
                if len(row) != r + 1:
                    raise ValidationError(f"actions.{i} needs {r + 1} matrices", location=f"actions.{i}")
                acts.append([Mat.from_rows(QQ, A, dims[i]) if dims[i + 1] else Mat.zeros(QQ, 0, dims[i])
                             for A in row])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed cv-object: {exc}") from exc
        return cls.build(r, dims, acts)


def _generators(M: CVObject) -> list[Mat]:
    """Per component, columns spanning a complement of the image of the lower components."""
    out = []
    for k in range(M.r + 1):
        d = M.dims[k]
        if d == 0:
            out.append(Mat.zeros(QQ, 0, 0))
            continue
        imgs = [M.act(k - 1, v) for v in range(M.r + 1)] if k and M.dims[k - 1] else []
        base = Mat.hstack(QQ, imgs, d) if imgs else Mat.zeros(QQ, d, 0)
        _, piv = Mat.hstack(QQ, [base, Mat.identity(QQ, d)], d).rref()
        extra = [j - base.ncols for j in piv if j >= base.ncols]
        out.append(Mat.identity(QQ, d).submatrix(range(d), extra))
    return out


def cv_hom_space(M: CVObject, N: CVObject) -> list[RepMorphism]:
    """A basis of Hom(M, N), parametrised by the images of a minimal generating set of M."""
    r = M.r
    gens = _generators(M)
    ng = [G.ncols for G in gens]
    offs, off = [], 0
    for k in range(r + 1):
        offs.append(off)
        off += ng[k] * N.dims[k]
    if off == 0:
        return []
    covers, rows = [], []
    for j in range(r + 1):
        cols, lblocks = [], []
        for k in range(j + 1):
            if not ng[k]:
                continue
            for mono in monomials(r, j - k):
                AM, AN = M.act_mono(k, mono), N.act_mono(k, mono)
                for g in range(ng[k]):
                    cols.append(AM @ gens[k].submatrix(range(M.dims[k]), [g]))
                    # column (k, mono, g) of phi_j is AN @ u_{k,g}
                    lblocks.append((AN, offs[k] + g * N.dims[k]))
        pi = Mat.hstack(QQ, cols, M.dims[j]) if cols else Mat.zeros(QQ, M.dims[j], 0)
        covers.append(pi)
        if not cols or not N.dims[j]:
            continue
        L = _placed_rows(lblocks, N.dims[j], off)
        K = pi.kernel()
        if K.ncols:
            rows.append(Mat.kron(K.T, Mat.identity(QQ, N.dims[j])) @ L)
    system = Mat.vstack(QQ, rows, off) if rows else Mat.zeros(QQ, 0, off)
    sol = system.kernel()
    out = []
    for c in range(sol.ncols):
        u = sol.column(c).flat()
        mats = []
        for j in range(r + 1):
            cols = []
            for k in range(j + 1):
                for mono in monomials(r, j - k):
                    AN = N.act_mono(k, mono)
                    for g in range(ng[k]):
                        a = offs[k] + g * N.dims[k]
                        cols.append(AN @ Mat.from_flat(QQ, N.dims[k], 1, u[a:a + N.dims[k]]))
            if not M.dims[j] or not N.dims[j]:
                mats.append(Mat.zeros(QQ, N.dims[j], M.dims[j]))
                continue
            phi_j = Mat.hstack(QQ, cols, N.dims[j])
            mats.append(phi_j @ _section(covers[j]))
        out.append(RepMorphism(M.rep, N.rep, tuple(mats)))
    return out


def _placed_rows(blocks, height: int, width: int) -> Mat:
    """Stack blocks vertically, each one an (height x w) matrix placed at a column offset."""
    flat = []
    for B, c0 in blocks:
        row = [[0] * width for _ in range(height)]
        ents = B.m.entries()
        for i in range(height):
            for j in range(B.ncols):
                v = ents[i * B.ncols + j]
                if v != 0:
                    row[i][c0 + j] = v
        for rr in row:
            flat.extend(rr)
    return Mat.from_flat(QQ, height * len(blocks), width, flat)


def cv_isomorphism(M: CVObject, N: CVObject, tries: int = 24) -> RepMorphism | None:
    """An explicit isomorphism M -> N, searched among combinations of a Hom basis."""
    if M.r != N.r or M.dims != N.dims:
        return None
    if M.is_zero():
        return RepMorphism.zero(M.rep, N.rep)
    H = cv_hom_space(M, N)
    if not H:
        return None
    rng = random.Random(1729)
    for t in range(tries):
        coeffs = [1] * len(H) if t == 0 else [rng.randint(-12, 12) for _ in H]
        f = H[0].scale(coeffs[0])
        for c, h in zip(coeffs[1:], H[1:]):
            f = f + h.scale(c)
        if f.is_iso():
            return f
    return None


# --- Koszul complex and the twist functors ---

def koszul_complex(M: CVObject) -> Complex:
    """K(M): Lambda^{r+1-j} V (x) M_j in degree j - r, contraction differential."""
    r = M.r
    pq = point_quiver()
    objs, diffs = {}, {}
    for j in range(r + 1):
        p = r + 1 - j
        objs[j - r] = Representation.build(pq, QQ, [len(wedge_basis(r, p)) * M.dims[j]], [])
    for j in range(r):
        diffs[j - r] = RepMorphism(objs[j - r], objs[j - r + 1], (_koszul_block(M, j),))
    return Complex(pq, QQ, objs, diffs, hereditary=False)


def _koszul_block(M: CVObject, j: int) -> Mat:
    """Contraction Lambda^{r+1-j} V (x) M_j -> Lambda^{r-j} V (x) M_{j+1}."""
    r = M.r
    p = r + 1 - j
    src, tgt = wedge_basis(r, p), wedge_basis(r, p - 1)
    tidx = {I: n for n, I in enumerate(tgt)}
    blocks: dict[tuple[int, int], Mat] = {}
    for c, I in enumerate(src):
        for t, v in enumerate(I):
            J = I[:t] + I[t + 1:]
            B = M.act(j, v).scale(-1 if t % 2 else 1)
            key = (tidx[J], c)
            blocks[key] = blocks[key] + B if key in blocks else B
    return _block_matrix([M.dims[j + 1]] * len(tgt), [M.dims[j]] * len(src), blocks)


def _twist_projection(M: CVObject) -> tuple[Mat, Mat]:
    """Projection V (x) M_r -> T_0(M)_r and a section of it (cached on M)."""
    if M._twist is None:
        P = _cokernel(_koszul_block(M, M.r - 1))
        M._twist = (P, _section(P))
    return M._twist


def _cokernel(A: Mat) -> Mat:
    """Projection onto the cokernel of A (rows: cokernel basis)."""
    if A.ncols == 0 or A.rank() == 0:
        return Mat.identity(QQ, A.nrows)
    return A.cokernel_projection()


def _section(P: Mat) -> Mat:
    return P.right_inverse()


def twist_T(M: CVObject, i: int = 0) -> CVObject:
    """T_i(M) for i <= 0, from the Koszul complex of M."""
    if i > 0:
        raise PreconditionError("twist functors are only defined (nonzero) for i <= 0")
    r = M.r
    if i < 0:
        h = CohomologyObject(koszul_complex(M), i).rep.dims[0] if i >= -r else 0
        return CVObject.build(r, [0] * r + [h], [])
    P, _ = _twist_projection(M)
    dims = list(M.dims[1:]) + [P.nrows]
    acts = [[M.act(j, k) for k in range(r + 1)] for j in range(1, r)]
    dr = M.dims[r]
    acts.append([P.submatrix(range(P.nrows), range(k * dr, (k + 1) * dr)) for k in range(r + 1)])
    return CVObject.build(r, dims, acts)


def koszul_negative_cohomology(M: CVObject) -> dict[int, int]:
    """dim H^i(K(M)) for i < 0; all zero iff T_i(M) = 0 for every i < 0."""
    K = koszul_complex(M)
    out = {}
    for i in range(-M.r, 0):
        h = CohomologyObject(K, i).rep.dims[0]
        if h:
            out[i] = h
    return out


def heart_twist_n(M: CVObject, n: int) -> CVObject:
    """Phi H^0_0(Psi(M)(n + r)) via the closed cokernel formula for each component."""
    if n < 1:
        raise PreconditionError("heart_twist_n needs n >= 1")
    r = M.r
    d_prev, d_last = M.dims[r - 1], M.dims[r]
    projs = []
    for i in range(r + 1):
        d = n + i
        blocks = []
        for a, b in wedge_basis(r, 2):
            X = Mat.kron(mult_matrix(r, variable(r, a), d - 1), M.act(r - 1, b))
            Y = Mat.kron(mult_matrix(r, variable(r, b), d - 1), M.act(r - 1, a))
            blocks.append(X - Y)
        A = Mat.hstack(QQ, blocks, sym_dim(r, d) * d_last)
        projs.append(_cokernel(A))
    dims = [P.nrows for P in projs]
    acts = []
    for i in range(r):
        row = []
        for k in range(r + 1):
            lift = Mat.kron(mult_matrix(r, variable(r, k), n + i), Mat.identity(QQ, d_last))
            row.append(projs[i + 1] @ lift @ _section(projs[i]))
        acts.append(row)
    return CVObject.build(r, dims, acts)


def twist_T_morphism(f: RepMorphism, P: CVObject, Q: CVObject) -> RepMorphism:
    """T_0(f): T_0(P) -> T_0(Q) for a morphism f: P -> Q."""
    r = P.r
    TP, TQ = twist_T(P, 0), twist_T(Q, 0)
    pP, sP = _twist_projection(P)
    pQ, _ = _twist_projection(Q)
    lift = Mat.block_diag(QQ, [f.mats[r]] * (r + 1))
    last = pQ @ lift @ sP
    if not (last @ pP == pQ @ lift):
        raise AssertionError("morphism does not descend to the cokernels")
    return RepMorphism(TP.rep, TQ.rep, tuple(f.mats[1:]) + (last,))


def heart_twist_witnesses(M: CVObject, n_max: int = 6) -> list[tuple[int, CVObject, CVObject, RepMorphism | None]]:
    """For n = 1..n_max: heart_twist_n(M, n), Phi H^0_0(Psi(M)(n + r)) and an explicit isomorphism.

    The first isomorphism is searched for; later ones are transported along T_0 using the
    comparison maps of both sequences, with a fresh search whenever a comparison map fails.
    """
    r = M.r
    eng = psi(M).engine(1 + r)
    zero = CVObject.zero(r)
    out = []
    prev = None
    for n in range(1, n_max + 1):
        A = heart_twist_n(M, n)
        B = eng.window(n + r).get(0, zero)
        f = None
        if prev is not None and prev[3] is not None:
            _, A0, B0, f0 = prev
            cA, cB = comparison_map(A0, A), comparison_map(B0, B)
            if cA is not None and cB is not None and cA.is_iso() and cB.is_iso():
                g = cB.compose(twist_T_morphism(f0, A0, B0)).compose(cA.inverse())
                f = RepMorphism(A.rep, B.rep, g.mats)
        if f is None or not f.is_iso():
            f = cv_isomorphism(A, B)
        out.append((n, A, B, f))
        prev = out[-1]
    return out


def iterate_twist(M: CVObject, times: int) -> CVObject:
    out = M
    for _ in range(times):
        out = twist_T(out, 0)
    return out


# --- complexes of line bundles ---

Blocks = dict[tuple[int, int], dict[Mono, Mat]]


def _add_into(acc: dict, key, M: Mat):
    if key in acc:
        acc[key] = acc[key] + M
    else:
        acc[key] = M


def _compose_blocks(second: Blocks, first: Blocks) -> Blocks:
    out: Blocks = {}
    for (a, b), fm in first.items():
        for (b2, c), sm in second.items():
            if b2 != b:
                continue
            slot = out.setdefault((a, c), {})
            for m1, X in fm.items():
                for m2, Y in sm.items():
                    _add_into(slot, mono_mul(m1, m2), Y @ X)
    return _clean(out)


def _clean(blocks: Blocks) -> Blocks:
    out = {}
    for key, mm in blocks.items():
        kept = {m: X for m, X in mm.items() if not X.is_zero()}
        if kept:
            out[key] = kept
    return out


class LineComplex:
    """Bounded complex whose degree-k term is sum_a O(a)^{mult}; d_k has homogeneous polynomial blocks."""

    def __init__(self, r: int, terms: Mapping[int, Mapping[int, int]], diffs: Mapping[int, Blocks] | None = None,
                 check: bool = True):
        if r < 1:
            raise ValidationError("r must be at least 1")
        self.r = r
        self.terms = {int(k): {int(a): int(m) for a, m in sorted(t.items()) if m}
                      for k, t in sorted(terms.items())}
        self.terms = {k: t for k, t in self.terms.items() if t}
        self.diffs = {int(k): _clean(b) for k, b in (diffs or {}).items()}
        self.diffs = {k: b for k, b in self.diffs.items() if b}
        self._engines: dict[int, "_GammaEngine"] = {}
        self._models: dict[int, "LineComplex"] = {}
        if check:
            self._validate()

    def mult(self, k: int, a: int) -> int:
        return self.terms.get(k, {}).get(a, 0)

    def _validate(self):
        for k, blocks in self.diffs.items():
            for (a, b), mm in blocks.items():
                for mono, X in mm.items():
                    if len(mono) != self.r + 1 or sum(mono) != b - a:
                        raise ValidationError(f"d_{k}: block O({a}) -> O({b}) needs degree {b - a} entries")
                    if X.shape != (self.mult(k + 1, b), self.mult(k, a)):
                        raise ValidationError(f"d_{k}: block O({a}) -> O({b}) has the wrong shape")
        for k in self.diffs:
            if k + 1 in self.diffs and _compose_blocks(self.diffs[k + 1], self.diffs[k]):
                raise ValidationError(f"d_{k + 1} o d_{k} is not zero")

    @classmethod
    def line_bundle(cls, r: int, m: int, degree: int = 0) -> "LineComplex":
        return cls(r, {degree: {m: 1}})

    @classmethod
    def zero(cls, r: int) -> "LineComplex":
        return cls(r, {})

    @classmethod
    def assemble(cls, r: int, pieces: Mapping[int, list], entries: Iterable, check: bool = True) -> "LineComplex":
        """Build from named pieces ``(key, twist, size)`` per degree and entries
        ``(degree, src_key, tgt_key, mono, Mat)``; pieces of equal twist are concatenated."""
        where = {}
        terms: dict[int, dict[int, int]] = {}
        for k, lst in pieces.items():
            cnt: dict[int, int] = {}
            for key, a, size in lst:
                if size:
                    where[(k, key)] = (a, cnt.get(a, 0))
                    cnt[a] = cnt.get(a, 0) + size
            terms[k] = cnt
        acc: dict[tuple, list] = {}
        for k, sk, tk, mono, X in entries:
            if X.nrows == 0 or X.ncols == 0:
                continue
            a, co = where[(k, sk)]
            b, ro = where[(k + 1, tk)]
            acc.setdefault((k, a, b, mono), []).append((ro, co, X))
        diffs: dict[int, Blocks] = {}
        for (k, a, b, mono), lst in acc.items():
            R, C = terms[k + 1][b], terms[k][a]
            flat = [0] * (R * C)
            for ro, co, X in lst:
                for i, row in enumerate(X.rows()):
                    base = (ro + i) * C + co
                    for j, x in enumerate(row):
                        if x:
                            flat[base + j] += x
            diffs.setdefault(k, {}).setdefault((a, b), {})[mono] = Mat.from_flat(QQ, R, C, flat)
        return cls(r, terms, diffs, check)

    def d(self, k: int) -> Blocks:
        return self.diffs.get(k, {})

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> list[int]:
        return sorted(self.terms)

    def twists(self) -> list[int]:
        return sorted({a for t in self.terms.values() for a in t})

    def min_twist(self) -> int | None:
        tw = self.twists()
        return tw[0] if tw else None

    def rank(self) -> int:
        return sum(m for t in self.terms.values() for m in t.values())

    def twist(self, n: int) -> "LineComplex":
        """F(n)."""
        terms = {k: {a + n: m for a, m in t.items()} for k, t in self.terms.items()}
        diffs = {k: {(a + n, b + n): dict(mm) for (a, b), mm in bl.items()} for k, bl in self.diffs.items()}
        return LineComplex(self.r, terms, diffs, check=False)

    def shift(self, s: int) -> "LineComplex":
        """F[s]: degree k term is F^{k+s}, differential times (-1)^s."""
        sign = -1 if s % 2 else 1
        terms = {k - s: dict(t) for k, t in self.terms.items()}
        diffs = {k - s: {key: {m: X.scale(sign) for m, X in mm.items()} for key, mm in bl.items()}
                 for k, bl in self.diffs.items()}
        return LineComplex(self.r, terms, diffs, check=False)

    @staticmethod
    def direct_sum(items: list["LineComplex"]) -> "LineComplex":
        if not items:
            raise ValidationError("empty direct sum")
        r = items[0].r
        pieces: dict[int, list] = {}
        entries = []
        for idx, F in enumerate(items):
            if F.r != r:
                raise ValidationError("direct sum of complexes over different r")
            for k, t in F.terms.items():
                for a, m in t.items():
                    pieces.setdefault(k, []).append(((idx, a), a, m))
            for k, bl in F.diffs.items():
                for (a, b), mm in bl.items():
                    for mono, X in mm.items():
                        entries.append((k, (idx, a), (idx, b), mono, X))
        return LineComplex.assemble(r, pieces, entries, check=False)

    # acyclic models

    def tensor_koszul(self, m: int) -> "LineComplex":
        """F (x) [sum O(m) -> sum O(2m) -> ... -> O((r+1)m)], a quasi-isomorphic complex with twists raised by m."""
        r = self.r
        pieces: dict[int, list] = {}
        entries = []
        for k, t in self.terms.items():
            for a, mlt in t.items():
                for l in range(r + 1):
                    pieces.setdefault(k + l, []).append(((k, a, l), a + (l + 1) * m, mlt * len(wedge_basis(r, l + 1))))
        for k, bl in self.diffs.items():
            for (a, b), mm in bl.items():
                for l in range(r + 1):
                    E = Mat.identity(QQ, len(wedge_basis(r, l + 1)))
                    for mono, X in mm.items():
                        entries.append((k + l, (k, a, l), (k + 1, b, l), mono, Mat.kron(X, E)))
        for k, t in self.terms.items():
            sign = -1 if k % 2 else 1
            for a, mlt in t.items():
                G = Mat.identity(QQ, mlt)
                for l in range(r):
                    src, tgt = wedge_basis(r, l + 1), wedge_basis(r, l + 2)
                    tidx = {I: n for n, I in enumerate(tgt)}
                    for j in range(r + 1):
                        rows = [[0] * len(src) for _ in tgt]
                        for c, I in enumerate(src):
                            if j in I:
                                continue
                            J = tuple(sorted(I + (j,)))
                            rows[tidx[J]][c] = sign * (-1) ** J.index(j)
                        S = Mat.from_rows(QQ, rows, len(src))
                        if S.is_zero():
                            continue
                        mono = tuple(m if i == j else 0 for i in range(r + 1))
                        entries.append((k + l, (k, a, l), (k, a, l + 1), mono, Mat.kron(G, S)))
        return LineComplex.assemble(r, pieces, entries, check=False)

    def acyclic_model(self, lowest: int) -> "LineComplex":
        """A quasi-isomorphic complex all of whose twists stay >= -r after twisting by ``lowest``."""
        if self.is_zero():
            return self
        need = -self.r - (self.min_twist() + lowest)
        if need <= 0:
            return self
        if need not in self._models:
            self._models[need] = self.tensor_koszul(need)
        return self._models[need]

    def minimize(self) -> "LineComplex":
        """Cancel invertible constant blocks; the result is homotopy equivalent and minimal."""
        terms = {k: dict(t) for k, t in self.terms.items()}
        diffs = {k: {key: dict(mm) for key, mm in bl.items()} for k, bl in self.diffs.items()}
        const = unit_mono(self.r)
        for k in sorted(terms):
            for a in sorted(terms[k]):
                D = diffs.get(k, {}).get((a, a), {}).get(const)
                if D is None or D.is_zero():
                    continue
                _, S = D.rref()
                _, R = D.submatrix(range(D.nrows), S).T.rref()
                keepS = [j for j in range(D.ncols) if j not in set(S)]
                keepR = [i for i in range(D.nrows) if i not in set(R)]
                alpha_inv = D.submatrix(R, S).inverse()
                old = diffs.get(k, {})
                new: Blocks = {}
                pairs = set(old) | {(a1, a2) for (a1, x) in old if x == a for (y, a2) in old if y == a}
                for a1, a2 in sorted(pairs):
                    mm = old.get((a1, a2), {})
                    rows = keepR if a2 == a else range(terms[k + 1][a2])
                    cols = keepS if a1 == a else range(terms[k][a1])
                    slot = {m: X.submatrix(rows, cols) for m, X in mm.items()}
                    beta = old.get((a1, a)) if a1 <= a else None
                    gamma = old.get((a, a2)) if a2 >= a else None
                    if beta and gamma:
                        for mg, Gm in gamma.items():
                            g = Gm.submatrix(rows, S) @ alpha_inv
                            for mb, Bm in beta.items():
                                _add_into(slot, mono_mul(mg, mb), (g @ Bm.submatrix(R, cols)).scale(-1))
                    new[(a1, a2)] = slot
                diffs[k] = _clean(new)
                if k - 1 in diffs:
                    diffs[k - 1] = _clean({(a0, a2): ({m: X.submatrix(keepS, range(X.ncols)) for m, X in mm.items()}
                                                      if a2 == a else mm)
                                           for (a0, a2), mm in diffs[k - 1].items()})
                if k + 1 in diffs:
                    diffs[k + 1] = _clean({(a1, a3): ({m: X.submatrix(range(X.nrows), keepR) for m, X in mm.items()}
                                                      if a1 == a else mm)
                                           for (a1, a3), mm in diffs[k + 1].items()})
                terms[k][a] -= len(S)
                terms[k + 1][a] -= len(S)
        return LineComplex(self.r, terms, diffs, check=False)

    # global sections

    def engine(self, lowest: int = 0) -> "_GammaEngine":
        model = self.acyclic_model(lowest)
        key = -self.r - (model.min_twist() or 0)
        if key not in self._engines:
            self._engines[key] = _GammaEngine(model)
        return self._engines[key]

    def key(self):
        return (self.r, tuple((k, tuple(t.items())) for k, t in sorted(self.terms.items())),
                tuple((k, tuple(sorted((ab, tuple(sorted((m, X.key()) for m, X in mm.items())))
                                       for ab, mm in bl.items())))
                      for k, bl in sorted(self.diffs.items())))

    def __eq__(self, other):
        return isinstance(other, LineComplex) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"LineComplex(r={self.r}, terms={self.terms})"

    def to_json(self) -> dict:
        diffs = {}
        for k, bl in sorted(self.diffs.items()):
            diffs[str(k)] = [{"src": a, "dst": b, "mono": list(m), "matrix": X.to_json()}
                             for (a, b), mm in sorted(bl.items()) for m, X in sorted(mm.items())]
        return {"kind": "line-complex", "r": self.r,
                "terms": {str(k): {str(a): m for a, m in t.items()} for k, t in sorted(self.terms.items())},
                "diffs": diffs}

    @classmethod
    def from_json(cls, data: dict) -> "LineComplex":
        try:
            r = int(data["r"])
            terms = {int(k): {int(a): int(m) for a, m in t.items()} for k, t in data.get("terms", {}).items()}
            diffs: dict[int, Blocks] = {}
            for k, lst in data.get("diffs", {}).items():
                k = int(k)
                for e in lst:
                    a, b = int(e["src"]), int(e["dst"])
                    mono = tuple(int(x) for x in e["mono"])
                    R, C = terms.get(k + 1, {}).get(b, 0), terms.get(k, {}).get(a, 0)
                    X = Mat.from_rows(QQ, e["matrix"], C) if R else Mat.zeros(QQ, 0, C)
                    diffs.setdefault(k, {}).setdefault((a, b), {})[mono] = X
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed line complex: {exc}") from exc
        return cls(r, terms, diffs)


class _GammaEngine:
    """Cached Gamma(F(t)) complexes, their cohomology and the multiplication maps between them."""

    def __init__(self, F: LineComplex):
        self.F = F
        self.r = F.r
        self.lowest = -F.r - F.min_twist() if not F.is_zero() else -10 ** 9
        self._cx: dict[int, Complex] = {}
        self._coh: dict[tuple[int, int], CohomologyObject] = {}
        self._act: dict[tuple[int, int, int], Mat] = {}

    def _layout(self, k: int, t: int) -> list[tuple[int, int, int, int]]:
        """(twist, mult, offset, S-degree) groups of Gamma(F(t)) in degree k."""
        out, off = [], 0
        for a, m in sorted(self.F.terms.get(k, {}).items()):
            d = a + t
            out.append((a, m, off, d))
            off += sym_dim(self.r, d) * m
        return out

    def dim(self, k: int, t: int) -> int:
        return sum(sym_dim(self.r, d) * m for _, m, _, d in self._layout(k, t))

    def complex(self, t: int) -> Complex:
        if t < self.lowest:
            raise PreconditionError("twist below the range of the acyclic model")
        if t in self._cx:
            return self._cx[t]
        r, F = self.r, self.F
        pq = point_quiver()
        objs = {k: Representation.build(pq, QQ, [self.dim(k, t)], []) for k in F.terms}
        diffs = {}
        for k, bl in F.diffs.items():
            src, tgt = self._layout(k, t), {a: (m, off, d) for a, m, off, d in self._layout(k + 1, t)}
            R, C = self.dim(k + 1, t), self.dim(k, t)
            acc: dict[tuple[int, int], object] = {}
            for a, ma, coff, da in src:
                if da < 0:
                    continue
                smon = monomials(r, da)
                for b in tgt:
                    mm = bl.get((a, b))
                    if not mm:
                        continue
                    mb, roff, db = tgt[b]
                    tidx = monomial_index(r, db)
                    for mono, X in mm.items():
                        ents = X.m.entries()
                        nz = [(i, j, ents[i * ma + j]) for i in range(mb) for j in range(ma) if ents[i * ma + j] != 0]
                        for si, s in enumerate(smon):
                            ti = tidx[mono_mul(s, mono)]
                            r0, c0 = roff + ti * mb, coff + si * ma
                            for i, j, x in nz:
                                key = (r0 + i, c0 + j)
                                acc[key] = acc.get(key, 0) + x
            if R and C:
                D = QQ._empty(R, C)
                for (i, j), x in acc.items():
                    D[i, j] = x
                diffs[k] = RepMorphism(objs[k], objs[k + 1], (Mat(QQ, D, R, C),))
        cx = Complex(pq, QQ, objs, diffs, hereditary=False)
        self._cx[t] = cx
        return cx

    def cohomology(self, t: int, i: int) -> CohomologyObject:
        if (t, i) not in self._coh:
            self._coh[(t, i)] = CohomologyObject(self.complex(t), i)
        return self._coh[(t, i)]

    def dims(self, t: int) -> dict[int, int]:
        out = {}
        for i in self.F.terms:
            h = self.cohomology(t, i).rep.dims[0]
            if h:
                out[i] = h
        return out

    def multiplication(self, k: int, t: int, var: int) -> Mat:
        """Chain-level x_var: Gamma(F(t))^k -> Gamma(F(t+1))^k."""
        r = self.r
        R, C = self.dim(k, t + 1), self.dim(k, t)
        out = QQ._empty(R, C)
        tgt = {a: (off, d) for a, _, off, d in self._layout(k, t + 1)}
        mono = variable(r, var)
        for a, m, off, d in self._layout(k, t):
            if d < 0:
                continue
            roff, db = tgt[a]
            tidx = monomial_index(r, db)
            for si, s in enumerate(monomials(r, d)):
                ti = tidx[mono_mul(s, mono)]
                for g in range(m):
                    out[roff + ti * m + g, off + si * m + g] = 1
        return Mat(QQ, out, R, C)

    def action(self, t: int, i: int, var: int) -> Mat:
        key = (t, i, var)
        if key not in self._act:
            src, tgt = self.cohomology(t, i), self.cohomology(t + 1, i)
            if src.rep.dims[0] == 0 or tgt.rep.dims[0] == 0:
                self._act[key] = Mat.zeros(QQ, tgt.rep.dims[0], src.rep.dims[0])
            else:
                X = self.multiplication(i, t, var) @ src.lifts(0)
                self._act[key] = tgt.classes(0, X)
        return self._act[key]

    def window(self, n: int) -> dict[int, CVObject]:
        """Phi of H^i_0(F(n)) for every i: components H^i Gamma(F(n+j)), j = 0..r."""
        r = self.r
        out = {}
        for i in sorted(self.F.terms):
            dims = [self.cohomology(n + j, i).rep.dims[0] for j in range(r + 1)]
            if not any(dims):
                continue
            acts = [[self.action(n + j, i, k) for k in range(r + 1)] for j in range(r)]
            out[i] = CVObject.build(r, dims, acts)
        return out


# --- conversions into the line-bundle model ---

@lru_cache(maxsize=None)
def _bar_words(r: int, k: int, budget: int) -> tuple[tuple[Mono, ...], ...]:
    """Words of k positive-degree monomials with total degree <= budget."""
    if k == 0:
        return ((),)
    out = []
    for d in range(1, budget + 1):
        for m in monomials(r, d):
            for rest in _bar_words(r, k - 1, budget - d):
                out.append((m,) + rest)
    return tuple(out)


def bar_model(C: Complex, r: int) -> LineComplex:
    """Total complex of the normalized bar resolutions A (x) A_+^{(x)k} (x) C^p.

    A generator word (w_1..w_k | M_i) of total degree j spans a copy of P_j, i.e. O(-j).  The bar
    construction is functorial, so the total complex is a strict complex of projectives.
    """
    objs = {p: CVObject(r, C.obj(p), check=False) for p in C.degrees()}
    const = unit_mono(r)
    pieces: dict[int, list] = {}
    entries = []
    for p, M in objs.items():
        for k in range(r + 1):
            for i in range(r + 1):
                if not M.dims[i]:
                    continue
                for w in _bar_words(r, k, r - i):
                    j = sum(sum(x) for x in w) + i
                    pieces.setdefault(p - k, []).append(((p, w, i), -j, M.dims[i]))
                    if k == 0:
                        continue
                    I = Mat.identity(QQ, M.dims[i])
                    entries.append((p - k, (p, w, i), (p, w[1:], i), w[0], I))
                    for t in range(1, k):
                        merged = w[:t - 1] + (mono_mul(w[t - 1], w[t]),) + w[t + 1:]
                        entries.append((p - k, (p, w, i), (p, merged, i), const, I.scale(-1 if t % 2 else 1)))
                    last = w[-1]
                    tgt_i = i + sum(last)
                    if M.dims[tgt_i]:
                        entries.append((p - k, (p, w, i), (p, w[:-1], tgt_i), const,
                                        M.act_mono(i, last).scale(-1 if k % 2 else 1)))
    for p, dC in C.diffs.items():
        M, N = objs[p], objs.get(p + 1)
        if N is None:
            continue
        for k in range(r + 1):
            for i in range(r + 1):
                if not (M.dims[i] and N.dims[i]):
                    continue
                for w in _bar_words(r, k, r - i):
                    entries.append((p - k, (p, w, i), (p + 1, w, i), const,
                                    dC.mats[i].scale(-1 if k % 2 else 1)))
    return LineComplex.assemble(r, pieces, entries, check=True)


def psi(M: CVObject) -> LineComplex:
    """A minimal complex of line bundles O(-j), 0 <= j <= r, representing Psi(M) (its Beilinson resolution)."""
    if M.is_zero():
        return LineComplex.zero(M.r)
    return bar_model(Complex.single(M.rep, 0, hereditary=False), M.r).minimize()


def cv_complex_model(C: Complex, r: int) -> LineComplex:
    if C.is_zero():
        return LineComplex.zero(r)
    return bar_model(C, r).minimize()


def as_line_complex(obj, r: int | None = None) -> LineComplex:
    if isinstance(obj, LineComplex):
        return obj
    if isinstance(obj, CVObject):
        return psi(obj)
    if isinstance(obj, Complex):
        if r is None:
            r = obj.quiver.n - 1
        return cv_complex_model(obj, r)
    raise ValidationError(f"cannot interpret {type(obj).__name__} as an object of D(P^r)")


def phi_psi_witness(M: CVObject) -> RepMorphism:
    """The augmentation-induced isomorphism Phi(Psi(M)) -> M, computed on the bar model."""
    r = M.r
    B = bar_model(Complex.single(M.rep, 0, hereditary=False), r)
    eng = _GammaEngine(B)
    H = eng.window(0).get(0, CVObject.zero(r))
    mats = []
    for j in range(r + 1):
        cols = []
        # degree-0 term: generators (|M_i) of twist -i, Gamma gives S^{j-i} (x) M_i
        for a, m, off, d in eng._layout(0, j):
            i = -a
            if d < 0:
                continue
            blocks = [M.act_mono(i, s) for s in monomials(r, d)]
            cols.append(Mat.hstack(QQ, blocks, M.dims[j]) if blocks else Mat.zeros(QQ, M.dims[j], 0))
        eps = Mat.hstack(QQ, cols, M.dims[j]) if cols else Mat.zeros(QQ, M.dims[j], 0)
        if H.dims[j]:
            mats.append(eps @ eng.cohomology(j, 0).lifts(0))
        else:
            mats.append(Mat.zeros(QQ, M.dims[j], 0))
    f = RepMorphism(H.rep, M.rep, tuple(mats))
    if not f.is_iso():
        raise AssertionError("augmentation does not induce an isomorphism")
    return f


# --- Phi and cohomology in the glued t-structures ---

@dataclass
class GradedVecProfile:
    dims: dict[int, int]
    witnesses: dict[int, Mat] = dc_field(default_factory=dict)

    def support(self) -> list[int]:
        return sorted(self.dims)

    def to_json(self) -> dict:
        return {"dims": {str(i): d for i, d in sorted(self.dims.items())}}


def gamma_cohomology(F, n: int) -> GradedVecProfile:
    """RGamma(F(n)) as graded dimensions with cycle representatives."""
    F = as_line_complex(F)
    if F.is_zero():
        return GradedVecProfile({})
    eng = F.engine(n)
    dims, wit = {}, {}
    for i in sorted(F.engine(n).F.terms):
        H = eng.cohomology(n, i)
        if H.rep.dims[0]:
            dims[i] = H.rep.dims[0]
            wit[i] = H.lifts(0)
    return GradedVecProfile(dims, wit)


def line_cohomology_oracle(r: int, m: int) -> dict[int, int]:
    """Classical dimensions of H^*(P^r, O(m))."""
    if m >= 0:
        return {0: comb(m + r, r)}
    if m <= -r - 1:
        return {r: comb(-m - 1, r)}
    return {}


def n_tstructure_cohomology(F, n: int) -> dict[int, CVObject]:
    """H^i_n(F) for all i, each in twisted coordinates Phi(H^i_n(F)(n)) = Phi H^i_0(F(n))."""
    F = as_line_complex(F)
    if F.is_zero():
        return {}
    return F.engine(n).window(n)


def in_tstructure_range(F, n: int, low: int | None, high: int | None) -> bool:
    """Membership of F in D^{[low, high]}_n (None means unbounded on that side)."""
    prof = n_tstructure_cohomology(F, n)
    return all((low is None or i >= low) and (high is None or i <= high) for i in prof)


def phi(F) -> CVObject:
    """Phi(F) for F in the heart of the 0-th t-structure."""
    if isinstance(F, CVObject):
        F = psi(F)
    F = as_line_complex(F)
    if F.is_zero():
        return CVObject.zero(F.r)
    eng = F.engine(0)
    for j in range(F.r + 1):
        for i, h in eng.dims(j).items():
            if i != 0:
                raise NotInHeartError(f"RGamma(F({j})) has cohomology of dimension {h} in degree {i}",
                                      location=f"twist {j}, degree {i}")
    return eng.window(0).get(0, CVObject.zero(F.r))


def derived_twist_heart(M: CVObject, n: int) -> CVObject:
    """Phi H^0_0(Psi(M)(n)) computed through the line-bundle model."""
    return n_tstructure_cohomology(psi(M), n).get(0, CVObject.zero(M.r))


# --- stabilization ---

@dataclass
class StabilizationStep:
    n: int
    dims: dict[int, tuple[int, ...]]
    negative_twists: dict[int, dict[int, int]]
    isomorphic: bool

    @property
    def stable(self) -> bool:
        return self.isomorphic and not any(self.negative_twists.values())

    def to_json(self) -> dict:
        return {"n": self.n, "stable": self.stable,
                "dims": {str(i): list(d) for i, d in sorted(self.dims.items())},
                "negative_twists": {str(i): {str(k): v for k, v in sorted(t.items())}
                                    for i, t in sorted(self.negative_twists.items()) if t},
                "isomorphic": self.isomorphic}


@dataclass
class StabilizationCertificate:
    N: int
    confirm: int
    scan: list[StabilizationStep]
    witnesses: dict[tuple[int, int], RepMorphism]

    def to_json(self) -> dict:
        return {"N": self.N, "confirmed_through": self.N + self.confirm,
                "scan": [s.to_json() for s in self.scan]}


def comparison_map(P: CVObject, Q: CVObject) -> RepMorphism | None:
    """The canonical map T_0(P) -> Q when P, Q are consecutive windows of the same object.

    Identity on the first r components; on the last, the cokernel map induced by the action of
    Q from its component r-1 (equal to the last component of P).
    """
    r = P.r
    T = twist_T(P, 0)
    if T.dims[:r] != Q.dims[:r]:
        return None
    proj, sec = _twist_projection(P)
    dr = P.dims[r]
    A = Mat.hstack(QQ, [Q.act(r - 1, k) for k in range(r + 1)], Q.dims[r]) if dr else Mat.zeros(QQ, Q.dims[r], 0)
    phi_last = A @ sec
    if not (phi_last @ proj == A):
        return None
    mats = tuple(Mat.identity(QQ, d) for d in Q.dims[:r]) + (phi_last,)
    try:
        return RepMorphism(T.rep, Q.rep, mats)
    except ValidationError:
        return None


def _stab_step(eng: _GammaEngine, n: int, witnesses: dict) -> StabilizationStep:
    cur, nxt = eng.window(n), eng.window(n + 1)
    r = eng.r
    neg, iso = {}, True
    for i in sorted(set(cur) | set(nxt)):
        P = cur.get(i, CVObject.zero(r))
        Q = nxt.get(i, CVObject.zero(r))
        neg[i] = koszul_negative_cohomology(P)
        f = comparison_map(P, Q)
        if f is None or not f.is_iso():
            iso = False
        else:
            witnesses[(n, i)] = f
    return StabilizationStep(n, {i: P.dims for i, P in cur.items()}, neg, iso)


def stabilization_bound(F, window: int = 24, confirm: int = 5) -> StabilizationCertificate:
    """Least N >= 0 such that H^i_n(F) -> H^i_{n+1}(F) is an isomorphism for all i and all n in [N, N+confirm].

    Each step checks that every H^i_n(F) lies in the (n+1)-st heart (all negative twists of its
    window vanish) and that the canonical comparison map is an isomorphism.
    """
    F = as_line_complex(F)
    if F.is_zero():
        return StabilizationCertificate(0, confirm, [], {})
    eng = F.engine(0)
    scan: list[StabilizationStep] = []
    witnesses: dict = {}
    run = 0
    for n in range(0, window + confirm + 1):
        step = _stab_step(eng, n, witnesses)
        scan.append(step)
        run = run + 1 if step.stable else 0
        if run == confirm + 1:
            N = n - confirm
            return StabilizationCertificate(N, confirm, scan, {k: v for k, v in witnesses.items() if k[0] >= N})
    raise StabilizationError(f"no stabilization within a window of {window} twists",
                             location=str([s.to_json() for s in scan]))


# --- the module M(F) and the surjection from a pulled-back object ---

@dataclass
class MFModule:
    r: int
    start: int
    dims: dict[int, int]
    actions: dict[tuple[int, int], Mat]
    generation_degree: int
    verified: tuple[int, int]

    def to_json(self) -> dict:
        return {"r": self.r, "start": self.start,
                "dims": {str(n): d for n, d in sorted(self.dims.items())},
                "generation_degree": self.generation_degree,
                "surjectivity_verified_on": list(self.verified)}


def _module_action(eng: _GammaEngine, n: int, mono: Mono) -> Mat:
    out = Mat.identity(QQ, eng.cohomology(n, 0).rep.dims[0])
    t = n
    for k, e in enumerate(mono):
        for _ in range(e):
            out = eng.action(t, 0, k) @ out
            t += 1
    return out


def _limiting_heart_engine(F: LineComplex) -> tuple[_GammaEngine, StabilizationCertificate]:
    cert = stabilization_bound(F)
    eng = F.engine(0)
    bad = [i for i in eng.window(cert.N) if i != 0]
    if bad:
        raise NotInHeartError(f"H^{bad[0]} of the limiting t-structure is nonzero", location=f"degree {bad[0]}")
    return eng, cert


def _generation_scan(eng: _GammaEngine, r: int, start: int, horizon: int) -> tuple[int, dict, dict]:
    dims, acts, surj = {}, {}, {}
    for n in range(start, horizon + 1):
        dims[n] = eng.cohomology(n, 0).rep.dims[0]
    for n in range(start, horizon):
        blocks = [eng.action(n, 0, k) for k in range(r + 1)]
        for k, A in enumerate(blocks):
            acts[(n, k)] = A
        A = Mat.hstack(QQ, blocks, dims[n + 1])
        surj[n] = A.rank() == dims[n + 1]
    return dims, acts, surj


def module_MF(F, start: int = 1, horizon: int = 24) -> MFModule:
    """M(F)_n = H^0 RGamma(F(n)) for n >= start with a finite-generation certificate."""
    F = as_line_complex(F)
    r = F.r
    if F.is_zero():
        return MFModule(r, start, {}, {}, start, (start, start + r + 1))
    eng, cert = _limiting_heart_engine(F)
    top = max(cert.N, start) + horizon + r + 2
    dims, acts, surj = _generation_scan(eng, r, start, top)
    for g in range(start, top - r - 1):
        if all(surj[n] for n in range(g, g + r + 2)):
            keep = range(start, g + r + 3)
            return MFModule(r, start, {n: dims[n] for n in keep},
                            {key: A for key, A in acts.items() if key[0] in keep and key[0] + 1 in keep},
                            g, (g, g + r + 1))
    raise StabilizationError("module M(F) not generated within the scanned degrees")


@dataclass
class GeneratorSurjection:
    r: int
    generator_dim: int
    twist: int
    pieces: list[tuple[int, int, int]]
    evaluation: Mat
    surjectivity: dict[int, tuple[int, int]]

    def to_json(self) -> dict:
        return {"G_dim": self.generator_dim, "twist": self.twist,
                "pieces": [{"degree": n, "sym_dim": s, "module_dim": m} for n, s, m in self.pieces],
                "evaluation": self.evaluation.to_json(),
                "surjectivity": {str(n): {"rank": a, "target_dim": b} for n, (a, b) in sorted(self.surjectivity.items())}}


def generator_surjection(F, min_degree: int = 1) -> GeneratorSurjection:
    """G (x) O(-N) -> F with G = sum_{n=min_degree}^{N} S^{N-n} V (x) M(F)_n, epi in the limiting heart."""
    F = as_line_complex(F)
    r = F.r
    if F.is_zero():
        return GeneratorSurjection(r, 0, 0, [], Mat.zeros(QQ, 0, 0), {})
    mf = module_MF(F, start=min_degree)
    eng = F.engine(0)
    N = mf.generation_degree
    pieces, blocks = [], []
    for n in range(min_degree, N + 1):
        dm = eng.cohomology(n, 0).rep.dims[0]
        pieces.append((n, sym_dim(r, N - n), dm))
        for s in monomials(r, N - n):
            blocks.append(_module_action(eng, n, s))
    dN = eng.cohomology(N, 0).rep.dims[0]
    ev = Mat.hstack(QQ, blocks, dN) if blocks else Mat.zeros(QQ, dN, 0)
    checks = {}
    for t in range(N, N + r + 2):
        imgs = [_module_action(eng, N, s) @ ev for s in monomials(r, t - N)]
        dt = eng.cohomology(t, 0).rep.dims[0]
        rank = Mat.hstack(QQ, imgs, dt).rank() if imgs else 0
        checks[t] = (rank, dt)
        if rank != dt:
            raise AssertionError(f"evaluation map is not surjective in degree {t}")
    return GeneratorSurjection(r, ev.ncols, -N, pieces, ev, checks)


# --- JSON loading ---

def cv_complex_from_json(data: dict) -> Complex:
    r = int(data["r"])
    objs = {int(n): CVObject.from_json({"r": r, **o}) for n, o in data["degrees"].items()}
    q = cv_quiver(r)
    diffs = {}
    for n, mats in data.get("diffs", {}).items():
        n = int(n)
        src = objs.get(n, CVObject.zero(r)).rep
        tgt = objs.get(n + 1, CVObject.zero(r)).rep
        diffs[n] = RepMorphism(src, tgt, tuple(Mat.from_rows(QQ, A, src.dims[v]) if tgt.dims[v]
                                               else Mat.zeros(QQ, 0, src.dims[v]) for v, A in enumerate(mats)))
    return Complex(q, QQ, {n: o.rep for n, o in objs.items()}, diffs, hereditary=False)


def load_object(data: dict) -> LineComplex:
    """Parse a JSON description of an object of D(P^r) into the line-bundle model."""
    kind = data.get("kind")
    try:
        if kind == "line-bundle":
            F = LineComplex.line_bundle(int(data["r"]), int(data["twist"]), int(data.get("degree", 0)))
        elif kind == "line-complex" or ("terms" in data and "dims" not in data):
            F = LineComplex.from_json(data)
        elif kind == "cv-complex" or "degrees" in data:
            F = cv_complex_model(cv_complex_from_json(data), int(data["r"]))
        elif kind == "cv-object" or "dims" in data:
            F = psi(CVObject.from_json(data))
        else:
            raise ValidationError("unrecognized object kind", location="kind")
        shift = int(data.get("shift", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed object: {exc}") from exc
    return F.shift(shift) if shift else F
