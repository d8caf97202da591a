"""Indecomposable decomposition of Kronecker representations (pencils a, b: V1 -> V2)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import flint

from .errors import ValidationError
from .linalg import Field, Mat, contains, span
from .quiver import (Representation, RepMorphism, Subobject, hom_space, kronecker_quiver)

PREPROJECTIVE = "preprojective"
REGULAR = "regular"
PREINJECTIVE = "preinjective"

INFINITY = "inf"


# polynomials over a field as coefficient lists, lowest degree first

def _trim(F: Field, a: list) -> list:
    a = [F(x) for x in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(F: Field, a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [F(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = F(out[i + j] + x * y)
    return _trim(F, out)


def _padd(F: Field, a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return _trim(F, [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _ppow(F: Field, a: Sequence, k: int) -> list:
    out = [F(1)]
    for _ in range(k):
        out = _pmul(F, out, a)
    return out


def _monic(F: Field, a: list) -> tuple:
    inv = F.inv(a[-1])
    return tuple(F(x * inv) for x in a)


def factor_over(F: Field, coeffs: Sequence) -> list[tuple[tuple, int]]:
    """Monic irreducible factors of a polynomial over F with multiplicities."""
    if F.p is None:
        poly = flint.fmpq_poly([flint.fmpq(Fraction(c).numerator, Fraction(c).denominator) for c in coeffs])
        conv = lambda c: Fraction(int(c.p), int(c.q))
    else:
        poly = flint.nmod_poly([int(c) for c in coeffs], F.p)
        conv = int
    if poly.degree() <= 0:
        return []
    _, facs = poly.factor()
    out = []
    for f, e in facs:
        cs = [conv(c) for c in f.coeffs()]
        out.append((_monic(F, cs), int(e)))
    out.sort(key=lambda fe: (len(fe[0]), tuple(str(c) for c in fe[0])))
    return out


def label_str(label) -> str:
    """Human-readable point of P^1 for a pencil label."""
    if label == INFINITY:
        return "(1:0)"
    if len(label) == 2:
        return f"({-label[0]}:1)"
    terms = []
    for i, c in enumerate(label):
        if c == 0:
            continue
        mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        if i == 0:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(terms)


def label_sort_key(label) -> tuple:
    if label is None:
        return (0,)
    if label == INFINITY:
        return (2,)
    return (1, len(label), tuple(str(c) for c in label))


# canonical indecomposables

def preprojective_rep(F: Field, n: int) -> Representation:
    """dims (n, n+1): a = [I; 0], b = [0; I]."""
    a = [[1 if i == j else 0 for j in range(n)] for i in range(n + 1)]
    b = [[1 if i == j + 1 else 0 for j in range(n)] for i in range(n + 1)]
    return Representation.build(kronecker_quiver(), F, [n, n + 1], [a, b] if n else [None, None])


def preinjective_rep(F: Field, n: int) -> Representation:
    """dims (n+1, n): a = [I | 0], b = [0 | I]."""
    a = [[1 if i == j else 0 for j in range(n + 1)] for i in range(n)]
    b = [[1 if j == i + 1 else 0 for j in range(n + 1)] for i in range(n)]
    return Representation.build(kronecker_quiver(), F, [n + 1, n], [a, b] if n else [None, None])


def regular_rep(F: Field, label, size: int) -> Representation:
    """Regular block: a = I, b = -companion(g^size); at infinity a = nilpotent Jordan, b = I."""
    q = kronecker_quiver()
    if label == INFINITY:
        n = size
        J = [[1 if i == j + 1 else 0 for j in range(n)] for i in range(n)]
        I = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return Representation.build(q, F, [n, n], [J, I])
    g = _ppow(F, list(label), size)
    n = len(g) - 1
    C = [[0] * n for _ in range(n)]
    for i in range(1, n):
        C[i][i - 1] = 1
    for i in range(n):
        C[i][n - 1] = F(-g[i])
    I = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    negC = [[F(-x) for x in r] for r in C]
    return Representation.build(q, F, [n, n], [I, negC])


@dataclass
class KroneckerSummand:
    kind: str
    index: int          # n for P_n / I_n, Jordan size for regular blocks
    label: object       # monic irreducible (tuple, low first) or INFINITY for regular blocks
    rep: Representation
    embedding: RepMorphism

    @property
    def dims(self) -> tuple[int, int]:
        return self.rep.dims

    def class_key(self) -> tuple:
        lab = None if self.label is None else (INFINITY if self.label == INFINITY
                                               else tuple(str(c) for c in self.label))
        return (self.kind, self.index, lab)

    def sort_key(self) -> tuple:
        return (self.dims, label_sort_key(self.label), self.kind, self.index)

    def describe(self) -> dict:
        out = {"type": self.kind, "dims": list(self.dims)}
        if self.kind == REGULAR:
            out["label"] = label_str(self.label)
            out["size"] = self.index
        else:
            out["n"] = self.index
        return out


@dataclass
class KroneckerDecomposition:
    rep: Representation
    summands: list[KroneckerSummand]
    isomorphism: RepMorphism   # direct sum of summand reps -> rep

    def multiplicities(self) -> list[tuple[dict, int]]:
        groups: dict = {}
        order = []
        for s in self.summands:
            k = s.class_key()
            if k not in groups:
                groups[k] = [s, 0]
                order.append(k)
            groups[k][1] += 1
        return [(groups[k][0].describe(), groups[k][1]) for k in order]


def _check_kronecker(E: Representation):
    if not E.quiver.is_kronecker():
        raise ValidationError("expected a representation of the Kronecker quiver (two arrows 1 -> 2)")


def _split_retraction(f: RepMorphism, candidates: list[RepMorphism], left: bool) -> RepMorphism:
    """Find r among span(candidates) with r.f == id (left) or f.r == id (right)."""
    for h in candidates:
        comp = h.compose(f) if left else f.compose(h)
        dom = comp.source
        # End of an indecomposable P_n / I_n is the ground field
        lam = None
        for v, M in enumerate(comp.mats):
            if M.nrows:
                lam = M[0, 0]
                break
        if lam:
            r = h.scale(dom.field.inv(lam))
            check = r.compose(f) if left else f.compose(r)
            if all(M.is_identity() for M in check.mats):
                return r
    raise AssertionError("indecomposable summand does not split")


def _regular_points(F: Field):
    if F.p is None:
        yield (1, 0)
        yield (0, 1)
        k = 1
        while True:
            yield (1, k)
            yield (1, -k)
            k += 1
    else:
        yield (1, 0)
        yield (0, 1)
        for c in range(1, F.p):
            yield (1, c)


def kronecker_decompose(E: Representation) -> KroneckerDecomposition:
    _check_kronecker(E)
    F = E.field
    summands: list[KroneckerSummand] = []
    R = E
    emb = RepMorphism.identity(E)

    # preinjective summands: least n with Hom(I_n, R) != 0 gives a split mono
    while True:
        found = False
        for n in range(0, min(R.dims[0] - 1, R.dims[1]) + 1):
            I = preinjective_rep(F, n)
            H = hom_space(I, R)
            if not H:
                continue
            f = H[0]
            r = _split_retraction(f, hom_space(R, I), left=True)
            summands.append(KroneckerSummand(PREINJECTIVE, n, None, I, emb.compose(f)))
            ker = Subobject(R, tuple(M.kernel().colspace() for M in r.mats))
            emb = emb.compose(ker.inclusion())
            R = ker.rep()
            found = True
            break
        if not found:
            break

    # preprojective summands: least n with Hom(R, P_n) != 0 gives a split epi
    while True:
        found = False
        for n in range(0, min(R.dims[0], R.dims[1] - 1) + 1):
            P = preprojective_rep(F, n)
            H = hom_space(R, P)
            if not H:
                continue
            g = H[0]
            s = _split_retraction(g, hom_space(P, R), left=False)
            summands.append(KroneckerSummand(PREPROJECTIVE, n, None, P, emb.compose(s)))
            ker = Subobject(R, tuple(M.kernel().colspace() for M in g.mats))
            emb = emb.compose(ker.inclusion())
            R = ker.rep()
            found = True
            break
        if not found:
            break

    if R.dims[0] != R.dims[1]:
        raise AssertionError("regular part has unequal dimensions")
    if R.dims[0]:
        summands.extend(_regular_blocks(R, emb))

    summands.sort(key=KroneckerSummand.sort_key)
    iso = _assemble(E, summands)
    return KroneckerDecomposition(E, summands, iso)


def _regular_blocks(R: Representation, emb: RepMorphism) -> list[KroneckerSummand]:
    F = R.field
    a, b = R.maps
    m = R.dims[0]
    for alpha, beta in _regular_points(F):
        M = a.scale(alpha) + b.scale(beta)
        if M.is_invertible():
            break
    else:
        raise ValidationError("pencil is singular at every rational point of P^1 over this field; "
                              "use a larger prime")
    gamma, delta = (0, 1) if F(alpha) != 0 else (1, 0)
    Minv = M.inverse()
    N = Minv @ (a.scale(gamma) + b.scale(delta))
    out = []
    for q, e in factor_over(F, N.charpoly_coeffs()):
        d = len(q) - 1
        Q = N.poly_eval(q)
        kers = [Mat.zeros(F, m, 0)]
        Qj = Mat.identity(F, m)
        for _ in range(e):
            Qj = Qj @ Q
            kers.append(Qj.kernel().colspace())
        S = Mat.zeros(F, m, 0)
        label = _pencil_label(F, q, alpha, beta, gamma, delta)
        for j in range(e, 0, -1):
            Qprev = Q.power(j - 1)
            K = kers[j]
            for c in range(K.ncols):
                u = K.column(c)
                if contains(S, Qprev @ u):
                    continue
                cols = [u]
                for _ in range(d * j - 1):
                    cols.append(N @ cols[-1])
                C = Mat.hstack(F, cols)
                S = span(F, m, [S, C])
                sub = Subobject(R, (C.colspace(), (M @ C).colspace()))
                out.append(KroneckerSummand(REGULAR, j, label, sub.rep(), emb.compose(sub.inclusion())))
        if S.ncols != kers[e].ncols:
            raise AssertionError("primary cyclic decomposition is incomplete")
    return out


def _pencil_label(F: Field, q: tuple, alpha, beta, gamma, delta):
    """Binary form whose roots (x:y) are the pencil points where x*a + y*b degenerates."""
    d = len(q) - 1
    lin_num = _trim(F, [F(-gamma), F(delta)])      # t*delta - gamma
    lin_den = _trim(F, [F(-alpha), F(beta)])       # t*beta - alpha
    total: list = []
    for k, qk in enumerate(q):
        if qk == 0:
            continue
        term = _pmul(F, _ppow(F, lin_num, k), _ppow(F, lin_den, d - k))
        total = _padd(F, total, [F(qk * c) for c in term])
    if len(total) - 1 < d:
        return INFINITY
    return _monic(F, total)


def _assemble(E: Representation, summands: list[KroneckerSummand]) -> RepMorphism:
    from .quiver import direct_sum
    F = E.field
    S, _, _ = direct_sum([s.rep for s in summands], E.quiver, F)
    mats = []
    for v in range(2):
        blocks = [s.embedding.mats[v] for s in summands]
        mats.append(Mat.hstack(F, blocks, E.dims[v]) if blocks else Mat.zeros(F, E.dims[v], 0))
    iso = RepMorphism(S, E, tuple(mats))
    if not iso.is_iso():
        raise AssertionError("reassembled decomposition is not an isomorphism")
    return iso


def is_stable_summand_in_chamber(s: KroneckerSummand, equal_phases: bool) -> bool:
    """Stability of an indecomposable when phase(z1) >= phase(z2)."""
    if equal_phases:
        return s.rep.total_dim == 1
    if s.kind == REGULAR:
        return s.index == 1
    return True
