"""One-parameter families of quiver representations over Q[t].

A family assigns to each vertex a finitely presented Q[t]-module R^g / im P
(P injective) and to each arrow a matrix A with A P_s in im P_t.  Fibers are
derived restrictions to points of the affine line; the special point is t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .arith import ONE, T, ZERO, LaurentRat, PolyRat, rat
from .errors import NotSemistableError, PreconditionError, ValidationError
from .linalg import QQ, Mat
from .polymat import MatrixPoly, column_basis, kernel_poly, smith_normal_form, solve_poly
from .quiver import (Quiver, Representation, RepMorphism, Subobject, hom_space, image_subobject,
                     kernel_subobject, kronecker_quiver, morphism_coordinates, point_quiver)
from .stability import (CentralCharge, hn_filtration, is_polystable, is_semistable, jh_factors,
                        polystable_socle, s_equivalent)


# --- polynomial matrix helpers tolerant of empty shapes ---

def _solve(A: MatrixPoly, B: MatrixPoly) -> MatrixPoly | None:
    if B.ncols == 0 or A.nrows == 0:
        return MatrixPoly.zeros(A.ncols, B.ncols)
    if A.ncols == 0:
        return MatrixPoly.zeros(0, B.ncols) if B.is_zero() else None
    return solve_poly(A, B)


def _in_span(P: MatrixPoly, B: MatrixPoly) -> bool:
    return _solve(P, B) is not None


def _kernel(A: MatrixPoly) -> MatrixPoly:
    if A.ncols == 0:
        return MatrixPoly.zeros(0, 0)
    if A.nrows == 0 or A.is_zero():
        return MatrixPoly.identity(A.ncols)
    return kernel_poly(A)


def _colbasis(A: MatrixPoly) -> MatrixPoly:
    if A.ncols == 0 or A.nrows == 0 or A.is_zero():
        return MatrixPoly.zeros(A.nrows, 0)
    return column_basis(A)


def _hstack(mats: Sequence[MatrixPoly], nrows: int) -> MatrixPoly:
    return MatrixPoly.hstack([M for M in mats if M.ncols], nrows) if any(M.ncols for M in mats) \
        else MatrixPoly.zeros(nrows, 0)


def _top(M: MatrixPoly, k: int) -> MatrixPoly:
    return M.submatrix(range(k), range(M.ncols))


def _strip_t(d: PolyRat) -> tuple[int, PolyRat]:
    v = d.valuation()
    return v, PolyRat(d.coeffs[v:])


def _linear_factor_power(d: PolyRat, s: Fraction) -> tuple[int, PolyRat]:
    """Split d = (t - s)^k * rest with rest(s) != 0."""
    lin = PolyRat([-s, 1])
    k = 0
    while not d.is_zero() and d(s) == 0:
        d = d.exact_div(lin)
        k += 1
    return k, d


def _kron_identity(A: MatrixPoly, n: int) -> MatrixPoly:
    rows = []
    for r in A.rows:
        for i in range(n):
            rows.append([a if j == i else ZERO for a in r for j in range(n)])
    return MatrixPoly(rows, A.ncols * n)


def _in_span_local(P: MatrixPoly, B: MatrixPoly) -> bool:
    """Whether the columns of B lie in the Q[t, 1/t]-span of the columns of P."""
    if B.ncols == 0 or B.nrows == 0:
        return True
    if P.ncols == 0 or P.is_zero():
        return B.is_zero()
    snf = smith_normal_form(P)
    UB = snf.U @ B
    for i in range(B.nrows):
        for e in UB.rows[i]:
            if e.is_zero():
                continue
            if i >= snf.rank:
                return False
            _, unit_free = _strip_t(snf.D.rows[i][i])
            if not unit_free.divides(e):
                return False
    return True


def _support(factors: Sequence[PolyRat]) -> dict:
    points, other = set(), set()
    for d in factors:
        if d.is_unit():
            continue
        for f, _ in d.factor():
            if f.degree() == 1:
                points.add(-f.coeffs[0] / f.coeffs[1])
            else:
                other.add(tuple(f.monic().coeffs))
    return {"points": sorted(points), "other_factors": sorted(other)}


def _meets(factors: Sequence[PolyRat], s: Fraction) -> bool:
    return any(not d.is_unit() and d(s) == 0 for d in factors)


# --- families ---

@dataclass
class VertexNormalForm:
    """R^g/im P rewritten as (+) R/(d_i) (+) R^f via Smith form coordinates."""

    to_new: MatrixPoly          # g' x g
    from_new: MatrixPoly        # g x g'
    torsion: list[PolyRat]      # invariant factors of the first coordinates
    free: int


def _vertex_normal(P: MatrixPoly, g: int) -> VertexNormalForm:
    if P.ncols == 0 or P.is_zero():
        I = MatrixPoly.identity(g)
        return VertexNormalForm(I, I, [], g)
    snf = smith_normal_form(P)
    tors = [i for i in range(snf.rank) if not snf.D.rows[i][i].is_unit()]
    keep = tors + list(range(snf.rank, g))
    return VertexNormalForm(snf.U.submatrix(keep, range(g)), snf.U_inv.submatrix(range(g), keep),
                            [snf.D.rows[i][i] for i in tors], g - snf.rank)


class Family:
    """Quiver representation over Q[t] given vertexwise by free presentations."""

    def __init__(self, quiver: Quiver, gens: Sequence[int], rels: Sequence[MatrixPoly],
                 arrows: Sequence[MatrixPoly], check: bool = True):
        self.quiver = quiver
        self.gens = tuple(int(g) for g in gens)
        if len(self.gens) != quiver.n or len(rels) != quiver.n:
            raise ValidationError("one module per vertex is required")
        if len(arrows) != len(quiver.arrows):
            raise ValidationError("one matrix per arrow is required")
        for v, P in enumerate(rels):
            if P.nrows != self.gens[v] and not (P.ncols == 0):
                raise ValidationError(f"vertex {quiver.vertices[v]}: relation matrix has "
                                      f"{P.nrows} rows but {self.gens[v]} generators")
        self.rels = tuple(_colbasis(P if P.nrows == self.gens[v] else MatrixPoly.zeros(self.gens[v], 0))
                          for v, P in enumerate(rels))
        for ai, ((s, t), A) in enumerate(zip(quiver.arrows, arrows)):
            if A.shape != (self.gens[t], self.gens[s]):
                raise ValidationError(f"arrow {ai}: matrix shape {A.shape} but expected "
                                      f"{(self.gens[t], self.gens[s])}")
        self.arrows = tuple(arrows)
        lifts = []
        for ai, (s, t) in enumerate(quiver.arrows):
            X = _solve(self.rels[t], self.arrows[ai] @ self.rels[s])
            if X is None:
                raise ValidationError(f"arrow {ai} does not preserve the relations")
            lifts.append(X)
        self.lifts = tuple(lifts)
        self._normal: list[VertexNormalForm] | None = None

    # construction helpers

    @classmethod
    def free(cls, quiver: Quiver, ranks: Sequence[int], arrows: Sequence) -> "Family":
        mats = [MatrixPoly.parse(A) if A else MatrixPoly.zeros(ranks[t], ranks[s])
                for A, (s, t) in zip(arrows, quiver.arrows)]
        return cls(quiver, ranks, [MatrixPoly.zeros(g, 0) for g in ranks], mats)

    @classmethod
    def constant(cls, E: Representation) -> "Family":
        """The trivial family with every fiber equal to E."""
        if E.field != QQ:
            raise ValidationError("constant families need a representation over Q")
        return cls(E.quiver, E.dims, [MatrixPoly.zeros(d, 0) for d in E.dims],
                   [MatrixPoly.from_mat(M) for M in E.maps])

    @property
    def relation_counts(self) -> tuple[int, ...]:
        return tuple(P.ncols for P in self.rels)

    def normal_forms(self) -> list[VertexNormalForm]:
        if self._normal is None:
            self._normal = [_vertex_normal(P, g) for P, g in zip(self.rels, self.gens)]
        return self._normal

    def is_free(self) -> bool:
        return all(P.ncols == 0 for P in self.rels)

    def torsion_factors(self) -> list[PolyRat]:
        return [d for nf in self.normal_forms() for d in nf.torsion]

    def is_t_flat(self, s=None) -> bool:
        """t-flat at s (or everywhere when s is None): no torsion supported there."""
        if s is None:
            return not self.torsion_factors()
        return not _meets(self.torsion_factors(), rat(s))

    def generic_dims(self) -> tuple[int, ...]:
        return tuple(nf.free for nf in self.normal_forms())

    def to_json(self) -> dict:
        q = self.quiver
        return {"kind": "family", "quiver": q.to_json(),
                "modules": {q.vertices[v]: {"gens": self.gens[v], "rels": self.rels[v].to_json()}
                            for v in range(q.n)},
                "arrows": {str(ai): A.to_json() for ai, A in enumerate(self.arrows)}}

    def __repr__(self) -> str:
        return f"Family(gens={self.gens}, rels={self.relation_counts})"


@dataclass
class NormalizedFamily:
    family: Family
    to_new: "FamilyMorphism"
    from_new: "FamilyMorphism"


def normalize(E: Family) -> NormalizedFamily:
    """Isomorphic family in Smith coordinates: torsion generators first, then free ones."""
    nfs = E.normal_forms()
    q = E.quiver
    gens = [len(nf.torsion) + nf.free for nf in nfs]
    rels = []
    for nf, g in zip(nfs, gens):
        cols = [[nf.torsion[c] if r == c else ZERO for c in range(len(nf.torsion))] for r in range(g)]
        rels.append(MatrixPoly(cols, len(nf.torsion)))
    arrows = [nfs[t].to_new @ E.arrows[ai] @ nfs[s].from_new for ai, (s, t) in enumerate(q.arrows)]
    N = Family(q, gens, rels, arrows)
    return NormalizedFamily(N, FamilyMorphism(E, N, [nf.to_new for nf in nfs]),
                            FamilyMorphism(N, E, [nf.from_new for nf in nfs]))


class FamilyMorphism:
    """Morphism of families given by matrices on generators."""

    def __init__(self, source: Family, target: Family, mats: Sequence[MatrixPoly], check: bool = True):
        self.source, self.target = source, target
        self.mats = tuple(mats)
        if check:
            self.validate()

    def validate(self):
        S, Tg = self.source, self.target
        for v, M in enumerate(self.mats):
            if M.shape != (Tg.gens[v], S.gens[v]):
                raise ValidationError(f"vertex {S.quiver.vertices[v]}: morphism matrix has shape {M.shape}")
            if not _in_span(Tg.rels[v], M @ S.rels[v]):
                raise ValidationError(f"vertex {S.quiver.vertices[v]}: morphism does not respect relations")
        for ai, (s, t) in enumerate(S.quiver.arrows):
            diff = Tg.arrows[ai] @ self.mats[s] - self.mats[t] @ S.arrows[ai]
            if not _in_span(Tg.rels[t], diff):
                raise ValidationError(f"arrow {ai}: morphism does not commute with the arrow")

    def compose(self, other: "FamilyMorphism") -> "FamilyMorphism":
        """self after other."""
        return FamilyMorphism(other.source, self.target,
                              [a @ b for a, b in zip(self.mats, other.mats)], check=False)

    def equals_mod_relations(self, mats: Sequence[MatrixPoly]) -> bool:
        return all(_in_span(self.target.rels[v], M - N) for v, (M, N) in enumerate(zip(self.mats, mats)))

    def is_surjective(self) -> bool:
        for v, M in enumerate(self.mats):
            g = self.target.gens[v]
            if g == 0:
                continue
            A = _hstack([M, self.target.rels[v]], g)
            if A.ncols == 0:
                return False
            snf = smith_normal_form(A)
            if snf.rank < g or not all(d.is_unit() for d in snf.invariant_factors):
                return False
        return True

    def kernel_generators(self, v: int) -> MatrixPoly:
        g1 = self.source.gens[v]
        K = _kernel(_hstack([self.mats[v], self.target.rels[v]], self.target.gens[v]))
        return _top(K, g1) if K.ncols else MatrixPoly.zeros(g1, 0)

    def is_injective(self) -> bool:
        return all(_in_span(self.source.rels[v], self.kernel_generators(v)) for v in range(self.source.quiver.n))

    def is_iso(self) -> bool:
        return self.is_surjective() and self.is_injective()

    def fiber_at(self, s, src: "FiberObject | None" = None, tgt: "FiberObject | None" = None) -> RepMorphism:
        """Induced map on H0 of the fibers."""
        src = src or fiber_at(self.source, s)
        tgt = tgt or fiber_at(self.target, s)
        mats = [tgt.projections[v] @ M.evaluate(s) @ src.sections[v] for v, M in enumerate(self.mats)]
        return RepMorphism(src.H0, tgt.H0, tuple(mats))

    def to_json(self) -> dict:
        return {self.source.quiver.vertices[v]: M.to_json() for v, M in enumerate(self.mats)}


def identity_morphism(E: Family) -> FamilyMorphism:
    return FamilyMorphism(E, E, [MatrixPoly.identity(g) for g in E.gens], check=False)


def subfamily(E: Family, S: Sequence[MatrixPoly]) -> tuple[Family, FamilyMorphism]:
    """Subfamily generated by the columns of S_v, with its inclusion."""
    q = E.quiver
    ks = [M.ncols for M in S]
    rels = []
    for v in range(q.n):
        K = _kernel(_hstack([S[v], E.rels[v]], E.gens[v]))
        rels.append(_top(K, ks[v]) if K.ncols else MatrixPoly.zeros(ks[v], 0))
    arrows = []
    for ai, (s, t) in enumerate(q.arrows):
        X = _solve(_hstack([S[t], E.rels[t]], E.gens[t]), E.arrows[ai] @ S[s])
        if X is None:
            raise ValidationError(f"generators are not closed under arrow {ai}")
        arrows.append(_top(X, ks[t]))
    sub = Family(q, ks, rels, arrows)
    return sub, FamilyMorphism(sub, E, list(S))


def quotient_family(E: Family, S: Sequence[MatrixPoly]) -> tuple[Family, FamilyMorphism]:
    q = E.quiver
    Q = Family(q, E.gens, [_hstack([E.rels[v], S[v]], E.gens[v]) for v in range(q.n)], E.arrows)
    return Q, FamilyMorphism(E, Q, [MatrixPoly.identity(g) for g in E.gens])


def base_change_sqrt(E: Family) -> Family:
    """Pull back along t = w^2; the new family is written in the variable w."""
    return Family(E.quiver, E.gens, [P.substitute_power(2) for P in E.rels],
                  [A.substitute_power(2) for A in E.arrows])


def tensor_free(E: Family, n: int) -> Family:
    """E tensored with the free module of rank n."""
    return Family(E.quiver, [g * n for g in E.gens], [_kron_identity(P, n) for P in E.rels],
                  [_kron_identity(A, n) for A in E.arrows])


# --- fibers ---

@dataclass
class FiberObject:
    point: Fraction
    H0: Representation
    Hminus1: Representation
    projections: list[Mat] = dc_field(repr=False)   # Q^g -> H0_v
    sections: list[Mat] = dc_field(repr=False)
    kernels: list[Mat] = dc_field(repr=False)       # basis of ker P_v(s) in Q^m

    @property
    def t_flat(self) -> bool:
        return self.Hminus1.is_zero()

    def to_json(self) -> dict:
        return {"point": str(self.point), "H0": self.H0.to_json(), "Hminus1": self.Hminus1.to_json(),
                "t_flat": self.t_flat}


def fiber_at(E: Family, s) -> FiberObject:
    """Derived restriction to the point s: H0 = coker P(s), H^-1 = ker P(s)."""
    s = rat(s)
    q = E.quiver
    projs, secs, kers = [], [], []
    for g, P in zip(E.gens, E.rels):
        Ps = P.evaluate(s) if g else Mat.zeros(QQ, 0, P.ncols)
        if P.ncols == 0:
            pi, K = Mat.identity(QQ, g), Mat.zeros(QQ, 0, 0)
        else:
            pi, K = Ps.cokernel_projection(), Ps.kernel()
        projs.append(pi)
        secs.append(pi.right_inverse() if pi.nrows else Mat.zeros(QQ, g, 0))
        kers.append(K)
    h0 = tuple(projs[t] @ E.arrows[ai].evaluate(s) @ secs[s_] for ai, (s_, t) in enumerate(q.arrows))
    H0 = Representation(q, QQ, tuple(p.nrows for p in projs), h0)
    h1 = []
    for ai, (s_, t) in enumerate(q.arrows):
        Ks, Kt = kers[s_], kers[t]
        if Ks.ncols == 0 or Kt.ncols == 0:
            h1.append(Mat.zeros(QQ, Kt.ncols, Ks.ncols))
            continue
        X = Kt.solve(E.lifts[ai].evaluate(s) @ Ks)
        if X is None:
            raise ValidationError("relation lift does not preserve the kernel")
        h1.append(X)
    Hm1 = Representation(q, QQ, tuple(K.ncols for K in kers), tuple(h1))
    return FiberObject(s, H0, Hm1, projs, secs, kers)


# --- torsion ---

@dataclass
class TorsionReport:
    torsion: Family
    quotient: Family
    support: dict
    inclusion: FamilyMorphism

    def to_json(self) -> dict:
        return {"torsion": self.torsion.to_json(), "quotient": self.quotient.to_json(),
                "support": {"points": [str(p) for p in self.support["points"]],
                            "other_factors": [[str(c) for c in f] for f in self.support["other_factors"]]},
                "torsion_generic_free": all(nf.free == 0 for nf in self.torsion.normal_forms())}


def torsion_subobject(E: Family, at=None) -> TorsionReport:
    """Maximal torsion subfamily (supported at `at` only, when given) and the quotient."""
    N = normalize(E)
    F = N.family
    S, factors = [], []
    for v, g in enumerate(F.gens):
        tors = F.rels[v].ncols
        cols = []
        for i in range(tors):
            d = F.rels[v].rows[i][i]
            if at is None:
                cols.append((i, ONE))
                factors.append(d)
            else:
                k, rest = _linear_factor_power(d, rat(at))
                if k:
                    cols.append((i, rest))
                    factors.append(PolyRat([-rat(at), 1]) ** k)
        S.append(MatrixPoly([[c if r == i else ZERO for i, c in cols] for r in range(g)], len(cols)))
    Tf, incl = subfamily(F, S)
    Qf, _ = quotient_family(F, S)
    inc = N.from_new.compose(incl)
    return TorsionReport(normalize(Tf).family, normalize(Qf).family, _support(factors), inc)


# --- families over the punctured line ---

def _laurent_matrix(value, nrows: int, ncols: int) -> tuple[MatrixPoly, int]:
    """Parse a matrix with Laurent entries as (numerator, k) meaning t^-k * numerator."""
    if isinstance(value, tuple):
        return value
    if isinstance(value, MatrixPoly):
        return value, 0
    rows = [[LaurentRat.parse(e) for e in r] for r in value] if value else []
    if not rows:
        return MatrixPoly.zeros(nrows, ncols), 0
    k = max((e.denominator_power() for r in rows for e in r), default=0)
    return MatrixPoly([[e.times_t_power(k) for e in r] for r in rows], len(rows[0])), k


def _t_power(k: int) -> PolyRat:
    return PolyRat.monomial(k)


class PuncturedFamily:
    """Family over Q[t, 1/t]: relations and arrows may have negative powers of t."""

    def __init__(self, quiver: Quiver, gens: Sequence[int], rels: Sequence, arrows: Sequence):
        self.quiver = quiver
        self.gens = tuple(int(g) for g in gens)
        self.rels = []
        for v, P in enumerate(rels):
            num, _ = _laurent_matrix(P, self.gens[v], 0)
            if num.ncols and num.nrows != self.gens[v]:
                raise ValidationError(f"vertex {quiver.vertices[v]}: relation rows do not match generators")
            # a column's span over Q[t,1/t] is unchanged by clearing its denominator
            self.rels.append(num if num.nrows == self.gens[v] else MatrixPoly.zeros(self.gens[v], 0))
        self.arrows = []
        for ai, ((s, t), A) in enumerate(zip(quiver.arrows, arrows)):
            num, k = _laurent_matrix(A, self.gens[t], self.gens[s])
            if num.shape != (self.gens[t], self.gens[s]):
                raise ValidationError(f"arrow {ai}: matrix shape {num.shape}")
            if not _in_span_local(self.rels[t], num @ self.rels[s]):
                raise ValidationError(f"arrow {ai} does not preserve the relations over the punctured line")
            self.arrows.append((num, k))

    @classmethod
    def from_family(cls, E: Family) -> "PuncturedFamily":
        return cls(E.quiver, E.gens, list(E.rels), list(E.arrows))

    def to_json(self) -> dict:
        q = self.quiver
        lj = lambda num, k: [[LaurentRat(a, -k).to_json() for a in r] for r in num.rows]
        return {"kind": "punctured-family", "quiver": q.to_json(),
                "modules": {q.vertices[v]: {"gens": self.gens[v], "rels": self.rels[v].to_json()}
                            for v in range(q.n)},
                "arrows": {str(ai): lj(*A) for ai, A in enumerate(self.arrows)}}


@dataclass
class ExtensionReport:
    family: Family
    restriction: list[tuple[MatrixPoly, int]]   # generators of the family inside E_U, as t^-k * numerator
    surjective: bool
    injective: bool
    torsion_at_zero: bool

    def to_json(self) -> dict:
        return {"family": self.family.to_json(),
                "restriction": [{"numerator": M.to_json(), "t_power": -k} for M, k in self.restriction],
                "witness": {"surjective": self.surjective, "injective": self.injective},
                "torsion_at_zero": self.torsion_at_zero, "t_flat": self.family.is_t_flat()}


def extend_family(EU: PuncturedFamily, lattice: Sequence | None = None) -> ExtensionReport:
    """Extend across t = 0: the R-span of the chosen generators modulo its torsion at 0."""
    q = EU.quiver
    full: list[tuple[MatrixPoly, int] | None] = [None] * q.n
    for v in q.order:
        g = EU.gens[v]
        if lattice is not None and lattice[v] is not None:
            G = _laurent_matrix(lattice[v], g, 0)
        else:
            G = (MatrixPoly.identity(g), 0)
        parts = [G]
        for ai, (s, t) in enumerate(q.arrows):
            if t == v:
                A, ka = EU.arrows[ai]
                Gs, ks = full[s]
                parts.append((A @ Gs, ka + ks))
        k = max(p[1] for p in parts)
        full[v] = (_hstack([M.scale(_t_power(k - kp)) for M, kp in parts], g), k)
    hs = [full[v][0].ncols for v in range(q.n)]
    rels, ok_surj, ok_inj = [], True, True
    for v in range(q.n):
        Gp, P, g, h = full[v][0], EU.rels[v], EU.gens[v], hs[v]
        K = _kernel(_hstack([Gp, P], g))
        K1 = _colbasis(_top(K, h)) if K.ncols else MatrixPoly.zeros(h, 0)
        sat, emax = [K1], 0
        if K1.ncols:
            snf = smith_normal_form(K1)
            for i in range(snf.rank):
                e, rest = _strip_t(snf.D.rows[i][i])
                if e:
                    emax = max(emax, e)
                    sat.append(snf.U_inv.submatrix(range(h), [i]).scale(rest))
        L = _colbasis(_hstack(sat, h))
        rels.append(L)
        if g:
            A = _hstack([Gp, P], g)
            snf = smith_normal_form(A) if A.ncols else None
            ok_surj &= snf is not None and snf.rank == g and all(_strip_t(d)[1].is_unit()
                                                                  for d in snf.invariant_factors)
        ok_inj &= _in_span(K1, L.scale(_t_power(emax))) if K1.ncols else L.ncols == 0
    sel = []
    for ai, (s, t) in enumerate(q.arrows):
        off = EU.gens[t]
        for bj, (s2, t2) in enumerate(q.arrows[:ai]):
            if t2 == t:
                off += hs[s2]
        sel.append(MatrixPoly([[ONE if r == off + c else ZERO for c in range(hs[s])] for r in range(hs[t])],
                              hs[s]))
    raw = Family(q, hs, rels, sel)
    N = normalize(raw)
    restriction = [(full[v][0] @ N.from_new.mats[v], full[v][1]) for v in range(q.n)]
    return ExtensionReport(N.family, restriction, ok_surj, ok_inj,
                           not N.family.is_t_flat(0))


def extend_morphism(phi_U: Sequence, F1: Family, F2: Family) -> tuple[int, FamilyMorphism]:
    """Least k such that t^k * phi_U extends to a morphism F1 -> F2."""
    q = F1.quiver
    parsed = [_laurent_matrix(M, F2.gens[v], F1.gens[v]) for v, M in enumerate(phi_U)]
    for v, (num, _) in enumerate(parsed):
        if num.shape != (F2.gens[v], F1.gens[v]):
            raise ValidationError(f"vertex {q.vertices[v]}: morphism matrix has shape {num.shape}")
        if not _in_span_local(F2.rels[v], num @ F1.rels[v]):
            raise ValidationError("phi_U does not respect relations over the punctured line")
    k0 = max((k for _, k in parsed), default=0)
    for ai, (s, t) in enumerate(q.arrows):
        ns, ks = parsed[s]
        nt, kt = parsed[t]
        lhs = (F2.arrows[ai] @ ns).scale(_t_power(k0 - ks))
        rhs = (nt @ F1.arrows[ai]).scale(_t_power(k0 - kt))
        if not _in_span_local(F2.rels[t], lhs - rhs):
            raise ValidationError(f"phi_U does not commute with arrow {ai} over the punctured line")
    slack = sum(_strip_t(d)[0] for d in F2.torsion_factors()) + 1
    for k in range(k0, k0 + slack + 1):
        mats = [num.scale(_t_power(k - kv)) for num, kv in parsed]
        try:
            return k, FamilyMorphism(F1, F2, mats)
        except ValidationError:
            continue
    raise PreconditionError("no power of t extends the morphism")


# --- elementary modifications ---

@dataclass
class ModificationStep:
    F: Family
    Q: Representation
    G: Family
    kernel: Subobject                 # E = ker(L i*F -> Q) inside the special fiber of F
    inclusion: FamilyMorphism         # G -> F
    times_t: FamilyMorphism           # F -> G
    checks: dict
    s_equivalent: bool | None = None

    @property
    def fiber_G(self) -> FiberObject:
        return fiber_at(self.G, 0)

    def to_json(self) -> dict:
        return {"F": self.F.to_json(), "Q": self.Q.to_json(), "G": self.G.to_json(),
                "inclusion": self.inclusion.to_json(), "times_t": self.times_t.to_json(),
                "special_fiber_G": fiber_at(self.G, 0).H0.to_json(),
                "checks": self.checks, "s_equivalent": self.s_equivalent}


def _as_kernel(H0: Representation, Q) -> Subobject:
    if isinstance(Q, RepMorphism):
        if Q.source.key() != H0.key():
            raise ValidationError("quotient map does not start at the special fiber")
        if not Q.is_epi():
            raise ValidationError("Q is not a quotient: the map is not surjective")
        return kernel_subobject(Q)
    if isinstance(Q, Subobject):
        if Q.ambient.key() != H0.key():
            raise ValidationError("subobject does not live in the special fiber")
        if not Q.is_closed():
            raise ValidationError("Q is not a quotient: kernel is not a subrepresentation")
        return Q
    raise ValidationError("Q must be a quotient map or its kernel subobject")


def elementary_modification(F: Family, Q, Z: CentralCharge | None = None) -> ModificationStep:
    """G = Ker(F -> i_* Q) for a quotient Q of the special fiber of F."""
    fib = fiber_at(F, 0)
    if not fib.t_flat:
        raise PreconditionError("family is not t-flat at 0")
    K = _as_kernel(fib.H0, Q)
    q = F.quiver
    S = []
    for v, g in enumerate(F.gens):
        Kv = K.bases[v]
        c = Kv.cokernel_projection() if Kv.ncols else Mat.identity(QQ, fib.H0.dims[v])
        phi = c @ fib.projections[v]
        C = phi.kernel() if phi.nrows else Mat.identity(QQ, g)
        S.append(_hstack([MatrixPoly.scalar(g, T), MatrixPoly.from_mat(C)], g))
    G0, incl0 = subfamily(F, S)
    N = normalize(G0)
    G = N.family
    incl = incl0.compose(N.from_new)
    lift = [MatrixPoly.vstack([MatrixPoly.identity(g), MatrixPoly.zeros(S[v].ncols - g, g)], g)
            for v, g in enumerate(F.gens)]
    times_t = FamilyMorphism(F, G, [N.to_new.mats[v] @ lift[v] for v in range(q.n)])
    Qrep, _ = K.quotient()

    fibG = fiber_at(G, 0)
    a = times_t.fiber_at(0, fib, fibG)
    b = incl.fiber_at(0, fibG, fib)
    tF = [MatrixPoly.scalar(g, T) for g in F.gens]
    tG = [MatrixPoly.scalar(g, T) for g in G.gens]
    checks = {
        "roundtrip_F": incl.compose(times_t).equals_mod_relations(tF),
        "roundtrip_G": times_t.compose(incl).equals_mod_relations(tG),
        "G_t_flat": fibG.t_flat,
        "image_is_E": image_subobject(b) == K,
        "exact_middle": kernel_subobject(b) == image_subobject(a),
        "Q_injects": list(image_subobject(a).dims) == list(Qrep.dims),
    }
    seq = None
    if Z is not None:
        try:
            seq = s_equivalent(Z, fib.H0, fibG.H0)
        except PreconditionError:
            seq = None
    return ModificationStep(F, Qrep, G, K, incl, times_t, checks, seq)


def reverse_modification(step: ModificationStep) -> tuple[ModificationStep, FamilyMorphism]:
    """Modify G at E and return the isomorphism from the result back to F."""
    fibG = fiber_at(step.G, 0)
    b = step.inclusion.fiber_at(0, fibG, fiber_at(step.F, 0))
    back = elementary_modification(step.G, kernel_subobject(b))
    into_F = step.inclusion.compose(back.inclusion)
    F = step.F
    mats = []
    for v, g in enumerate(F.gens):
        X = _solve(_hstack([MatrixPoly.scalar(g, T), F.rels[v]], g), into_F.mats[v])
        if X is None:
            raise PreconditionError("double modification does not land in t*F")
        mats.append(_top(X, g))
    return back, FamilyMorphism(back.G, F, mats)


def subfamily_image_equal(E: Family, S1: Sequence[MatrixPoly], S2: Sequence[MatrixPoly]) -> bool:
    return all(_in_span(_hstack([S1[v], E.rels[v]], E.gens[v]), S2[v]) and
               _in_span(_hstack([S2[v], E.rels[v]], E.gens[v]), S1[v]) for v in range(E.quiver.n))


@dataclass
class ChainReport:
    families: list[Family]
    steps: list[ModificationStep]
    composite_matches: bool
    s_equivalent: bool | None

    def to_json(self) -> dict:
        return {"length": len(self.steps),
                "steps": [{"Q": st.Q.to_json(), "checks": st.checks,
                           "special_fiber": fiber_at(st.F, 0).H0.to_json()} for st in self.steps],
                "special_fibers": [fiber_at(F, 0).H0.to_json() for F in self.families],
                "composite_matches": self.composite_matches, "s_equivalent": self.s_equivalent}


def modification_chain(phi: FamilyMorphism, Z: CentralCharge | None = None) -> ChainReport:
    """Factor an injection F_A -> F_Omega with cokernel at 0 into elementary modifications."""
    FA, FO = phi.source, phi.target
    if not phi.is_injective():
        raise PreconditionError("phi is not injective")
    C, _ = quotient_family(FO, list(phi.mats))
    nfs = C.normal_forms()
    exps = []
    for nf in nfs:
        if nf.free:
            raise PreconditionError("cokernel is not torsion")
        row = []
        for d in nf.torsion:
            e, rest = _strip_t(d)
            if not rest.is_unit():
                raise PreconditionError("cokernel is not supported at 0")
            row.append(e)
        exps.append(row)
    n = max((e for row in exps for e in row), default=0)
    q = FO.quiver
    gens_i = []
    for i in range(n + 1):
        S = []
        for v in range(q.n):
            extra = [nfs[v].from_new.submatrix(range(FO.gens[v]), [j]).scale(_t_power(max(e - i, 0)))
                     for j, e in enumerate(exps[v])]
            S.append(_hstack([phi.mats[v]] + extra, FO.gens[v]))
        gens_i.append(S)
    fams = [subfamily(FO, S) for S in gens_i]
    steps = []
    for i in range(n):
        big, big_incl = fams[i + 1]
        small_S = gens_i[i]
        mats = []
        for v in range(q.n):
            X = _solve(_hstack([gens_i[i + 1][v], FO.rels[v]], FO.gens[v]), small_S[v])
            mats.append(_top(X, big.gens[v]))
        into = FamilyMorphism(fams[i][0], big, mats)
        fb = fiber_at(big, 0)
        K = image_subobject(into.fiber_at(0, fiber_at(fams[i][0], 0), fb))
        step = elementary_modification(big, K, Z)
        got = big_incl.compose(step.inclusion)
        step.checks["matches_kernel_filtration"] = subfamily_image_equal(FO, list(got.mats), small_S)
        steps.append(step)
    composite = gens_i[0]
    matches = subfamily_image_equal(FO, composite, list(phi.mats))
    seq = None
    if Z is not None:
        fibs = [fiber_at(F, 0).H0 for F, _ in fams]
        try:
            seq = all(s_equivalent(Z, fibs[-1], X) for X in fibs[:-1])
        except PreconditionError:
            seq = None
    return ChainReport([F for F, _ in fams], steps, matches, seq)


# --- polystable replacement ---

@dataclass
class PolystableReport:
    degree: int
    family: Family
    special_fiber: Representation
    polystable: bool
    rounds: list[dict]

    def to_json(self) -> dict:
        return {"degree": self.degree, "family": self.family.to_json(),
                "special_fiber": self.special_fiber.to_json(), "polystable": self.polystable,
                "rounds": self.rounds}


def _phase_one(Z: CentralCharge, dims) -> bool:
    z = Z(dims)
    return z.im == 0 and z.re < 0


def split_section(b: RepMorphism, K: Subobject) -> RepMorphism | None:
    """A section s of b onto its image K (b s = inclusion of K), if one exists."""
    Krep = K.rep()
    basis = hom_space(Krep, b.source)
    incl = K.inclusion()
    if not basis:
        return RepMorphism(Krep, b.source, tuple(Mat.zeros(QQ, d, e) for d, e in
                                                  zip(b.source.dims, Krep.dims))) if incl.is_zero() else None
    try:
        X = morphism_coordinates([b.compose(h) for h in basis], [incl])
    except ValueError:
        return None
    out = None
    for c, h in zip(X.flat(), basis):
        term = h.scale(c)
        out = term if out is None else out + term
    return out


def _sample_generic(F: Family, Z: CentralCharge, points=(1, 2, -1, 3)) -> tuple[int, ...]:
    dims = None
    bad = F.torsion_factors()
    used = 0
    for s in list(points) + list(range(4, 40)):
        if used == 3:
            break
        if _meets(bad, rat(s)):
            continue
        fib = fiber_at(F, s).H0
        if fib.is_zero():
            raise NotSemistableError("generic fiber is zero")
        if not _phase_one(Z, fib.dims) or not is_semistable(Z, fib):
            raise NotSemistableError(f"fiber at t={s} is not semistable of phase 1")
        if dims is not None and dims != fib.dims:
            raise NotSemistableError("fibers over the punctured line have different classes")
        dims = fib.dims
        used += 1
    return dims


def polystable_replacement(EU: PuncturedFamily | Family, Z: CentralCharge, lattice=None,
                           max_langton: int = 16) -> PolystableReport:
    """Extend, then alternate base change w^2 = t with modification at the socle quotient."""
    if isinstance(EU, Family):
        EU = PuncturedFamily.from_family(EU)
    F = extend_family(EU, lattice).family
    generic = _sample_generic(F, Z)
    bound = len(jh_factors(Z, fiber_at(F, 1 if not _meets(F.torsion_factors(), Fraction(1)) else 7).H0).factors)
    rounds: list[dict] = []
    for _ in range(max_langton):
        fib = fiber_at(F, 0).H0
        if is_semistable(Z, fib):
            break
        hn = hn_filtration(Z, fib)
        step = elementary_modification(F, hn.chain[1])
        rounds.append({"kind": "destabilizing", "Q_dims": list(step.Q.dims), "checks": step.checks})
        F = step.G
    else:
        raise PreconditionError("special fiber did not become semistable")
    degree = 1
    for _ in range(bound + 1):
        fib = fiber_at(F, 0).H0
        if is_polystable(Z, fib):
            return PolystableReport(degree, F, fib, True, rounds)
        soc = polystable_socle(Z, fib)
        F = base_change_sqrt(F)
        degree *= 2
        step = elementary_modification(F, Subobject(fiber_at(F, 0).H0, soc.bases), Z)
        fibG = fiber_at(step.G, 0)
        b = step.inclusion.fiber_at(0, fibG, fiber_at(F, 0))
        sigma = split_section(b, step.kernel)
        rounds.append({"kind": "split", "Q_dims": list(step.Q.dims), "checks": step.checks,
                       "split_witness": sigma.to_json() if sigma is not None else None})
        if sigma is None:
            raise PreconditionError("modified special fiber does not split")
        F = step.G
    raise PreconditionError(f"no polystable fiber after {bound} base changes (generic class {generic})")


# --- complexes of families ---

class FamilyComplex:
    """Bounded complex: terms[k] with differentials d[k]: terms[k] -> terms[k+1]."""

    def __init__(self, quiver: Quiver, terms: dict[int, Family], diffs: dict[int, FamilyMorphism]):
        self.quiver = quiver
        self.terms = dict(sorted(terms.items()))
        self.diffs = diffs
        for k, d in diffs.items():
            if d.source is not self.terms.get(k) or d.target is not self.terms.get(k + 1):
                raise ValidationError(f"differential {k} has the wrong source or target")
        for k in self.terms:
            if k in diffs and k + 1 in diffs:
                comp = diffs[k + 1].compose(diffs[k])
                if not comp.equals_mod_relations([MatrixPoly.zeros(*M.shape) for M in comp.mats]):
                    raise ValidationError(f"d^{k + 1} d^{k} is not zero")

    def term(self, k: int) -> Family | None:
        return self.terms.get(k)

    def _zero_map(self, v: int, rows: int, cols: int) -> MatrixPoly:
        return MatrixPoly.zeros(rows, cols)

    def cohomology_presentation(self, k: int, v: int) -> tuple[int, MatrixPoly]:
        """Generators and relations of H^k at vertex v."""
        E = self.terms.get(k)
        if E is None:
            return 0, MatrixPoly.zeros(0, 0)
        g = E.gens[v]
        d = self.diffs.get(k)
        if d is not None:
            nxt = self.terms[k + 1]
            K = _kernel(_hstack([d.mats[v], nxt.rels[v]], nxt.gens[v]))
            Zc = _top(K, g) if K.ncols else MatrixPoly.zeros(g, 0)
        else:
            Zc = MatrixPoly.identity(g)
        prev = self.diffs.get(k - 1)
        B = _hstack([prev.mats[v] if prev is not None else MatrixPoly.zeros(g, 0), E.rels[v]], g)
        z = Zc.ncols
        R = _kernel(_hstack([Zc, B], g))
        rels = _top(R, z) if R.ncols else MatrixPoly.zeros(z, 0)
        return z, _colbasis(rels)

    def cohomology_invariants(self) -> dict[int, list[tuple[int, list[PolyRat]]]]:
        """For each degree and vertex: (free rank, torsion invariant factors)."""
        out = {}
        for k in self.terms:
            per = []
            for v in range(self.quiver.n):
                z, P = self.cohomology_presentation(k, v)
                nf = _vertex_normal(P, z)
                per.append((nf.free, nf.torsion))
            out[k] = per
        return out


@dataclass
class HeartReport:
    point: Fraction
    in_heart_at_s: bool
    bad_set: dict | None            # None: not in the relative heart on any open set
    in_P1: bool | None
    in_P1_at_s: bool | None
    fiber_cohomology: dict[int, list[int]]
    generic_class: list[int]

    def to_json(self) -> dict:
        bs = None if self.bad_set is None else {
            "points": [str(p) for p in self.bad_set["points"]],
            "other_factors": [[str(c) for c in f] for f in self.bad_set["other_factors"]]}
        return {"point": str(self.point), "in_heart_at_s": self.in_heart_at_s, "bad_set": bs,
                "in_P1": self.in_P1, "in_P1_at_s": self.in_P1_at_s,
                "fiber_cohomology": {str(k): v for k, v in self.fiber_cohomology.items()},
                "generic_class": self.generic_class}


def heart_membership(C: FamilyComplex, s=0, Z: CentralCharge | None = None) -> HeartReport:
    """Relative-heart test: cohomology sheaves off degree 0 vanish near s."""
    s = rat(s)
    inv = C.cohomology_invariants()
    n = C.quiver.n
    off_free = False
    off_factors, h0_factors = [], []
    for k, per in inv.items():
        for free, tors in per:
            if k != 0:
                off_free |= free > 0
                off_factors.extend(tors)
            else:
                h0_factors.extend(tors)
    bad = None if off_free else _support(off_factors)
    in_heart = not off_free and not _meets(off_factors, s)
    generic = [per[v][0] for per in [inv.get(0, [(0, [])] * n)] for v in range(n)]
    # derived fiber: H^j = H^j (x) k_s  +  Tor_1(H^{j+1}, k_s)
    fib = {}
    degrees = sorted(set(inv) | {k - 1 for k in inv})
    for j in degrees:
        dims = []
        for v in range(n):
            f, tors = inv.get(j, [(0, [])] * n)[v]
            _, tors1 = inv.get(j + 1, [(0, [])] * n)[v]
            dims.append(f + sum(1 for d in tors if d(s) == 0) + sum(1 for d in tors1 if d(s) == 0))
        if any(dims):
            fib[j] = dims
    in_p1 = in_p1_s = None
    if Z is not None:
        cls_ok = any(generic) and _phase_one(Z, generic)
        if bad is None:
            in_p1 = False
        else:
            flat_bad = _support(h0_factors)
            in_p1 = cls_ok and set(flat_bad["points"]) <= set(bad["points"]) and \
                set(flat_bad["other_factors"]) <= set(bad["other_factors"])
        in_p1_s = cls_ok and in_heart and not _meets(h0_factors, s)
    return HeartReport(s, in_heart, bad, in_p1, in_p1_s, fib, generic)


def kills_complex(C: FamilyComplex, power: int) -> bool:
    """Whether t^power * id is null-homotopic on a complex of free families."""
    if not all(E.is_free() for E in C.terms.values()):
        raise PreconditionError("homotopy search needs free terms")
    q = C.quiver
    degs = list(C.terms)
    unknowns = {}
    count = 0
    for k in degs:
        if k - 1 in C.terms:
            for v in range(q.n):
                r, c = C.terms[k - 1].gens[v], C.terms[k].gens[v]
                unknowns[(k, v)] = (count, r, c)
                count += r * c
    eqs, rhs = [], []

    def hvar(k, v, i, j):
        base, r, c = unknowns[(k, v)]
        return base + i * c + j

    tp = _t_power(power)
    for k in degs:
        E = C.terms[k]
        for v in range(q.n):
            g = E.gens[v]
            for i in range(g):
                for j in range(g):
                    row = [ZERO] * count
                    # (d^{k-1} h^k)_{ij} + (h^{k+1} d^k)_{ij}
                    if (k, v) in unknowns and k - 1 in C.diffs:
                        D = C.diffs[k - 1].mats[v]
                        for l in range(D.ncols):
                            row[hvar(k, v, l, j)] = row[hvar(k, v, l, j)] + D.rows[i][l]
                    if (k + 1, v) in unknowns and k in C.diffs:
                        D = C.diffs[k].mats[v]
                        for l in range(D.nrows):
                            row[hvar(k + 1, v, i, l)] = row[hvar(k + 1, v, i, l)] + D.rows[l][j]
                    eqs.append(row)
                    rhs.append(tp if i == j else ZERO)
    for ai, (s, t) in enumerate(q.arrows):
        for k in degs:
            if (k, s) not in unknowns:
                continue
            As, At = C.terms[k - 1].arrows[ai], C.terms[k].arrows[ai]
            _, r_t, c_t = unknowns[(k, t)]
            _, r_s, c_s = unknowns[(k, s)]
            # A^{k-1} h_s = h_t A^k
            for i in range(r_t):
                for j in range(c_s):
                    row = [ZERO] * count
                    for l in range(r_s):
                        row[hvar(k, s, l, j)] = row[hvar(k, s, l, j)] + As.rows[i][l]
                    for l in range(c_t):
                        row[hvar(k, t, i, l)] = row[hvar(k, t, i, l)] - At.rows[l][j]
                    eqs.append(row)
                    rhs.append(ZERO)
    if not eqs:
        return True
    if count == 0:
        return all(r.is_zero() for r in rhs)
    M = MatrixPoly(eqs, count)
    b = MatrixPoly([[r] for r in rhs], 1)
    return solve_poly(M, b) is not None


def torsion_exponent_at_zero(factors: Sequence[PolyRat]) -> int | None:
    """Least d with t^d killing a module whose torsion factors are given; None if not supported at 0."""
    e = 0
    for d in factors:
        v, rest = _strip_t(d)
        if not rest.is_unit():
            return None
        e = max(e, v)
    return e


def support_doubling(C: FamilyComplex) -> dict:
    """If t^d kills every cohomology module, check that t^(2d) kills the complex."""
    inv = C.cohomology_invariants()
    d = 0
    for per in inv.values():
        for free, tors in per:
            e = torsion_exponent_at_zero(tors)
            if free or e is None:
                raise PreconditionError("cohomology is not t-power torsion")
            d = max(d, e)
    return {"d": d, "kills_2d": kills_complex(C, 2 * d), "kills_d": kills_complex(C, d)}


# --- JSON ---

def quiver_from_json(data) -> Quiver:
    if isinstance(data, str):
        if data == "kronecker":
            return kronecker_quiver()
        if data == "point":
            return point_quiver()
        raise ValidationError(f"unknown quiver name {data!r}")
    return Quiver.from_json(data)


def _module_data(data: dict, q: Quiver):
    mods = data.get("modules", {})
    gens, rels = [], []
    for v, name in enumerate(q.vertices):
        m = mods.get(name, {"gens": 0})
        g = int(m.get("gens", 0))
        gens.append(g)
        rels.append(m.get("rels", []))
    arrows = []
    amap = data.get("arrows", {})
    for ai, (s, t) in enumerate(q.arrows):
        A = amap.get(str(ai), amap.get(ai)) if isinstance(amap, dict) else amap[ai]
        arrows.append(A if A is not None else [])
    return gens, rels, arrows


def family_from_json(data: dict) -> Family:
    try:
        q = quiver_from_json(data["quiver"])
        gens, rels, arrows = _module_data(data, q)
        R = [MatrixPoly.parse(P) if P else MatrixPoly.zeros(g, 0) for P, g in zip(rels, gens)]
        A = [MatrixPoly.parse(M) if M else MatrixPoly.zeros(gens[t], gens[s])
             for M, (s, t) in zip(arrows, q.arrows)]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed family: {exc}") from exc
    return Family(q, gens, R, A)


def punctured_from_json(data: dict) -> PuncturedFamily:
    try:
        q = quiver_from_json(data["quiver"])
        gens, rels, arrows = _module_data(data, q)
        parsed = [_laurent_matrix(P, g, 0) if P else (MatrixPoly.zeros(g, 0), 0) for P, g in zip(rels, gens)]
        A = [_laurent_matrix(M, gens[t], gens[s]) if M else (MatrixPoly.zeros(gens[t], gens[s]), 0)
             for M, (s, t) in zip(arrows, q.arrows)]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed punctured family: {exc}") from exc
    return PuncturedFamily(q, gens, [p[0] for p in parsed], A)


def lattice_from_json(data, q: Quiver) -> list | None:
    if data is None:
        return None
    return [data.get(name) for name in q.vertices]


def morphism_from_json(data: dict, source: Family, target: Family, laurent: bool = False):
    q = source.quiver
    out = []
    for v, name in enumerate(q.vertices):
        M = data.get(name)
        if laurent:
            out.append(_laurent_matrix(M, target.gens[v], source.gens[v]) if M else
                       (MatrixPoly.zeros(target.gens[v], source.gens[v]), 0))
        else:
            out.append(MatrixPoly.parse(M) if M else MatrixPoly.zeros(target.gens[v], source.gens[v]))
    return out if laurent else FamilyMorphism(source, target, out)


def complex_from_json(data: dict) -> FamilyComplex:
    terms = {int(k): family_from_json(v) for k, v in data.get("terms", {}).items()}
    if not terms:
        q = quiver_from_json(data.get("quiver", "point"))
        return FamilyComplex(q, {}, {})
    q = next(iter(terms.values())).quiver
    for E in terms.values():
        if E.quiver != q:
            raise ValidationError("terms live on different quivers")
    diffs = {}
    for k, d in data.get("differentials", {}).items():
        k = int(k)
        if k not in terms or k + 1 not in terms:
            raise ValidationError(f"differential {k} needs terms in degrees {k} and {k + 1}")
        diffs[k] = morphism_from_json(d, terms[k], terms[k + 1])
    return FamilyComplex(q, terms, diffs)
