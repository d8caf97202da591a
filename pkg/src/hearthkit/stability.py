"""Central charges, exact phase comparison, HN and JH filtrations, S-equivalence."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cmp_to_key
from math import lcm
from typing import Sequence

from .arith import GAUSS_ZERO, GaussRat, rat
from .errors import (NotSemistableError, PhaseMismatchError, PreconditionError, ValidationError)
from .kronecker import (PREINJECTIVE, PREPROJECTIVE, REGULAR, KroneckerSummand, kronecker_decompose,
                        label_str, regular_rep)
from .linalg import Mat, span
from .quiver import (Quiver, Representation, RepMorphism, Subobject, SubrepLattice, direct_sum,
                     hom_dim, reduce_mod_prime)

LT, EQ, GT = -1, 0, 1
ORDER_NAMES = {LT: "LT", EQ: "EQ", GT: "GT"}


def in_heart_halfplane(z: GaussRat) -> bool:
    return z.im > 0 or (z.im == 0 and z.re < 0)


def phase_order(z1: GaussRat, z2: GaussRat) -> int:
    """Compare arguments in (0, pi]; negative reals are maximal."""
    for z in (z1, z2):
        if not in_heart_halfplane(z):
            raise ValidationError(f"{z} is zero or outside the upper half plane")
    cross = z1.re * z2.im - z1.im * z2.re
    return LT if cross > 0 else (GT if cross < 0 else EQ)


def phase_label(z: GaussRat) -> str | None:
    """Exact phase as a string when it is a simple rational multiple of pi."""
    if z.im == 0:
        return "1"
    if z.re == 0:
        return "1/2"
    if z.re == z.im:
        return "1/4"
    if z.re == -z.im:
        return "3/4"
    return None


class PhaseKey:
    """A central charge value ordered by phase."""

    __slots__ = ("z",)

    def __init__(self, z: GaussRat):
        if not in_heart_halfplane(z):
            raise ValidationError(f"{z} has no phase in (0, 1]")
        self.z = z

    def cmp(self, other: "PhaseKey") -> int:
        return phase_order(self.z, other.z)

    def __lt__(self, other):
        return self.cmp(other) == LT

    def __le__(self, other):
        return self.cmp(other) != GT

    def __gt__(self, other):
        return self.cmp(other) == GT

    def __ge__(self, other):
        return self.cmp(other) != LT

    def __eq__(self, other):
        return isinstance(other, PhaseKey) and self.cmp(other) == EQ

    def __hash__(self):
        return 0

    @property
    def mass2(self) -> Fraction:
        return self.z.norm2()

    def to_json(self) -> dict:
        return {"Z": self.z.to_json(), "phase": phase_label(self.z), "mass2": str(self.mass2)}

    def __repr__(self):
        lab = phase_label(self.z)
        return f"phase({lab})" if lab else f"phase(arg {self.z})"


@dataclass(frozen=True)
class CentralCharge:
    quiver: Quiver
    charges: tuple[GaussRat, ...]

    def __post_init__(self):
        if len(self.charges) != self.quiver.n:
            raise ValidationError("one charge per vertex is required")
        for v, z in enumerate(self.charges):
            if not in_heart_halfplane(z):
                raise ValidationError(f"charge of vertex {self.quiver.vertices[v]} is {z}; need Im > 0 "
                                      f"or Im = 0 and Re < 0")

    @classmethod
    def of(cls, quiver: Quiver, values: Sequence) -> "CentralCharge":
        return cls(quiver, tuple(GaussRat.parse(v) for v in values))

    def __call__(self, dims: Sequence[int]) -> GaussRat:
        total = GAUSS_ZERO
        for z, d in zip(self.charges, dims):
            if d:
                total = total + z * d
        return total

    def phase(self, dims: Sequence[int]) -> PhaseKey:
        return PhaseKey(self(dims))

    def scaled(self, c) -> "CentralCharge":
        c = rat(c)
        return CentralCharge(self.quiver, tuple(z * c for z in self.charges))

    def to_json(self) -> dict:
        return {"charges": {v: z.to_json() for v, z in zip(self.quiver.vertices, self.charges)}}

    @classmethod
    def from_json(cls, data: dict, quiver: Quiver) -> "CentralCharge":
        raw = data.get("charges", data)
        if isinstance(raw, dict):
            vals = [raw[v] for v in quiver.vertices]
        else:
            vals = list(raw)
        return cls.of(quiver, vals)


def _sub_dims_z(Z: CentralCharge, sub: Subobject) -> GaussRat:
    return Z(sub.dims)


@dataclass
class HNFiltration:
    rep: Representation
    chain: list[Subobject]             # 0 = E_0 < E_1 < ... < E_n = E
    pieces: list[Representation]
    charges: list[GaussRat]
    provenance: dict = dc_field(default_factory=dict)

    @property
    def length(self) -> int:
        return len(self.pieces)

    @property
    def phases(self) -> list[PhaseKey]:
        return [PhaseKey(z) for z in self.charges]

    def chain_key(self) -> tuple:
        return tuple(s.key() for s in self.chain)

    def types(self) -> list[tuple[tuple[int, ...], GaussRat]]:
        return [(P.dims, z) for P, z in zip(self.pieces, self.charges)]

    def to_json(self) -> dict:
        return {"length": self.length,
                "chain": [list(s.dims) for s in self.chain],
                "pieces": [{"dims": list(P.dims), **PhaseKey(z).to_json()}
                           for P, z in zip(self.pieces, self.charges)],
                "provenance": self.provenance}


def _build_hn(Z: CentralCharge, E: Representation, chain: list[Subobject], prov: dict) -> HNFiltration:
    pieces, charges = [], []
    for lo, hi in zip(chain, chain[1:]):
        sub_rep = hi.rep()
        rel = Subobject(sub_rep, tuple(hb.solve(lb) if lb.ncols else Mat.zeros(E.field, hb.ncols, 0)
                                       for lb, hb in zip(lo.bases, hi.bases)))
        rel = Subobject(sub_rep, tuple(B.colspace() for B in rel.bases))
        Q, _ = rel.quotient()
        pieces.append(Q)
        charges.append(Z(Q.dims))
    for z1, z2 in zip(charges, charges[1:]):
        if phase_order(z1, z2) != GT:
            raise AssertionError("HN phases are not strictly decreasing")
    return HNFiltration(E, chain, pieces, charges, prov)


def _provenance(E: Representation, route: str, extra: dict | None = None) -> dict:
    out = {"field": E.field.name, "prime": E.field.p, "route": route}
    if extra:
        out.update(extra)
    return out


def hn_exhaustive(Z: CentralCharge, E: Representation, lattice: SubrepLattice | None = None,
                  bound: int = 8) -> HNFiltration:
    """HN filtration by exhaustive search: join of maximal-phase subobjects of successive quotients."""
    if E.is_zero():
        raise PreconditionError("HN filtration of the zero object")
    lat = lattice or SubrepLattice(E, bound)
    zero = lat.tuples[0]
    top = tuple(len(t) - 1 for t in lat.tables)
    cur = zero
    chain = [cur]
    dims_of = {t: lat.dims(t) for t in lat.tuples}
    while cur != top:
        zc = Z(dims_of[cur])
        best, best_z = [], None
        for t in lat.tuples:
            if t == cur or not lat.contains(t, cur):
                continue
            w = Z(dims_of[t]) - zc
            if best_z is None:
                best, best_z = [t], w
                continue
            c = phase_order(w, best_z)
            if c == GT:
                best, best_z = [t], w
            elif c == EQ:
                best.append(t)
        nxt = best[0]
        for t in best[1:]:
            nxt = _lattice_join(lat, nxt, t)
        cur = nxt
        chain.append(cur)
    subs = [lat.subobject(t) for t in chain]
    return _build_hn(Z, E, subs, _provenance(E, "exhaustive-enumeration"))


def _lattice_join(lat: SubrepLattice, a, b):
    if lat.contains(a, b):
        return a
    if lat.contains(b, a):
        return b
    return lat.join(a, b)


def _kronecker_chamber(Z: CentralCharge) -> int:
    """Order of phase(z1) relative to phase(z2)."""
    return phase_order(Z.charges[0], Z.charges[1])


def hn_kronecker(Z: CentralCharge, E: Representation) -> HNFiltration:
    """Structural HN filtration for the Kronecker quiver via the pencil decomposition."""
    if E.is_zero():
        raise PreconditionError("HN filtration of the zero object")
    F = E.field
    zero = Subobject.zero(E)
    whole = Subobject.whole(E)
    chamber = _kronecker_chamber(Z)
    prov = _provenance(E, "kronecker-structural")
    if E.dims[0] == 0 or E.dims[1] == 0 or chamber == EQ:
        return _build_hn(Z, E, [zero, whole], prov)
    if chamber == LT:
        sink = Subobject(E, (Mat.zeros(F, E.dims[0], 0), Mat.identity(F, E.dims[1])))
        return _build_hn(Z, E, [zero, sink, whole], prov)
    dec = kronecker_decompose(E)
    prov["decomposition"] = [s.describe() for s in dec.summands]
    groups: list[tuple[GaussRat, list[KroneckerSummand]]] = []
    for s in dec.summands:
        z = Z(s.dims)
        for g in groups:
            if phase_order(g[0], z) == EQ:
                g[1].append(s)
                break
        else:
            groups.append((z, [s]))
    groups.sort(key=cmp_to_key(lambda g, h: -phase_order(g[0], h[0])))
    chain = [zero]
    acc: list[KroneckerSummand] = []
    for _, members in groups:
        acc.extend(members)
        bases = tuple(span(F, E.dims[v], [s.embedding.mats[v] for s in acc]) for v in range(2))
        chain.append(Subobject(E, bases))
    return _build_hn(Z, E, chain, prov)


def hn_filtration(Z: CentralCharge, E: Representation, bound: int = 8) -> HNFiltration:
    if Z.quiver != E.quiver:
        raise ValidationError("charge and representation live on different quivers")
    if E.is_zero():
        raise PreconditionError("HN filtration of the zero object")
    q = E.quiver
    if q.is_kronecker():
        return hn_kronecker(Z, E)
    if all(phase_order(Z.charges[0], z) == EQ for z in Z.charges):
        return _build_hn(Z, E, [Subobject.zero(E), Subobject.whole(E)], _provenance(E, "single-phase"))
    if E.field.p is not None:
        return hn_exhaustive(Z, E, bound=bound)
    red, info = reduce_mod_prime(E)
    hn = hn_exhaustive(Z, red, bound=bound)
    hn.provenance.update(info)
    hn.provenance["route"] = "good-prime-reduction"
    hn.provenance["note"] = "chain and pieces are over the reduction; only dimension vectors and phases are claimed"
    return hn


def is_semistable(Z: CentralCharge, E: Representation) -> bool:
    return hn_filtration(Z, E).length == 1


# --- Jordan-Hoelder factors ---

@dataclass
class StableFactor:
    dims: tuple[int, ...]
    key: tuple | None
    rep: Representation

    def describe(self) -> dict:
        out = {"dims": list(self.dims)}
        if self.key is not None:
            out["class"] = _key_str(self.key)
        return out


def _key_str(key) -> str:
    if key[0] == "simple":
        return f"S{key[1]}"
    if key[0] == REGULAR:
        return f"R{key[2]}"
    return f"{key[0]}-{key[1]}"


@dataclass
class SEquivClass:
    factors: list[StableFactor]
    charge: GaussRat
    witness: list[Subobject] = dc_field(default_factory=list)
    provenance: dict = dc_field(default_factory=dict)

    def class_sum(self) -> tuple[int, ...]:
        n = len(self.factors[0].dims) if self.factors else 0
        return tuple(sum(f.dims[v] for f in self.factors) for v in range(n))

    def keyed(self) -> bool:
        return all(f.key is not None for f in self.factors)

    def to_json(self) -> dict:
        return {"factors": [f.describe() for f in self.factors],
                "phase": PhaseKey(self.charge).to_json() if in_heart_halfplane(self.charge) else None,
                "provenance": self.provenance}


def _factor_key_for_summand(s: KroneckerSummand, E: Representation) -> tuple:
    if s.rep.total_dim == 1:
        v = 0 if s.dims[0] == 1 else 1
        return ("simple", E.quiver.vertices[v])
    if s.kind == REGULAR:
        return (REGULAR, 1, label_str(s.label))
    return (s.kind, s.index)


def _simple_factors(E: Representation) -> list[StableFactor]:
    out = []
    for v in range(E.quiver.n):
        S = Representation.simple(E.quiver, E.field, v)
        out.extend(StableFactor(S.dims, ("simple", E.quiver.vertices[v]), S) for _ in range(E.dims[v]))
    return out


def _flag_witness(E: Representation) -> list[Subobject]:
    """Coordinate flag through sinks first: every step has a simple quotient."""
    F = E.field
    q = E.quiver
    chain = [Subobject.zero(E)]
    cur = [0] * q.n
    for v in reversed(q.order):
        for k in range(E.dims[v]):
            cur[v] = k + 1
            bases = tuple(Mat.unit_columns(F, E.dims[w], range(cur[w])) for w in range(q.n))
            sub = Subobject(E, bases)
            if not sub.is_closed():
                return []
            chain.append(sub)
    return chain


def jh_factors(Z: CentralCharge, E: Representation) -> SEquivClass:
    """Multiset of stable factors of a semistable representation."""
    if E.is_zero():
        raise PreconditionError("JH factors of the zero object")
    hn = hn_filtration(Z, E)
    if hn.length != 1:
        raise NotSemistableError(f"representation with dims {E.dims} is not semistable "
                                 f"(HN length {hn.length})")
    q = E.quiver
    zE = Z(E.dims)
    if q.n == 1 or all(phase_order(Z.charges[0], z) == EQ for z in Z.charges):
        # all simples share one phase: factors are the simples with multiplicity
        return SEquivClass(_simple_factors(E), zE, _flag_witness(E), _provenance(E, "simples"))
    if q.is_kronecker():
        return _jh_kronecker(Z, E)
    if E.field.p is not None:
        return jh_exhaustive(Z, E)
    red, info = reduce_mod_prime(E)
    res = jh_exhaustive(Z, red)
    res.provenance.update(info)
    res.provenance["route"] = "good-prime-reduction"
    return res


def _jh_kronecker(Z: CentralCharge, E: Representation) -> SEquivClass:
    chamber = _kronecker_chamber(Z)
    zE = Z(E.dims)
    if chamber == LT or E.dims[0] == 0 or E.dims[1] == 0:
        return SEquivClass(_simple_factors(E), zE, _flag_witness(E), _provenance(E, "simples"))
    dec = kronecker_decompose(E)
    F = E.field
    factors: list[StableFactor] = []
    witness = [Subobject.zero(E)]
    acc: list[Mat] = [Mat.zeros(F, E.dims[v], 0) for v in range(2)]
    for s in dec.summands:
        key = _factor_key_for_summand(s, E)
        if s.kind == REGULAR and s.index > 1:
            base = regular_rep(F, s.label, 1)
            for piece in _regular_internal_chain(s):
                factors.append(StableFactor(base.dims, key, base))
                acc = [span(F, E.dims[v], [acc[v], s.embedding.mats[v] @ piece[v]]) for v in range(2)]
                witness.append(Subobject(E, tuple(acc)))
        else:
            rep = s.rep if s.kind != REGULAR else regular_rep(F, s.label, 1)
            factors.append(StableFactor(s.dims, key, rep))
            acc = [span(F, E.dims[v], [acc[v], s.embedding.mats[v]]) for v in range(2)]
            witness.append(Subobject(E, tuple(acc)))
    factors.sort(key=lambda f: (f.dims, str(f.key)))
    prov = _provenance(E, "kronecker-structural", {"decomposition": [s.describe() for s in dec.summands]})
    return SEquivClass(factors, zE, witness, prov)


def _regular_internal_chain(s: KroneckerSummand) -> list[tuple[Mat, Mat]]:
    """Bases (in the summand's coordinates) of the socle series of a regular block."""
    R = s.rep
    F = R.field
    # socle series: iterated kernels of the pencil operator's primary part on the block
    a, b = R.maps
    chain = []
    n = R.dims[0]
    # any pencil point where the block is invertible
    for alpha, beta in ((1, 0), (0, 1)) + tuple((1, k) for k in range(1, 4 * n + 8)):
        M = a.scale(alpha) + b.scale(beta)
        if M.is_invertible():
            break
    gamma, delta = (0, 1) if F(alpha) != 0 else (1, 0)
    N = M.inverse() @ (a.scale(gamma) + b.scale(delta))
    from .kronecker import factor_over
    facs = factor_over(F, N.charpoly_coeffs())
    (qpoly, e), = facs
    Q = N.poly_eval(qpoly)
    Qj = Mat.identity(F, n)
    for _ in range(s.index):
        Qj = Qj @ Q
        K = Qj.kernel().colspace()
        chain.append((K, (M @ K).colspace()))
    return chain


def jh_exhaustive(Z: CentralCharge, E: Representation, bound: int = 8) -> SEquivClass:
    """JH factors by repeatedly adding a smallest equal-phase subobject (oracle over F_p)."""
    lat = SubrepLattice(E, bound)
    zE = Z(E.dims)
    cur = lat.tuples[0]
    top = tuple(len(t) - 1 for t in lat.tables)
    chain = [cur]
    factors = []
    while cur != top:
        zc = Z(lat.dims(cur))
        cands = []
        for t in lat.tuples:
            if t == cur or not lat.contains(t, cur):
                continue
            w = Z(lat.dims(t)) - zc
            if phase_order(w, zE) == EQ:
                cands.append((sum(lat.dims(t)), t))
        if not cands:
            raise NotSemistableError("no equal-phase subobject found; not semistable")
        cands.sort()
        nxt = cands[0][1]
        lo, hi = lat.subobject(cur), lat.subobject(nxt)
        sub_rep = hi.rep()
        rel = Subobject(sub_rep, tuple((hb.solve(lb) if lb.ncols else Mat.zeros(E.field, hb.ncols, 0)).colspace()
                                       for lb, hb in zip(lo.bases, hi.bases)))
        Q, _ = rel.quotient()
        factors.append(StableFactor(Q.dims, None, Q))
        cur = nxt
        chain.append(cur)
    factors.sort(key=lambda f: f.dims)
    return SEquivClass(factors, zE, [lat.subobject(t) for t in chain], _provenance(E, "exhaustive-enumeration"))


def _iso_stable(A: Representation, B: Representation) -> bool:
    """Two stables of the same phase are isomorphic iff a nonzero map exists."""
    return A.dims == B.dims and hom_dim(A, B) > 0


def same_factor_multiset(X: SEquivClass, Y: SEquivClass) -> bool:
    if len(X.factors) != len(Y.factors):
        return False
    if X.keyed() and Y.keyed():
        return sorted(str(f.key) for f in X.factors) == sorted(str(f.key) for f in Y.factors)
    pool = list(Y.factors)
    for f in X.factors:
        for i, g in enumerate(pool):
            if f.rep.field == g.rep.field and _iso_stable(f.rep, g.rep):
                pool.pop(i)
                break
        else:
            return False
    return True


def s_equivalent(Z: CentralCharge, E: Representation, F: Representation) -> bool:
    zE, zF = Z(E.dims), Z(F.dims)
    if phase_order(zE, zF) != EQ:
        raise PhaseMismatchError("objects have different phases")
    return same_factor_multiset(jh_factors(Z, E), jh_factors(Z, F))


def polystable_form(cls: SEquivClass, quiver: Quiver, field) -> Representation:
    S, _, _ = direct_sum([f.rep for f in cls.factors], quiver, field)
    return S


def is_polystable(Z: CentralCharge, E: Representation) -> bool:
    """Whether a semistable E is a direct sum of stable objects."""
    if not is_semistable(Z, E):
        return False
    q = E.quiver
    if q.n == 1:
        return True
    if q.is_kronecker():
        chamber = _kronecker_chamber(Z)
        if chamber == EQ:
            return all(M.is_zero() for M in E.maps)
        if chamber == LT or E.dims[0] == 0 or E.dims[1] == 0:
            return True
        dec = kronecker_decompose(E)
        return all(s.kind != REGULAR or s.index == 1 for s in dec.summands)
    raise PreconditionError("polystability test is implemented for the point and Kronecker quivers")


def polystable_socle(Z: CentralCharge, E: Representation) -> Subobject:
    """Largest subobject of a semistable E that is a direct sum of stables of the same phase."""
    q = E.quiver
    F = E.field
    if q.n == 1:
        return Subobject.whole(E)
    if not q.is_kronecker():
        raise PreconditionError("socle computation is implemented for the point and Kronecker quivers")
    chamber = _kronecker_chamber(Z)
    if chamber == EQ:
        ker = Mat.vstack(F, list(E.maps), E.dims[0]).kernel().colspace()
        return Subobject(E, (ker, Mat.identity(F, E.dims[1])))
    if chamber == LT or E.dims[0] == 0 or E.dims[1] == 0:
        return Subobject.whole(E)
    dec = kronecker_decompose(E)
    parts = [[], []]
    for s in dec.summands:
        if s.kind == REGULAR and s.index > 1:
            bottom = _regular_internal_chain(s)[0]
            for v in range(2):
                parts[v].append(s.embedding.mats[v] @ bottom[v])
        else:
            for v in range(2):
                parts[v].append(s.embedding.mats[v])
    return Subobject(E, tuple(span(F, E.dims[v], parts[v]) for v in range(2)))


# --- discreteness ---

@dataclass
class DiscretenessReport:
    im_image_discrete: bool
    image_discrete: bool
    denominator: int
    denominator_lattice: str
    min_positive_im: Fraction | None
    min_positive_im_oracle: Fraction | None
    im_generator: Fraction

    def to_json(self) -> dict:
        return {"im_image_discrete": self.im_image_discrete, "image_discrete": self.image_discrete,
                "denominator_lattice": self.denominator_lattice,
                "min_positive_im": None if self.min_positive_im is None else str(self.min_positive_im),
                "min_positive_im_oracle": None if self.min_positive_im_oracle is None
                else str(self.min_positive_im_oracle),
                "im_generator": str(self.im_generator)}


def _frac_gcd(values: Sequence[Fraction]) -> Fraction:
    from math import gcd
    vals = [abs(v) for v in values if v != 0]
    if not vals:
        return Fraction(0)
    den = 1
    for v in vals:
        den = lcm(den, v.denominator)
    g = 0
    for v in vals:
        g = gcd(g, int(v * den))
    return Fraction(g, den)


def discreteness_report(Z: CentralCharge, radius: int = 10) -> DiscretenessReport:
    """Discreteness of Z(K_0) and Im Z(K_0), with the minimal positive Im over the box |d_v| <= radius."""
    den = 1
    for z in Z.charges:
        den = lcm(den, z.re.denominator, z.im.denominator)
    ims = [z.im for z in Z.charges]
    reachable = {Fraction(0)}
    for im in ims:
        reachable = {s + k * im for s in reachable for k in range(-radius, radius + 1)}
    pos = [s for s in reachable if s > 0]
    best = min(pos) if pos else None
    oracle = None
    for d in itertools.product(range(-radius, radius + 1), repeat=len(ims)):
        s = sum(k * im for k, im in zip(d, ims))
        if s > 0 and (oracle is None or s < oracle):
            oracle = s
    return DiscretenessReport(True, True, den, f"(1/{den})Z[i]", best, oracle, _frac_gcd(ims))


# --- chain monitor ---

@dataclass
class ChainReport:
    steps: list[dict]
    in_P1: bool
    E0_dims: tuple[int, ...]
    a_phase: dict | None
    torsion_dims: list[tuple[int, ...]]
    stabilization_index: int
    checks: dict

    def to_json(self) -> dict:
        return {"steps": self.steps, "in_P1": self.in_P1, "E0_dims": list(self.E0_dims),
                "a_phase": self.a_phase, "torsion_dims": [list(t) for t in self.torsion_dims],
                "stabilization_index": self.stabilization_index, "checks": self.checks}


def _hn_truncation_above(Z: CentralCharge, F: Representation, a: GaussRat) -> Subobject:
    """Largest subobject whose HN factors all have phase > a."""
    if F.is_zero():
        return Subobject.zero(F)
    hn = hn_filtration(Z, F)
    best = hn.chain[0]
    for sub, z in zip(hn.chain[1:], hn.charges):
        if phase_order(z, a) != GT:
            break
        best = sub
    return best


def chain_monitor(Z: CentralCharge, E: Representation, chain: Sequence[RepMorphism]) -> ChainReport:
    """Track Z along an increasing chain F_1 < F_2 < ... inside E."""
    F = E.field
    images = []
    for i, f in enumerate(chain):
        if f.target != E:
            raise ValidationError(f"chain member {i + 1} does not map into E")
        if not f.is_mono():
            raise ValidationError(f"chain member {i + 1} is not a monomorphism")
        images.append(Subobject(E, tuple(M.colspace() for M in f.mats)))
    for i in range(len(images) - 1):
        if not images[i + 1].contains(images[i]):
            raise ValidationError(f"chain member {i + 1} is not contained in member {i + 2}")
    zE = Z(E.dims)
    hnE = hn_filtration(Z, E)
    in_P1 = zE.im == 0
    if hnE.charges[0].im == 0:
        E0 = hnE.chain[1]
        a = hnE.charges[1] if hnE.length > 1 else None
    else:
        E0 = hnE.chain[0]
        a = hnE.charges[0]
    steps, checks = [], {}
    zs = [Z(s.dims) for s in images]
    checks["im_nondecreasing"] = all(z2.im >= z1.im for z1, z2 in zip(zs, zs[1:]))
    checks["im_bounded_by_E"] = all(z.im <= zE.im for z in zs)
    checks["quotient_identity"] = all(z.im == zE.im - (zE - z).im for z in zs)
    if in_P1:
        checks["members_in_P1"] = all(z.im == 0 for z in zs)
        checks["re_nonincreasing"] = all(z2.re <= z1.re for z1, z2 in zip(zs, zs[1:]))
        checks["re_bounded_below"] = all(z.re >= zE.re for z in zs)
    torsion = []
    tsubs = []
    for f, sub in zip(chain, images):
        T = Subobject.whole(f.source) if a is None else _hn_truncation_above(Z, f.source, a)
        img = Subobject(E, tuple((f.mats[v] @ T.bases[v]).colspace() for v in range(E.quiver.n)))
        tsubs.append(img)
        torsion.append(img.dims)
    checks["torsion_increasing"] = all(t2.contains(t1) for t1, t2 in zip(tsubs, tsubs[1:]))
    checks["torsion_in_E0"] = all(E0.contains(t) for t in tsubs)
    for i, z in enumerate(zs):
        step = {"index": i + 1, "dims": list(images[i].dims), "Z": z.to_json(),
                "im": str(z.im), "re": str(z.re)}
        if i:
            prev = zs[i - 1]
            if z.im > prev.im:
                step["event"] = "im-jump"
            elif z.re < prev.re:
                step["event"] = "re-descent"
            elif z == prev:
                step["event"] = "constant"
            else:
                step["event"] = "other"
        steps.append(step)
    stab = len(images)
    while stab > 1 and images[stab - 2] == images[stab - 1]:
        stab -= 1
    checks["equal_charge_iff_equal"] = all((zs[i] == zs[i + 1]) == (images[i] == images[i + 1])
                                           for i in range(len(zs) - 1))
    return ChainReport(steps, in_P1, E0.dims, PhaseKey(a).to_json() if a is not None else None,
                       torsion, stab, checks)
