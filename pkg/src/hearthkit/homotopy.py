"""Bounded complexes of representations: cohomology, shifts, cones and Hom in the derived category."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import PreconditionError, ValidationError
from .linalg import Field, Mat
from .quiver import (Quiver, Representation, RepMorphism, Subobject, direct_sum, ext1_dim, hom_dim,
                     hom_space, morphism_coordinates, resolution_morphism, standard_resolution)


class Complex:
    """Cochain complex C^n with d_n: C^n -> C^{n+1}; missing degrees are zero."""

    def __init__(self, quiver: Quiver, field: Field, objects: Mapping[int, Representation],
                 diffs: Mapping[int, RepMorphism] | None = None, hereditary: bool = True):
        self.quiver = quiver
        self.field = field
        self.hereditary = hereditary
        self.objects = {int(n): E for n, E in objects.items() if not E.is_zero()}
        self.diffs: dict[int, RepMorphism] = {}
        for n, E in objects.items():
            if E.quiver != quiver or E.field != field:
                raise ValidationError(f"degree {n}: object over a different quiver or field")
        for n, d in (diffs or {}).items():
            n = int(n)
            if d.source.dims != self.obj(n).dims or d.target.dims != self.obj(n + 1).dims:
                raise ValidationError(f"differential d_{n} has the wrong source or target")
            if not d.is_zero():
                self.diffs[n] = d
        for n in self.diffs:
            if n + 1 in self.diffs and not self.diffs[n + 1].compose(self.diffs[n]).is_zero():
                raise ValidationError(f"d_{n + 1} o d_{n} is not zero")

    def obj(self, n: int) -> Representation:
        E = self.objects.get(n)
        return E if E is not None else Representation.zero(self.quiver, self.field)

    def d(self, n: int) -> RepMorphism:
        d = self.diffs.get(n)
        return d if d is not None else RepMorphism.zero(self.obj(n), self.obj(n + 1))

    def degrees(self) -> list[int]:
        return sorted(self.objects)

    def window(self) -> tuple[int, int] | None:
        if not self.objects:
            return None
        return min(self.objects), max(self.objects)

    def is_zero(self) -> bool:
        return not self.objects

    @classmethod
    def single(cls, E: Representation, degree: int = 0, hereditary: bool = True) -> "Complex":
        return cls(E.quiver, E.field, {degree: E}, {}, hereditary)

    def shift(self, k: int) -> "Complex":
        """C[k]^n = C^{n+k}, with differential multiplied by (-1)^k."""
        sign = -1 if k % 2 else 1
        objs = {n - k: E for n, E in self.objects.items()}
        diffs = {}
        for n, d in self.diffs.items():
            diffs[n - k] = d.scale(sign)
        return Complex(self.quiver, self.field, objs, diffs, self.hereditary)

    def euler_characteristic(self) -> tuple[int, ...]:
        out = [0] * self.quiver.n
        for n, E in self.objects.items():
            for v in range(self.quiver.n):
                out[v] += (-1) ** (n % 2) * E.dims[v]
        return tuple(out)

    def cohomology(self) -> "CohomologyProfile":
        prof = {}
        for n in self.degrees():
            H = CohomologyObject(self, n)
            if not H.rep.is_zero():
                prof[n] = H
        return CohomologyProfile(prof)

    def is_acyclic(self) -> bool:
        return not self.cohomology().objects

    def truncate_below(self, n: int) -> "Complex":
        """Standard truncation keeping degrees <= n, with ker d_n in degree n."""
        objs = {m: E for m, E in self.objects.items() if m < n}
        diffs = {m: d for m, d in self.diffs.items() if m < n - 1}
        K = Subobject(self.obj(n), tuple(M.kernel().colspace() for M in self.d(n).mats))
        Krep = K.rep()
        objs[n] = Krep
        if n - 1 in self.diffs:
            d = self.diffs[n - 1]
            diffs[n - 1] = RepMorphism(d.source, Krep, tuple(B.solve(M) for B, M in zip(K.bases, d.mats)))
        return Complex(self.quiver, self.field, objs, diffs, self.hereditary)

    def truncate_above(self, n: int) -> "Complex":
        """Standard truncation keeping degrees >= n, with coker d_{n-1} in degree n."""
        objs = {m: E for m, E in self.objects.items() if m > n}
        diffs = {m: d for m, d in self.diffs.items() if m > n}
        I = Subobject(self.obj(n), tuple(M.colspace() for M in self.d(n - 1).mats))
        Q, proj = I.quotient()
        objs[n] = Q
        if n in self.diffs:
            d = self.diffs[n]
            diffs[n] = RepMorphism(Q, d.target, tuple(M @ P.solve(Mat.identity(self.field, P.nrows))
                                                      for M, P in zip(d.mats, proj.mats)))
        return Complex(self.quiver, self.field, objs, diffs, self.hereditary)

    def to_json(self) -> dict:
        return {"degrees": {str(n): E.to_json() for n, E in sorted(self.objects.items())},
                "diffs": {str(n): d.to_json() for n, d in sorted(self.diffs.items())}}

    @classmethod
    def from_json(cls, data: dict, quiver: Quiver | None = None) -> "Complex":
        objs = {}
        q = quiver
        for n, rd in data["degrees"].items():
            if q is None and "quiver" in rd:
                q = Quiver.from_json(rd["quiver"])
            objs[int(n)] = Representation.from_json(rd, q)
        if q is None:
            raise ValidationError("complex needs a quiver")
        field = next(iter(objs.values())).field if objs else None
        diffs = {}
        for n, dd in data.get("diffs", {}).items():
            n = int(n)
            src = objs.get(n) or Representation.zero(q, field)
            tgt = objs.get(n + 1) or Representation.zero(q, field)
            diffs[n] = RepMorphism.from_json(dd, src, tgt)
        return cls(q, field, objs, diffs)


class CohomologyObject:
    """H^n = ker d_n / im d_{n-1} with the cycle/boundary witnesses."""

    def __init__(self, C: Complex, n: int):
        self.degree = n
        E = C.obj(n)
        # d^2 = 0 is checked when the complex is built, so boundaries lie in the cycles
        self.cycles = Subobject(E, tuple(M.kernel() for M in C.d(n).mats))
        self.boundaries = Subobject(E, tuple(M.colspace() for M in C.d(n - 1).mats))
        Zrep = self.cycles.rep()
        rel = Subobject(Zrep, tuple((zb.solve(bb) if bb.ncols else Mat.zeros(E.field, zb.ncols, 0)).colspace()
                                    for zb, bb in zip(self.cycles.bases, self.boundaries.bases)))
        self.rep, self._proj = rel.quotient()
        F = E.field
        self._lift = []
        for v, P in enumerate(self._proj.mats):
            sec = P.right_inverse()
            self._lift.append(self.cycles.bases[v] @ sec)
        # rows on which each cycle basis is invertible, for reading off coordinates
        self._coord = []
        for Z in self.cycles.bases:
            if Z.ncols == 0:
                self._coord.append(([], Z.T))
                continue
            _, rows = Z.T.rref()
            self._coord.append((rows, Z.submatrix(rows, range(Z.ncols)).inverse()))

    def lifts(self, v: int) -> Mat:
        """Cycle representatives (columns, in C^n coordinates) of the basis of H^n at vertex v."""
        return self._lift[v]

    def classes(self, v: int, cycles: Mat) -> Mat:
        """Cohomology classes of cycle columns at vertex v."""
        rows, inv = self._coord[v]
        Z = self.cycles.bases[v]
        if Z.ncols == 0:
            X = Mat.zeros(Z.field, 0, cycles.ncols)
        else:
            X = inv @ cycles.submatrix(rows, range(cycles.ncols))
        if not (Z @ X == cycles):
            raise ValueError("not a cycle")
        return self._proj.mats[v] @ X


@dataclass
class CohomologyProfile:
    objects: dict[int, CohomologyObject]

    def dims(self) -> dict[int, tuple[int, ...]]:
        return {n: H.rep.dims for n, H in sorted(self.objects.items())}

    def support(self) -> list[int]:
        return sorted(self.objects)

    def to_json(self) -> dict:
        return {str(n): {"dims": list(H.rep.dims)} for n, H in sorted(self.objects.items())}


class ChainMap:
    def __init__(self, source: Complex, target: Complex, maps: Mapping[int, RepMorphism]):
        self.source, self.target = source, target
        self.maps = {}
        for n in set(source.objects) | set(target.objects):
            f = maps.get(n)
            if f is None:
                f = RepMorphism.zero(source.obj(n), target.obj(n))
            if f.source.dims != source.obj(n).dims or f.target.dims != target.obj(n).dims:
                raise ValidationError(f"chain map component {n} has the wrong shape")
            self.maps[n] = f
        for n in self.maps:
            lhs = target.d(n).compose(self.at(n))
            rhs = self.at(n + 1).compose(source.d(n))
            if any(not (a == b) for a, b in zip(lhs.mats, rhs.mats)):
                raise ValidationError(f"not a chain map: square at degree {n} does not commute")

    def at(self, n: int) -> RepMorphism:
        f = self.maps.get(n)
        return f if f is not None else RepMorphism.zero(self.source.obj(n), self.target.obj(n))

    def induced(self, n: int) -> list[Mat]:
        """Matrices (per vertex) of H^n(f)."""
        HC = CohomologyObject(self.source, n)
        HD = CohomologyObject(self.target, n)
        return [HD.classes(v, self.at(n).mats[v] @ HC.lifts(v)) for v in range(self.source.quiver.n)]


def cone(f: ChainMap) -> Complex:
    """Cone^n = C^{n+1} + D^n with d = [[-d_C, 0], [f, d_D]]."""
    C, D = f.source, f.target
    degs = {n - 1 for n in C.objects} | set(D.objects)
    objs, diffs = {}, {}
    for n in degs:
        objs[n] = direct_sum([C.obj(n + 1), D.obj(n)], C.quiver, C.field)[0]
    F = C.field
    for n in degs:
        src = objs[n]
        tgt = objs.get(n + 1) or direct_sum([C.obj(n + 2), D.obj(n + 1)], C.quiver, F)[0]
        mats = []
        for v in range(C.quiver.n):
            top = Mat.hstack(F, [(-C.d(n + 1).mats[v]), Mat.zeros(F, C.obj(n + 2).dims[v], D.obj(n).dims[v])],
                             C.obj(n + 2).dims[v])
            bot = Mat.hstack(F, [f.at(n + 1).mats[v], D.d(n).mats[v]], D.obj(n + 1).dims[v])
            mats.append(Mat.vstack(F, [top, bot], src.dims[v]))
        diffs[n] = RepMorphism(src, tgt, tuple(mats))
        if n + 1 not in objs:
            objs[n + 1] = tgt
    return Complex(C.quiver, F, objs, diffs, C.hereditary)


def cone_les_exact(f: ChainMap) -> bool:
    """Exactness of ... -> H^n(C) -> H^n(D) -> H^n(Cone) -> H^{n+1}(C) -> ... (checked vertexwise)."""
    C, D = f.source, f.target
    K = cone(f)
    q = C.quiver
    degs = sorted({n for n in C.objects} | {n for n in D.objects} | {n for n in K.objects} |
                  {n - 1 for n in C.objects})
    lo, hi = min(degs) - 1, max(degs) + 1
    for v in range(q.n):
        seq = []   # list of (dim of space, matrix to next)
        for n in range(lo, hi + 1):
            HC, HD, HK = CohomologyObject(C, n), CohomologyObject(D, n), CohomologyObject(K, n)
            HC1 = CohomologyObject(C, n + 1)
            Fld = C.field
            fmat = HD.classes(v, f.at(n).mats[v] @ HC.lifts(v))
            inc = Mat.vstack(Fld, [Mat.zeros(Fld, C.obj(n + 1).dims[v], D.obj(n).dims[v]),
                                   Mat.identity(Fld, D.obj(n).dims[v])], D.obj(n).dims[v])
            imat = HK.classes(v, inc @ HD.lifts(v))
            proj = Mat.hstack(Fld, [Mat.identity(Fld, C.obj(n + 1).dims[v]),
                                    Mat.zeros(Fld, C.obj(n + 1).dims[v], D.obj(n).dims[v])],
                              C.obj(n + 1).dims[v])
            # the connecting map H^n(Cone) -> H^{n+1}(C) is induced by the projection (up to sign)
            pmat = HC1.classes(v, proj @ HK.lifts(v))
            seq.append((HC.rep.dims[v], fmat))
            seq.append((HD.rep.dims[v], imat))
            seq.append((HK.rep.dims[v], pmat))
        for i in range(len(seq) - 1):
            dim_mid = seq[i + 1][0]
            rank_in = seq[i][1].rank()
            rank_out = seq[i + 1][1].rank()
            if rank_in + rank_out != dim_mid:
                return False
            if not (seq[i + 1][1] @ seq[i][1]).is_zero():
                return False
    return True


def convolution(C: Complex) -> Complex:
    """A representative of the convolution of a complex of heart objects.

    Over a hereditary category the complex is quasi-isomorphic to the sum of its shifted
    cohomology objects, which is returned as the normal form.  Otherwise the complex itself
    is returned.
    """
    if not C.hereditary:
        return C
    prof = C.cohomology()
    return Complex(C.quiver, C.field, {n: H.rep for n, H in prof.objects.items()}, {}, True)


def ext_dims(E: Complex, F: Complex) -> dict[int, int]:
    """dim Hom(E, F[k]) via the formality decomposition."""
    if not (E.hereditary and F.hereditary):
        raise PreconditionError("ext_dims needs complexes over a hereditary quiver")
    HE = {n: H.rep for n, H in E.cohomology().objects.items()}
    HF = {n: H.rep for n, H in F.cohomology().objects.items()}
    out: dict[int, int] = {}
    for i, A in HE.items():
        for j, B in HF.items():
            h0, h1 = hom_dim(A, B), ext1_dim(A, B)
            if h0:
                out[j - i] = out.get(j - i, 0) + h0
            if h1:
                out[j - i + 1] = out.get(j - i + 1, 0) + h1
    return {k: v for k, v in sorted(out.items()) if v}


def rhom_direct(E: Complex, F: Complex) -> dict[int, int]:
    """dim Hom(E, F[k]) from Hom of the total complex of termwise projective resolutions of E into F."""
    if not (E.hereditary and F.hereditary):
        raise PreconditionError("rhom_direct needs complexes over a hereditary quiver")
    q, Fld = E.quiver, E.field
    res = {n: standard_resolution(E.obj(n)) for n in range(min(E.objects, default=0) - 1,
                                                              max(E.objects, default=0) + 2)}
    degs = sorted(E.objects)
    if not degs or not F.objects:
        return {}
    # total complex: T^m = P0(E^m) + P1(E^{m+1})
    T, dT = {}, {}
    for m in range(degs[0] - 1, degs[-1] + 1):
        T[m] = direct_sum([res[m].P0, res[m + 1].P1], q, Fld)[0] if m in res and m + 1 in res else None
    T = {m: X for m, X in T.items() if X is not None}
    for m in T:
        if m + 1 not in T:
            continue
        P0d, P1d = None, None
        a0, _ = resolution_morphism(res[m], res[m + 1], E.d(m))
        _, b1 = resolution_morphism(res[m + 1], res[m + 2], E.d(m + 1)) if m + 2 in res else (None, None)
        mats = []
        for v in range(q.n):
            r0 = res[m + 1].P0.dims[v]
            r1 = res[m + 2].P1.dims[v] if m + 2 in res else 0
            c0 = res[m].P0.dims[v]
            c1 = res[m + 1].P1.dims[v]
            top = Mat.hstack(Fld, [a0.mats[v], res[m + 1].d.mats[v]], r0)
            bl = Mat.zeros(Fld, r1, c0)
            br = (-b1.mats[v]) if b1 is not None else Mat.zeros(Fld, r1, c1)
            bot = Mat.hstack(Fld, [bl, br], r1)
            mats.append(Mat.vstack(Fld, [top, bot], c0 + c1))
        dT[m] = RepMorphism(T[m], T[m + 1], tuple(mats))
    # Hom^k = prod_m Hom(T^m, F^{m+k}); D(phi) = d_F phi - (-1)^k phi d_T
    fdeg = sorted(F.objects)
    ks = range(fdeg[0] - max(T) - 1, fdeg[-1] - min(T) + 2)
    bases = {}
    for k in ks:
        bases[k] = {m: hom_space(T[m], F.obj(m + k)) for m in T}
    dims = {k: sum(len(b) for b in bases[k].values()) for k in ks}

    def dmatrix(k):
        rows_total = dims.get(k + 1, 0)
        cols = []
        for m in sorted(T):
            for phi in bases[k][m]:
                col_parts = []
                for m2 in sorted(T):
                    tgt_basis = bases[k + 1][m2] if k + 1 in bases else []
                    if not tgt_basis:
                        continue
                    comp = None
                    if m2 == m:
                        comp = F.d(m + k).compose(phi)
                    if m2 == m - 1 and m - 1 in dT:
                        t = phi.compose(dT[m - 1])
                        t = t.scale(-1 if k % 2 == 0 else 1)
                        comp = t if comp is None else comp + t
                    if comp is None:
                        col_parts.append(Mat.zeros(Fld, len(tgt_basis), 1))
                    else:
                        col_parts.append(morphism_coordinates(tgt_basis, [comp]))
                cols.append(Mat.vstack(Fld, col_parts, 1) if col_parts else Mat.zeros(Fld, 0, 1))
        return Mat.hstack(Fld, cols, rows_total) if cols else Mat.zeros(Fld, rows_total, 0)

    ranks = {k: dmatrix(k).rank() for k in ks}
    out = {}
    for k in ks:
        h = dims[k] - ranks[k] - ranks.get(k - 1, 0)
        if h:
            out[k] = h
    return out
