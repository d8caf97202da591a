"""Finite acyclic quivers and their representations over Q or F_p."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import ValidationError, SizeBoundError
from .linalg import QQ, Field, GF, Mat, contains, field_from_name, span, intersect, default_prime


class Quiver:
    """Vertices are string identifiers; arrows are (source index, target index) pairs."""

    def __init__(self, vertices: Sequence[str], arrows: Sequence[tuple[int, int]]):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("vertex identifiers must be unique")
        n = len(self.vertices)
        self.arrows = tuple((int(s), int(t)) for s, t in arrows)
        for s, t in self.arrows:
            if not (0 <= s < n and 0 <= t < n):
                raise ValidationError(f"arrow ({s},{t}) refers to a missing vertex")
        self.order = self._topological_order()

    def _topological_order(self) -> tuple[int, ...]:
        n = len(self.vertices)
        indeg = [0] * n
        for _, t in self.arrows:
            indeg[t] += 1
        ready = [v for v in range(n) if indeg[v] == 0]
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for s, t in self.arrows:
                if s == v:
                    indeg[t] -= 1
                    if indeg[t] == 0:
                        ready.append(t)
        if len(order) != n:
            raise ValidationError("quiver has a directed cycle")
        return tuple(order)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, vertex) -> int:
        if isinstance(vertex, int) and not isinstance(vertex, bool) and str(vertex) not in self.vertices:
            return vertex
        try:
            return self.vertices.index(str(vertex))
        except ValueError:
            raise ValidationError(f"unknown vertex {vertex!r}") from None

    def is_kronecker(self) -> bool:
        return self.n == 2 and len(self.arrows) == 2 and all(a == (0, 1) for a in self.arrows)

    def is_single_vertex(self) -> bool:
        return self.n == 1 and not self.arrows

    def paths_from(self, v: int) -> dict[int, list[tuple[int, ...]]]:
        """All paths starting at v, grouped by endpoint; a path is a tuple of arrow indices."""
        out: dict[int, list[tuple[int, ...]]] = {w: [] for w in range(self.n)}
        stack = [(v, ())]
        while stack:
            w, p = stack.pop()
            out[w].append(p)
            for ai, (s, t) in enumerate(self.arrows):
                if s == w:
                    stack.append((t, p + (ai,)))
        for w in out:
            out[w].sort(key=lambda p: (len(p), p))
        return out

    def key(self):
        return (self.vertices, self.arrows)

    def __eq__(self, other):
        return isinstance(other, Quiver) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "arrows": [{"src": self.vertices[s], "dst": self.vertices[t]} for s, t in self.arrows]}

    @classmethod
    def from_json(cls, data: dict) -> "Quiver":
        verts = [str(v) for v in data["vertices"]]
        arrows = []
        for a in data.get("arrows", []):
            if isinstance(a, dict):
                s, t = str(a["src"]), str(a["dst"])
            else:
                s, t = str(a[0]), str(a[1])
            if s not in verts or t not in verts:
                raise ValidationError(f"arrow {a} refers to a missing vertex")
            arrows.append((verts.index(s), verts.index(t)))
        return cls(verts, arrows)

    def __repr__(self):
        return f"Quiver({list(self.vertices)}, {list(self.arrows)})"


def kronecker_quiver() -> Quiver:
    return Quiver(["1", "2"], [(0, 1), (0, 1)])


def point_quiver() -> Quiver:
    return Quiver(["1"], [])


def euler_form(q: Quiver, d: Sequence[int], e: Sequence[int]) -> int:
    """Ringel form: sum_v d_v e_v - sum over arrows u->v of d_u e_v."""
    if len(d) != q.n or len(e) != q.n:
        raise ValidationError("dimension vector length does not match the quiver")
    return sum(d[v] * e[v] for v in range(q.n)) - sum(d[s] * e[t] for s, t in q.arrows)


@dataclass(frozen=True, eq=False)
class Representation:
    quiver: Quiver
    field: Field
    dims: tuple[int, ...]
    maps: tuple[Mat, ...]

    def __post_init__(self):
        q = self.quiver
        if len(self.dims) != q.n:
            raise ValidationError("dims length does not match the quiver")
        if any(d < 0 for d in self.dims):
            raise ValidationError("negative dimension")
        if len(self.maps) != len(q.arrows):
            raise ValidationError("one matrix per arrow is required")
        for ai, ((s, t), M) in enumerate(zip(q.arrows, self.maps)):
            if M.shape != (self.dims[t], self.dims[s]):
                raise ValidationError(f"arrow {ai}: matrix shape {M.shape} but expected "
                                      f"{(self.dims[t], self.dims[s])}")
            if M.field != self.field:
                raise ValidationError(f"arrow {ai}: matrix over the wrong field")

    @classmethod
    def build(cls, quiver: Quiver, field: Field, dims: Sequence[int], maps: Sequence) -> "Representation":
        dims = tuple(int(d) for d in dims)
        mats = []
        for (s, t), M in zip(quiver.arrows, maps):
            if isinstance(M, Mat):
                mats.append(M)
            elif dims[t] == 0 or dims[s] == 0:
                mats.append(Mat.zeros(field, dims[t], dims[s]))
            else:
                mats.append(Mat.from_rows(field, M))
        if len(mats) != len(quiver.arrows):
            raise ValidationError("one matrix per arrow is required")
        return cls(quiver, field, dims, tuple(mats))

    @classmethod
    def zero(cls, quiver: Quiver, field: Field) -> "Representation":
        return cls.build(quiver, field, [0] * quiver.n, [None] * len(quiver.arrows))

    @classmethod
    def simple(cls, quiver: Quiver, field: Field, v: int) -> "Representation":
        dims = [0] * quiver.n
        dims[v] = 1
        return cls.build(quiver, field, dims, [None] * len(quiver.arrows))

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def path_map(self, path: Sequence[int], start: int) -> Mat:
        M = Mat.identity(self.field, self.dims[start])
        for ai in path:
            M = self.maps[ai] @ M
        return M

    def key(self):
        return (self.quiver.key(), self.field.key(), self.dims, tuple(M.key() for M in self.maps))

    def __eq__(self, other):
        return isinstance(other, Representation) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json(self) -> dict:
        out = {"quiver": self.quiver.to_json(),
               "dims": {v: d for v, d in zip(self.quiver.vertices, self.dims)},
               "maps": {str(i): M.to_json() for i, M in enumerate(self.maps)},
               "field": self.field.name}
        if self.field.p is not None:
            out["p"] = self.field.p
        return out

    @classmethod
    def from_json(cls, data: dict, quiver: Quiver | None = None) -> "Representation":
        q = quiver or Quiver.from_json(data["quiver"])
        F = field_from_name(data.get("field", "Q"), data.get("p"))
        dd = data["dims"]
        if isinstance(dd, dict):
            dims = [int(dd.get(v, 0)) for v in q.vertices]
        else:
            dims = [int(x) for x in dd]
        raw = data.get("maps", {})
        maps = []
        for ai, (s, t) in enumerate(q.arrows):
            M = raw.get(str(ai)) if isinstance(raw, dict) else raw[ai]
            if M is None or dims[s] == 0 or dims[t] == 0:
                if M is not None and any(len(r) for r in M) and (dims[s] == 0 or dims[t] == 0):
                    raise ValidationError(f"arrow {ai}: nonempty matrix for a zero space")
                maps.append(Mat.zeros(F, dims[t], dims[s]))
            else:
                maps.append(Mat.from_rows(F, M))
        return cls.build(q, F, dims, maps)

    def __repr__(self):
        return f"Representation(dims={self.dims}, maps={[M.to_json() for M in self.maps]}, field={self.field!r})"


@dataclass(frozen=True, eq=False)
class RepMorphism:
    source: Representation
    target: Representation
    mats: tuple[Mat, ...]

    def __post_init__(self):
        E, F = self.source, self.target
        if E.quiver != F.quiver or E.field != F.field:
            raise ValidationError("morphism between representations of different quivers or fields")
        for v, M in enumerate(self.mats):
            if M.shape != (F.dims[v], E.dims[v]):
                raise ValidationError(f"vertex {v}: morphism matrix has shape {M.shape}")
        for ai, (s, t) in enumerate(E.quiver.arrows):
            if not (F.maps[ai] @ self.mats[s] == self.mats[t] @ E.maps[ai]):
                raise ValidationError(f"morphism does not commute with arrow {ai}")

    @classmethod
    def identity(cls, E: Representation) -> "RepMorphism":
        return cls(E, E, tuple(Mat.identity(E.field, d) for d in E.dims))

    @classmethod
    def zero(cls, E: Representation, F: Representation) -> "RepMorphism":
        return cls(E, F, tuple(Mat.zeros(E.field, F.dims[v], E.dims[v]) for v in range(E.quiver.n)))

    def compose(self, other: "RepMorphism") -> "RepMorphism":
        """self after other."""
        return RepMorphism(other.source, self.target, tuple(a @ b for a, b in zip(self.mats, other.mats)))

    def __add__(self, other: "RepMorphism") -> "RepMorphism":
        return RepMorphism(self.source, self.target, tuple(a + b for a, b in zip(self.mats, other.mats)))

    def scale(self, c) -> "RepMorphism":
        return RepMorphism(self.source, self.target, tuple(a.scale(c) for a in self.mats))

    def is_zero(self) -> bool:
        return all(M.is_zero() for M in self.mats)

    def is_iso(self) -> bool:
        return all(M.is_invertible() for M in self.mats)

    def is_mono(self) -> bool:
        return all(M.rank() == M.ncols for M in self.mats)

    def is_epi(self) -> bool:
        return all(M.rank() == M.nrows for M in self.mats)

    def inverse(self) -> "RepMorphism":
        return RepMorphism(self.target, self.source, tuple(M.inverse() for M in self.mats))

    def to_json(self) -> dict:
        q = self.source.quiver
        return {"maps": {q.vertices[v]: M.to_json() for v, M in enumerate(self.mats)}}

    @classmethod
    def from_json(cls, data: dict, source: Representation, target: Representation) -> "RepMorphism":
        q = source.quiver
        raw = data.get("maps", data)
        mats = []
        for v, name in enumerate(q.vertices):
            M = raw.get(name) if isinstance(raw, dict) else raw[v]
            if M is None or source.dims[v] == 0 or target.dims[v] == 0:
                mats.append(Mat.zeros(source.field, target.dims[v], source.dims[v]))
            else:
                mats.append(Mat.from_rows(source.field, M))
        return cls(source, target, tuple(mats))


def _vec_basis(M: Mat) -> Mat:
    """Row-major vectorisation of M as a column."""
    return Mat.from_flat(M.field, M.nrows * M.ncols, 1, M.flat())


def _hom_system(E: Representation, F: Representation) -> tuple[Mat, list[int]]:
    q = E.quiver
    Fld = E.field
    offsets = []
    off = 0
    for v in range(q.n):
        offsets.append(off)
        off += F.dims[v] * E.dims[v]
    blocks = []
    for ai, (s, t) in enumerate(q.arrows):
        nrow = F.dims[t] * E.dims[s]
        if nrow == 0:
            continue
        row = Mat.zeros(Fld, nrow, off)
        left = Mat.kron(F.maps[ai], Mat.identity(Fld, E.dims[s]))
        right = Mat.kron(Mat.identity(Fld, F.dims[t]), E.maps[ai].T)
        parts = []
        for v in range(q.n):
            w = F.dims[v] * E.dims[v]
            blk = Mat.zeros(Fld, nrow, w)
            if v == s:
                blk = blk + left
            if v == t:
                blk = blk - right
            parts.append(blk)
        blocks.append(Mat.hstack(Fld, parts, nrow))
    system = Mat.vstack(Fld, blocks, off) if blocks else Mat.zeros(Fld, 0, off)
    return system, offsets


def hom_space(E: Representation, F: Representation) -> list[RepMorphism]:
    """A basis of Hom(E, F), by solving the commutation equations."""
    if E.quiver != F.quiver or E.field != F.field:
        raise ValidationError("hom_space: quiver or field mismatch")
    system, offsets = _hom_system(E, F)
    K = system.kernel()
    out = []
    q = E.quiver
    for j in range(K.ncols):
        col = K.column(j).flat()
        mats = []
        for v in range(q.n):
            a, b = F.dims[v], E.dims[v]
            mats.append(Mat.from_flat(E.field, a, b, col[offsets[v]:offsets[v] + a * b]))
        out.append(RepMorphism(E, F, tuple(mats)))
    return out


def hom_dim(E: Representation, F: Representation) -> int:
    system, _ = _hom_system(E, F)
    return system.ncols - system.rank()


def morphism_coordinates(basis: Sequence[RepMorphism], fs: Sequence[RepMorphism]) -> Mat:
    """Coordinates of morphisms fs in a basis of a hom space (columns)."""
    if not basis:
        F = fs[0].source.field if fs else QQ
        return Mat.zeros(F, 0, len(fs))
    Fld = basis[0].source.field
    B = Mat.hstack(Fld, [_flatten_morphism(b) for b in basis])
    X = B.solve(Mat.hstack(Fld, [_flatten_morphism(f) for f in fs], B.nrows))
    if X is None:
        raise ValueError("morphism not in the span of the basis")
    return X


def _flatten_morphism(f: RepMorphism) -> Mat:
    flat = []
    for M in f.mats:
        flat.extend(M.flat())
    return Mat.from_flat(f.source.field, len(flat), 1, flat)


def ext1_dim(E: Representation, F: Representation) -> int:
    """dim Ext^1(E, F) from the standard two-term projective resolution."""
    return ext1_via_resolution(E, F)


# --- direct sums, subobjects and quotients ---

def direct_sum(reps: Sequence[Representation], quiver: Quiver | None = None,
               field: Field | None = None) -> tuple[Representation, list[RepMorphism], list[RepMorphism]]:
    """Direct sum with inclusions and projections."""
    reps = list(reps)
    if not reps:
        if quiver is None or field is None:
            raise ValueError("empty direct sum needs a quiver and field")
        Z = Representation.zero(quiver, field)
        return Z, [], []
    q, Fld = reps[0].quiver, reps[0].field
    dims = tuple(sum(R.dims[v] for R in reps) for v in range(q.n))
    maps = tuple(Mat.block_diag(Fld, [R.maps[ai] for R in reps]) for ai in range(len(q.arrows)))
    S = Representation(q, Fld, dims, maps)
    incs, projs = [], []
    offs = [0] * q.n
    for R in reps:
        imats, pmats = [], []
        for v in range(q.n):
            cols = list(range(offs[v], offs[v] + R.dims[v]))
            I = Mat.unit_columns(Fld, dims[v], cols)
            imats.append(I)
            pmats.append(I.T)
        incs.append(RepMorphism(R, S, tuple(imats)))
        projs.append(RepMorphism(S, R, tuple(pmats)))
        for v in range(q.n):
            offs[v] += R.dims[v]
    return S, incs, projs


def direct_sum_morphism(fs: Sequence[RepMorphism]) -> RepMorphism:
    src, _, _ = direct_sum([f.source for f in fs])
    tgt, _, _ = direct_sum([f.target for f in fs])
    q = src.quiver
    return RepMorphism(src, tgt, tuple(Mat.block_diag(src.field, [f.mats[v] for f in fs]) for v in range(q.n)))


@dataclass(frozen=True, eq=False)
class Subobject:
    """A subrepresentation given by a canonical basis (columns) at each vertex."""

    ambient: Representation
    bases: tuple[Mat, ...]

    @classmethod
    def from_spans(cls, E: Representation, spans: Sequence[Mat], check: bool = True) -> "Subobject":
        bases = tuple(S.colspace() for S in spans)
        sub = cls(E, bases)
        if check and not sub.is_closed():
            raise ValidationError("subspaces are not closed under the arrow maps")
        return sub

    @classmethod
    def whole(cls, E: Representation) -> "Subobject":
        return cls(E, tuple(Mat.identity(E.field, d) for d in E.dims))

    @classmethod
    def zero(cls, E: Representation) -> "Subobject":
        return cls(E, tuple(Mat.zeros(E.field, d, 0) for d in E.dims))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(B.ncols for B in self.bases)

    def is_closed(self) -> bool:
        E = self.ambient
        return all(contains(self.bases[t], E.maps[ai] @ self.bases[s])
                   for ai, (s, t) in enumerate(E.quiver.arrows))

    def key(self):
        return tuple(B.key() for B in self.bases)

    def __eq__(self, other):
        return isinstance(other, Subobject) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def contains(self, other: "Subobject") -> bool:
        return all(contains(a, b) for a, b in zip(self.bases, other.bases))

    def join(self, other: "Subobject") -> "Subobject":
        E = self.ambient
        return Subobject(E, tuple(span(E.field, E.dims[v], [a, b])
                                  for v, (a, b) in enumerate(zip(self.bases, other.bases))))

    def meet(self, other: "Subobject") -> "Subobject":
        return Subobject(self.ambient, tuple(intersect(a, b).colspace() if a.ncols and b.ncols
                                             else Mat.zeros(a.field, a.nrows, 0)
                                             for a, b in zip(self.bases, other.bases)))

    def rep(self) -> Representation:
        E = self.ambient
        maps = []
        for ai, (s, t) in enumerate(E.quiver.arrows):
            X = self.bases[t].solve(E.maps[ai] @ self.bases[s])
            if X is None:
                raise ValidationError("subspaces are not closed under the arrow maps")
            maps.append(X)
        return Representation(E.quiver, E.field, self.dims, tuple(maps))

    def inclusion(self) -> RepMorphism:
        return RepMorphism(self.rep(), self.ambient, self.bases)

    def quotient(self) -> tuple[Representation, RepMorphism]:
        """Quotient representation and the projection onto it."""
        E = self.ambient
        projs = [B.cokernel_projection() if B.ncols else Mat.identity(E.field, B.nrows) for B in self.bases]
        sections = []
        for P in projs:
            if P.nrows == 0:
                sections.append(Mat.zeros(E.field, P.ncols, 0))
            else:
                sections.append(P.right_inverse())
        maps = tuple(projs[t] @ E.maps[ai] @ sections[s] for ai, (s, t) in enumerate(E.quiver.arrows))
        Q = Representation(E.quiver, E.field, tuple(P.nrows for P in projs), maps)
        return Q, RepMorphism(E, Q, tuple(projs))

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "bases": [B.to_json() for B in self.bases]}


def image_subobject(f: RepMorphism) -> Subobject:
    return Subobject(f.target, tuple(M.colspace() for M in f.mats))


def kernel_subobject(f: RepMorphism) -> Subobject:
    return Subobject(f.source, tuple(M.kernel().colspace() for M in f.mats))


@dataclass
class KernelCokernel:
    kernel: Representation
    kernel_inclusion: RepMorphism
    cokernel: Representation
    cokernel_projection: RepMorphism
    image: Representation
    image_inclusion: RepMorphism


def mor_kernel_cokernel(f: RepMorphism) -> KernelCokernel:
    """Kernel, image and cokernel with the two short exact sequences verified."""
    ker = kernel_subobject(f)
    img = image_subobject(f)
    K, kinc = ker.rep(), ker.inclusion()
    I, iinc = img.rep(), img.inclusion()
    C, cproj = img.quotient()
    # 0 -> ker -> E -> im -> 0 and 0 -> im -> F -> coker -> 0
    if not f.compose(kinc).is_zero() or not cproj.compose(iinc).is_zero():
        raise AssertionError("kernel/cokernel composition check failed")
    for v in range(f.source.quiver.n):
        if kinc.mats[v].ncols + iinc.mats[v].ncols != f.source.dims[v]:
            raise AssertionError("kernel/image dimension check failed")
        if iinc.mats[v].ncols + cproj.mats[v].nrows != f.target.dims[v]:
            raise AssertionError("image/cokernel dimension check failed")
    return KernelCokernel(K, kinc, C, cproj, I, iinc)


# --- projective resolution and Ext^1 ---

@dataclass
class ProjectiveResolution:
    P1: Representation
    P0: Representation
    d: RepMorphism
    augmentation: RepMorphism
    index0: dict = dc_field(default_factory=dict)
    index1: dict = dc_field(default_factory=dict)


def projective_rep(q: Quiver, field: Field, v: int) -> tuple[Representation, dict[int, list[tuple[int, ...]]]]:
    paths = q.paths_from(v)
    dims = [len(paths[w]) for w in range(q.n)]
    maps = []
    for ai, (s, t) in enumerate(q.arrows):
        M = [[0] * dims[s] for _ in range(dims[t])]
        for j, p in enumerate(paths[s]):
            M[paths[t].index(p + (ai,))][j] = 1
        maps.append(Mat.from_rows(field, M, dims[s]) if dims[t] else Mat.zeros(field, 0, dims[s]))
    return Representation.build(q, field, dims, maps), paths


def standard_resolution(E: Representation) -> ProjectiveResolution:
    """0 -> sum_a P_t(a) (x) E_s(a) -> sum_v P_v (x) E_v -> E -> 0."""
    q, Fld = E.quiver, E.field
    proj = [projective_rep(q, Fld, v) for v in range(q.n)]

    def tensor(terms):
        # terms: list of (vertex v, multiplicity m); basis at w: (term idx, path, copy)
        reps = []
        for v, m in terms:
            reps.extend([proj[v][0]] * m)
        S, _, _ = direct_sum(reps, q, Fld)
        index = {}
        for w in range(q.n):
            pos = 0
            for ti, (v, m) in enumerate(terms):
                for c in range(m):
                    for p in proj[v][1][w]:
                        index[(w, ti, c, p)] = pos
                        pos += 1
        return S, index

    P0, idx0 = tensor([(v, E.dims[v]) for v in range(q.n)])
    P1, idx1 = tensor([(t, E.dims[s]) for (s, t) in q.arrows])
    aug = []
    for w in range(q.n):
        cols = [None] * P0.dims[w]
        for (ww, ti, c, p), pos in idx0.items():
            if ww != w:
                continue
            cols[pos] = E.path_map(p, ti).column(c).flat()
        aug.append(Mat.from_columns(Fld, cols, E.dims[w]) if cols else Mat.zeros(Fld, E.dims[w], 0))
    dmats = []
    for w in range(q.n):
        M = [[Fld(0)] * P1.dims[w] for _ in range(P0.dims[w])]
        for (ww, ai, c, p), pos in idx1.items():
            if ww != w:
                continue
            s, t = q.arrows[ai]
            M[idx0[(w, s, c, (ai,) + p)]][pos] += 1
            col = E.maps[ai].column(c).flat()
            for k, val in enumerate(col):
                if val:
                    r = idx0[(w, t, k, p)]
                    M[r][pos] = Fld(M[r][pos] - val)
        dmats.append(Mat.from_rows(Fld, M, P1.dims[w]) if P0.dims[w] else Mat.zeros(Fld, 0, P1.dims[w]))
    d = RepMorphism(P1, P0, tuple(dmats))
    eps = RepMorphism(P0, E, tuple(aug))
    if not eps.compose(d).is_zero():
        raise AssertionError("resolution is not a complex")
    for w in range(q.n):
        if d.mats[w].rank() != P1.dims[w] or eps.mats[w].rank() != E.dims[w]:
            raise AssertionError("resolution is not exact at the ends")
        if P1.dims[w] + E.dims[w] != P0.dims[w]:
            raise AssertionError("resolution is not exact in the middle")
    return ProjectiveResolution(P1, P0, d, eps, idx0, idx1)


def resolution_morphism(rx: ProjectiveResolution, ry: ProjectiveResolution, f: RepMorphism
                        ) -> tuple[RepMorphism, RepMorphism]:
    """The maps P0(f), P1(f) induced by f on standard resolutions (the construction is functorial)."""
    q = f.source.quiver
    Fld = f.source.field
    out = []
    for P_src, P_tgt, isrc, itgt, vert_of in (
            (rx.P0, ry.P0, rx.index0, ry.index0, lambda ti: ti),
            (rx.P1, ry.P1, rx.index1, ry.index1, lambda ti: q.arrows[ti][0])):
        mats = []
        for w in range(q.n):
            M = [[Fld(0)] * P_src.dims[w] for _ in range(P_tgt.dims[w])]
            for (ww, ti, c, p), pos in isrc.items():
                if ww != w:
                    continue
                col = f.mats[vert_of(ti)].column(c).flat()
                for k, val in enumerate(col):
                    if val:
                        M[itgt[(w, ti, k, p)]][pos] = val
            mats.append(Mat.from_rows(Fld, M, P_src.dims[w]) if P_tgt.dims[w] else Mat.zeros(Fld, 0, P_src.dims[w]))
        out.append(RepMorphism(P_src, P_tgt, tuple(mats)))
    return out[0], out[1]


def ext1_via_resolution(E: Representation, F: Representation) -> int:
    """dim Ext^1(E,F) = dim coker(Hom(P0,F) -> Hom(P1,F)) using an explicit resolution of E."""
    res = standard_resolution(E)
    H0 = hom_space(res.P0, F)
    H1 = hom_space(res.P1, F)
    if not H1:
        return 0
    if not H0:
        return len(H1)
    images = [g.compose(res.d) for g in H0]
    coords = morphism_coordinates(H1, images)
    return len(H1) - coords.rank()


# --- exhaustive subrepresentation enumeration over F_p ---

@lru_cache(maxsize=None)
def _subspace_table(p: int, n: int):
    """All subspaces of F_p^n: list of (RREF rows, member bitmask), ordered by dimension."""
    vec_index = lambda v: sum(c * p ** i for i, c in enumerate(v))
    out = []
    for k in range(n + 1):
        for pivots in itertools.combinations(range(n), k):
            free = [(r, j) for r, c in enumerate(pivots) for j in range(c + 1, n) if j not in pivots]
            for vals in itertools.product(range(p), repeat=len(free)):
                rows = [[0] * n for _ in range(k)]
                for r, c in enumerate(pivots):
                    rows[r][c] = 1
                for (r, j), x in zip(free, vals):
                    rows[r][j] = x
                mask = 0
                for coefs in itertools.product(range(p), repeat=k):
                    v = [sum(coefs[r] * rows[r][i] for r in range(k)) % p for i in range(n)]
                    mask |= 1 << vec_index(v)
                out.append((tuple(tuple(r) for r in rows), mask))
    return out


def _map_table(M: Mat, p: int) -> list[int]:
    n, m = M.ncols, M.nrows
    rows = M.rows()
    table = []
    for idx in range(p ** n):
        v = [(idx // p ** i) % p for i in range(n)]
        w = [sum(rows[r][i] * v[i] for i in range(n)) % p for r in range(m)]
        table.append(sum(c * p ** i for i, c in enumerate(w)))
    return table


def grassmannian_count(p: int, n: int) -> int:
    total = 0
    for k in range(n + 1):
        num = den = 1
        for i in range(k):
            num *= p ** (n - i) - 1
            den *= p ** (i + 1) - 1
        total += num // den
    return total


class SubrepLattice:
    """All subrepresentations of a representation over F_p, found by a filtered product search."""

    def __init__(self, E: Representation, bound: int = 8):
        if E.field.p is None:
            raise ValidationError("exhaustive subrepresentation search needs a prime field")
        if E.total_dim > bound:
            estimate = 1
            for d in E.dims:
                estimate *= grassmannian_count(E.field.p, d)
            raise SizeBoundError(f"total dimension {E.total_dim} exceeds bound {bound}; "
                                 f"product-of-Grassmannians size {estimate}")
        self.rep = E
        p = E.field.p
        q = E.quiver
        self.tables = [_subspace_table(p, d) for d in E.dims]
        img_masks = []
        for ai, (s, t) in enumerate(q.arrows):
            mt = _map_table(E.maps[ai], p)
            masks = []
            for rows, mask in self.tables[s]:
                im = 0
                m = mask
                while m:
                    low = m & -m
                    im |= 1 << mt[low.bit_length() - 1]
                    m ^= low
                masks.append(im)
            img_masks.append(masks)
        self.tuples: list[tuple[int, ...]] = []
        choice = [0] * q.n

        def rec(pos: int):
            if pos == q.n:
                self.tuples.append(tuple(choice))
                return
            w = q.order[pos]
            req = 0
            for ai, (s, t) in enumerate(q.arrows):
                if t == w:
                    req |= img_masks[ai][choice[s]]
            for i, (_, mask) in enumerate(self.tables[w]):
                if req & ~mask == 0:
                    choice[w] = i
                    rec(pos + 1)

        rec(0)
        self._bases: dict[tuple[int, ...], Subobject] = {}

    def __len__(self) -> int:
        return len(self.tuples)

    def dims(self, tup: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(len(self.tables[v][i][0]) for v, i in enumerate(tup))

    def mask(self, tup: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(self.tables[v][i][1] for v, i in enumerate(tup))

    def subobject(self, tup: tuple[int, ...]) -> Subobject:
        sub = self._bases.get(tup)
        if sub is None:
            E = self.rep
            bases = []
            for v, i in enumerate(tup):
                rows = self.tables[v][i][0]
                if rows:
                    bases.append(Mat.from_rows(E.field, rows).T)
                else:
                    bases.append(Mat.zeros(E.field, E.dims[v], 0))
            sub = Subobject(E, tuple(bases))
            self._bases[tup] = sub
        return sub

    def index_of(self, sub: Subobject) -> tuple[int, ...]:
        """Locate a subobject by its member sets."""
        tup = []
        for v, B in enumerate(sub.bases):
            rows = tuple(tuple(int(x) for x in r) for r in B.T.rows()) if B.ncols else ()
            for i, (rr, _) in enumerate(self.tables[v]):
                if rr == rows:
                    tup.append(i)
                    break
            else:
                raise KeyError("subspace not canonical")
        return tuple(tup)

    def contains(self, big: tuple[int, ...], small: tuple[int, ...]) -> bool:
        return all(self.tables[v][small[v]][1] & ~self.tables[v][big[v]][1] == 0 for v in range(len(big)))

    def meet(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        out = []
        for v in range(len(a)):
            m = self.tables[v][a[v]][1] & self.tables[v][b[v]][1]
            out.append(self._by_mask(v, m))
        return tuple(out)

    def join(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return self.index_of(self.subobject(a).join(self.subobject(b)))

    def _by_mask(self, v: int, m: int) -> int:
        cache = getattr(self, "_mask_index", None)
        if cache is None:
            cache = self._mask_index = [{mask: i for i, (_, mask) in enumerate(t)} for t in self.tables]
        return cache[v][m]


def subrep_enumerate(E: Representation, bound: int = 8) -> list[tuple[tuple[int, ...], RepMorphism]]:
    """(dimension vector, inclusion) for every subrepresentation of E over F_p."""
    lat = SubrepLattice(E, bound)
    return [(lat.dims(t), lat.subobject(t).inclusion()) for t in lat.tuples]


# --- reduction modulo a good prime ---

def all_path_maps(E: Representation) -> list[tuple[int, tuple[int, ...], Mat]]:
    q = E.quiver
    out = []
    for v in range(q.n):
        for w, ps in q.paths_from(v).items():
            for p in ps:
                if p:
                    out.append((v, p, E.path_map(p, v)))
    return out


def reduce_mod_prime(E: Representation, start: int | None = None, max_tries: int = 50
                     ) -> tuple[Representation, dict]:
    """Reduce a Q-representation modulo the first prime >= start preserving all path-map ranks."""
    if E.field.p is not None:
        return E, {"reduction": None}
    p = start or default_prime()
    paths = all_path_maps(E)
    tried = []
    for _ in range(max_tries):
        if all(p % d for d in range(2, int(p ** 0.5) + 1)):
            Fp = GF(p)
            ok = True
            try:
                red = Representation(E.quiver, Fp, E.dims,
                                     tuple(Mat.from_rows(Fp, M.rows(), M.ncols) if M.nrows else
                                           Mat.zeros(Fp, 0, M.ncols) for M in E.maps))
            except ZeroDivisionError:
                ok = False
            if ok:
                for v, pth, M in paths:
                    Mr = red.path_map(pth, v)
                    if Mr.rank() != M.rank():
                        ok = False
                        break
            if ok:
                return red, {"reduction": {"prime": p, "rejected": tried,
                                           "checked_path_maps": len(paths)}}
            tried.append(p)
        p += 1
    raise ValidationError("no good prime found")
