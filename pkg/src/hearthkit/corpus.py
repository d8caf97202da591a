"""Seeded generators for the invariant and acceptance suites."""

from __future__ import annotations

import random

from .linalg import QQ, Mat
from .quiver import Representation, RepMorphism, hom_space, kronecker_quiver


def random_matrix(rng: random.Random, field, nrows: int, ncols: int, lo: int = -2, hi: int = 2) -> Mat:
    return Mat.from_flat(field, nrows, ncols, [rng.randint(lo, hi) for _ in range(nrows * ncols)])


def random_kronecker(rng: random.Random, field, max_dim: int = 3) -> Representation:
    d = [rng.randint(0, max_dim), rng.randint(0, max_dim)]
    q = kronecker_quiver()
    p = getattr(field, "p", None)
    hi = (p - 1) if p else 2
    lo = 0 if p else -2
    return Representation.build(q, field, d, [random_matrix(rng, field, d[1], d[0], lo, hi) for _ in range(2)])


def random_morphism(rng: random.Random, E: Representation, F: Representation) -> RepMorphism:
    H = hom_space(E, F)
    f = RepMorphism.zero(E, F)
    for h in H:
        c = rng.randint(-2, 2)
        if c:
            f = f + h.scale(c)
    return f


def random_cv_object(rng: random.Random, r: int, max_dim: int = 3):
    """Random C_V object; for r >= 2 the upper actions are drawn from the commuting solutions."""
    from .beilinson import CVObject
    dims = [rng.randint(0, max_dim) for _ in range(r + 1)]
    acts = [[random_matrix(rng, QQ, dims[1], dims[0]) for _ in range(r + 1)]]
    for i in range(1, r):
        acts.append(_commuting_layer(rng, r, dims[i], dims[i + 1], acts[i - 1]))
    return CVObject.build(r, dims, acts)


def _commuting_layer(rng: random.Random, r: int, d_mid: int, d_out: int, lower: list[Mat]) -> list[Mat]:
    """Random B_0..B_r (d_out x d_mid) with B_k A_l = B_l A_k for the given A's."""
    n = d_out * d_mid
    nvars = (r + 1) * n
    if n == 0:
        return [Mat.zeros(QQ, d_out, d_mid) for _ in range(r + 1)]
    rows = []
    for k in range(r + 1):
        for l in range(k + 1, r + 1):
            Ak, Al = lower[k], lower[l]
            d_in = Ak.ncols
            # (B_k A_l - B_l A_k)[p, q] = sum_m B_k[p, m] A_l[m, q] - B_l[p, m] A_k[m, q]
            for p in range(d_out):
                for q in range(d_in):
                    row = [0] * nvars
                    for m in range(d_mid):
                        row[k * n + p * d_mid + m] += Al[m, q]
                        row[l * n + p * d_mid + m] -= Ak[m, q]
                    rows.append(row)
    if rows:
        K = Mat.from_rows(QQ, rows, nvars).kernel()
    else:
        K = Mat.identity(QQ, nvars)
    coeffs = Mat.from_flat(QQ, K.ncols, 1, [rng.randint(-2, 2) for _ in range(K.ncols)])
    sol = (K @ coeffs).flat()
    return [Mat.from_flat(QQ, d_out, d_mid, sol[k * n:(k + 1) * n]) for k in range(r + 1)]


def random_cv_complex(rng: random.Random, r: int, max_dim: int = 4, max_length: int = 3, lowest: int = 0):
    """Random bounded complex of C_V objects in degrees lowest..lowest+length-1."""
    from .beilinson import cv_hom_space, cv_quiver
    from .homotopy import Complex
    length = rng.randint(1, max_length)
    objs = [random_cv_object(rng, r, max_dim) for _ in range(length)]
    diffs = {}
    prev = None
    for p in range(length - 1):
        H = cv_hom_space(objs[p], objs[p + 1])
        if prev is not None and H:
            # keep only combinations g with g . prev = 0
            cond = Mat.hstack(QQ, [_flatten(h.compose(prev)) for h in H])
            K = cond.kernel()
            H = [_combine(objs[p].rep, objs[p + 1].rep, H, K.column(c).flat()) for c in range(K.ncols)]
        f = _combine(objs[p].rep, objs[p + 1].rep, H, [rng.randint(-2, 2) for _ in H])
        diffs[lowest + p] = f
        prev = f
    return Complex(cv_quiver(r), QQ, {lowest + p: M.rep for p, M in enumerate(objs)}, diffs, hereditary=False)


def _flatten(f: RepMorphism) -> Mat:
    flat = [x for M in f.mats for x in M.flat()]
    return Mat.from_flat(QQ, len(flat), 1, flat)


def _combine(E: Representation, F: Representation, basis, coeffs) -> RepMorphism:
    f = RepMorphism.zero(E, F)
    for c, h in zip(coeffs, basis):
        if c:
            f = f + h.scale(c)
    return f


# --- one-parameter families ---

def random_poly_entry(rng: random.Random, max_deg: int = 1, lo: int = -2, hi: int = 2) -> list[int]:
    return [rng.randint(lo, hi) for _ in range(rng.randint(0, max_deg) + 1)]


def random_poly_matrix(rng: random.Random, nrows: int, ncols: int, max_deg: int = 1):
    from .polymat import MatrixPoly
    return MatrixPoly([[random_poly_entry(rng, max_deg) for _ in range(ncols)] for _ in range(nrows)], ncols)


def random_kronecker_family(rng: random.Random, max_rank: int = 2, max_deg: int = 1):
    """Free Kronecker family with random polynomial arrows (t-flat everywhere)."""
    from .families import Family
    a, b = rng.randint(1, max_rank), rng.randint(1, max_rank)
    return Family.free(kronecker_quiver(), [a, b], [random_poly_matrix(rng, b, a, max_deg) for _ in range(2)])


def random_fiber_kernel(rng: random.Random, E: Representation):
    """Random subrepresentation of E, built from sinks to sources."""
    from .quiver import Subobject
    q = E.quiver
    bases: list[Mat | None] = [None] * q.n
    for v in reversed(q.order):
        cons = []
        for ai, (s, t) in enumerate(q.arrows):
            if s == v and bases[t] is not None and E.dims[t]:
                U = bases[t]
                c = U.cokernel_projection() if U.ncols else Mat.identity(E.field, E.dims[t])
                cons.append(c @ E.maps[ai])
        allowed = Mat.vstack(E.field, cons, E.dims[v]).kernel() if cons else Mat.identity(E.field, E.dims[v])
        k = rng.randint(0, allowed.ncols)
        pick = allowed @ random_matrix(rng, E.field, allowed.ncols, k) if k else Mat.zeros(E.field, E.dims[v], 0)
        bases[v] = pick.colspace()
    return Subobject(E, tuple(bases))


def random_punctured_family(rng: random.Random, max_rank: int = 2, max_deg: int = 1):
    """Free Kronecker family over the punctured line with arrows t^-k * (polynomial matrix)."""
    from .families import PuncturedFamily
    from .polymat import MatrixPoly
    a, b = rng.randint(1, max_rank), rng.randint(1, max_rank)
    arrows = [(random_poly_matrix(rng, b, a, max_deg), rng.randint(0, 1)) for _ in range(2)]
    return PuncturedFamily(kronecker_quiver(), [a, b], [MatrixPoly.zeros(a, 0), MatrixPoly.zeros(b, 0)], arrows)


def random_lattice(rng: random.Random, gens) -> list:
    """Lattice generators c * diag(t^e) with c unipotent over Q and e in {-1, 0, 1}."""
    out = []
    for g in gens:
        es = [rng.randint(-1, 1) for _ in range(g)]
        rows = []
        for i in range(g):
            row = []
            for j in range(g):
                c = 1 if i == j else (rng.randint(-1, 1) if j > i else 0)
                row.append({"coeffs": [c], "low": es[j]} if c else [])
            rows.append(row)
        out.append(rows)
    return out


# --- graded submodules ---

def random_coefficient_object(rng: random.Random, max_dim: int = 2) -> Representation:
    """A point-quiver space or a small Kronecker representation, total dimension <= max_dim."""
    from .quiver import point_quiver
    if rng.random() < 0.5 or max_dim < 2:
        return Representation.build(point_quiver(), QQ, [rng.randint(1, max_dim)], [])
    return Representation.build(kronecker_quiver(), QQ, [1, 1], [random_matrix(rng, QQ, 1, 1) for _ in range(2)])


def random_submodule(rng: random.Random, window: int = 12, max_d: int = 2, max_gens: int = 3, max_deg: int = 3):
    """Submodule of A (x) F generated by a few random homogeneous elements."""
    from .hilbert import SubmoduleOfFree, _ndim
    d = rng.randint(1, max_d)
    F = random_coefficient_object(rng)
    gens = []
    for _ in range(rng.randint(1, max_gens)):
        deg = rng.randint(0, max_deg)
        v = rng.randrange(F.quiver.n)
        n = _ndim(d, deg) * F.dims[v]
        if n == 0:
            continue
        flat = [rng.randint(-2, 2) for _ in range(n)]
        if not any(flat):
            flat[rng.randrange(n)] = 1
        gens.append((deg, v, Mat.from_flat(QQ, n, 1, flat)))
    return SubmoduleOfFree.generated(d, F, window, gens)
