import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hearthkit.arith import ONE, T, ZERO, PolyRat
from hearthkit.corpus import (random_fiber_kernel, random_kronecker_family, random_lattice,
                              random_punctured_family)
from hearthkit.errors import ValidationError
from hearthkit.families import (Family, FamilyComplex, FamilyMorphism, PuncturedFamily, base_change_sqrt,
                                complex_from_json, elementary_modification, extend_family, extend_morphism,
                                fiber_at, heart_membership, modification_chain, polystable_replacement,
                                reverse_modification, support_doubling, tensor_free, torsion_subobject)
from hearthkit.linalg import QQ, Mat
from hearthkit.polymat import MatrixPoly
from hearthkit.quiver import Representation, Subobject, kronecker_quiver, point_quiver
from hearthkit.stability import CentralCharge, is_polystable, s_equivalent

K = kronecker_quiver()
P = point_quiver()
Z = CentralCharge.of(K, [-1, -1])
ZP = CentralCharge.of(P, [-1])


def R(n=1):
    return Family.free(P, [n], [])


def R_plus_torsion():
    # R (+) R/(t): two generators, one relation t*e2
    return Family(P, [2], [MatrixPoly([[ZERO], [T]])], [])


def kron(a, b):
    return Family.free(K, [1, 1], [[[a]], [[b]]])


def indec11():
    return Representation.build(K, QQ, [1, 1], [[[1]], [[0]]])


def test_fiber_examples():
    f = fiber_at(R(), 0)
    assert f.H0.dims == (1,) and f.Hminus1.dims == (0,)
    f = fiber_at(R_plus_torsion(), 0)
    assert f.H0.dims == (2,) and f.Hminus1.dims == (1,)
    tors = Family(P, [1], [MatrixPoly([[T]])], [])
    f = fiber_at(tors, 1)
    assert f.H0.dims == (0,) and f.Hminus1.dims == (0,)


def test_torsion_examples():
    rep = torsion_subobject(R_plus_torsion())
    assert rep.torsion.generic_dims() == (0,) and rep.quotient.is_free() and rep.quotient.gens == (1,)
    assert rep.support["points"] == [0]
    assert torsion_subobject(R(2)).torsion.gens == (0,)
    assert torsion_subobject(kron(ONE, T)).torsion.gens == (0, 0)


def test_extend_examples():
    ext = extend_family(PuncturedFamily.from_family(R()))
    assert ext.family.is_free() and ext.family.is_t_flat()
    red = PuncturedFamily(P, [1], [MatrixPoly.zeros(1, 0)], [])
    assert extend_family(red).family.gens == (1,)
    EU = PuncturedFamily(K, [1, 1], [MatrixPoly.zeros(1, 0)] * 2,
                         [(MatrixPoly([[ONE]]), 0), (MatrixPoly([[ONE]]), 0)])
    a = extend_family(EU)
    b = extend_family(EU, [[[{"coeffs": [1], "low": -1}]], None])
    fa, fb = fiber_at(a.family, 0), fiber_at(b.family, 0)
    assert a.family.is_t_flat() and b.family.is_t_flat()
    assert s_equivalent(Z, fa.H0, fb.H0)


def test_extend_morphism_examples():
    F = R()
    k, phi = extend_morphism([(MatrixPoly([[ONE]]), 2)], F, F)
    assert k == 2 and phi.mats[0] == MatrixPoly([[ONE]])
    k, _ = extend_morphism([(MatrixPoly([[ONE]]), 0)], F, F)
    assert k == 0
    F2 = R(2)
    k, phi = extend_morphism([(MatrixPoly([[T, T ** 2], [ZERO, ONE]]), 2)], F2, F2)
    assert k == 2 and phi.mats[0] == MatrixPoly([[T, T ** 2], [ZERO, ONE]])


def test_modification_examples():
    step = elementary_modification(R(), Subobject.zero(fiber_at(R(), 0).H0))
    assert step.G.gens == (1,) and all(step.checks.values())
    F = Family.constant(indec11())
    H0 = fiber_at(F, 0).H0
    K2 = Subobject.from_spans(H0, [Mat.zeros(QQ, 1, 0), Mat.identity(QQ, 1)])
    step = elementary_modification(F, K2, Z)
    assert step.G.arrows[1].rows == [[ZERO]] and step.G.arrows[0].rows[0][0].valuation() == 1
    assert fiber_at(step.G, 0).H0.maps[0].is_zero() and step.s_equivalent
    same = elementary_modification(F, Subobject.whole(H0), Z)
    assert same.G.arrows == F.arrows


def test_modification_chain_examples():
    F = R()
    one = modification_chain(FamilyMorphism(F, F, [MatrixPoly([[T]])]))
    assert len(one.steps) == 1 and one.steps[0].Q.dims == (1,)
    two = modification_chain(FamilyMorphism(F, F, [MatrixPoly([[T ** 2]])]))
    assert len(two.steps) == 2 and two.composite_matches
    G, Fc = kron(T, ZERO), kron(ONE, ZERO)
    ch = modification_chain(FamilyMorphism(G, Fc, [MatrixPoly([[T]]), MatrixPoly([[ONE]])]), Z)
    assert len(ch.steps) == 1 and ch.s_equivalent


def test_base_change_examples():
    assert base_change_sqrt(R()).is_free()
    tors = Family(P, [1], [MatrixPoly([[T]])], [])
    f = fiber_at(base_change_sqrt(tors), 0)
    assert f.H0.dims == (1,) and f.Hminus1.dims == (1,)
    bc = base_change_sqrt(kron(ONE, T))
    assert bc.arrows[1] == MatrixPoly([[T ** 2]])


def test_polystable_examples():
    split = Family.free(K, [1, 1], [[], []])
    rep = polystable_replacement(split, Z)
    assert rep.degree == 1 and rep.polystable
    rep = polystable_replacement(Family.constant(indec11()), Z)
    assert rep.degree == 2 and is_polystable(Z, rep.special_fiber)
    assert rep.special_fiber.dims == (1, 1) and rep.special_fiber.maps[0].is_zero()
    assert any(r.get("split_witness") is not None for r in rep.rounds)
    rep = polystable_replacement(R(2), ZP)
    assert rep.degree == 1


def test_heart_membership_examples():
    C = complex_from_json({"terms": {"-1": {"quiver": "point", "modules": {"1": {"gens": 1}}},
                                     "0": {"quiver": "point", "modules": {"1": {"gens": 1}}}},
                           "differentials": {"-1": {"1": [[[0, 1]]]}}})
    h0 = heart_membership(C, 0, ZP)
    assert h0.in_heart_at_s and h0.in_P1_at_s is False
    assert heart_membership(C, 1, ZP).in_heart_at_s
    const = complex_from_json({"terms": {"0": {"quiver": "kronecker", "modules": {"1": {"gens": 1},
                                                                                  "2": {"gens": 1}},
                                               "arrows": {"0": [[[1]]], "1": [[[0]]]}}}})
    h = heart_membership(const, 0, Z)
    assert h.in_P1 and h.bad_set["points"] == [] and h.bad_set["other_factors"] == []
    assert heart_membership(FamilyComplex(P, {}, {}), 0).in_heart_at_s


def test_bad_relations_rejected():
    with pytest.raises(ValidationError):
        Family(P, [1], [MatrixPoly([[T], [ONE]])], [])


seeds = st.integers(0, 10 ** 6)


@given(seeds)
def test_modification_roundtrip_and_involution(seed):
    rng = random.Random(seed)
    F = random_kronecker_family(rng)
    step = elementary_modification(F, random_fiber_kernel(rng, fiber_at(F, 0).H0), Z)
    assert step.checks["roundtrip_F"] and step.checks["roundtrip_G"]
    _, iso = reverse_modification(step)
    assert iso.is_iso()


@settings(max_examples=20)
@given(seeds)
def test_lattices_give_s_equivalent_fibers(seed):
    rng = random.Random(seed)
    EU = random_punctured_family(rng)
    a = extend_family(EU)
    b = extend_family(EU, random_lattice(rng, EU.gens))
    assert s_equivalent(Z, fiber_at(a.family, 0).H0, fiber_at(b.family, 0).H0)


@given(seeds, st.integers(1, 3))
def test_tensor_exactness(seed, n):
    rng = random.Random(seed)
    F = random_kronecker_family(rng)
    if rng.random() < 0.5:
        F = torsion_subobject(F).quotient if F.is_t_flat() else F
    G = tensor_free(F, n)
    assert G.is_t_flat() == F.is_t_flat()
    for s in (0, 1):
        a, b = fiber_at(F, s), fiber_at(G, s)
        assert b.H0.dims == tuple(n * d for d in a.H0.dims)
        assert b.Hminus1.dims == tuple(n * d for d in a.Hminus1.dims)


@given(seeds)
def test_class_constancy(seed):
    F = random_kronecker_family(random.Random(seed), max_deg=2)
    if F.is_t_flat():
        dims = {fiber_at(F, s).H0.dims for s in (0, 1, -1, 2, Fraction(1, 2))}
        assert len(dims) == 1


@given(st.lists(st.integers(0, 3), min_size=1, max_size=3), seeds)
def test_support_doubling(exps, seed):
    rng = random.Random(seed)
    n = len(exps)
    D = MatrixPoly([[T ** e if i == j else ZERO for j in range(n)] for i, e in enumerate(exps)])
    U = MatrixPoly([[ONE if i == j else (PolyRat([rng.randint(-2, 2)]) if j > i else ZERO)
                     for j in range(n)] for i in range(n)])
    d = U @ D
    A, B = R(n), R(n)
    C = FamilyComplex(P, {-1: A, 0: B}, {-1: FamilyMorphism(A, B, [d])})
    rep = support_doubling(C)
    assert rep["d"] == max(exps)
    assert rep["kills_2d"]
