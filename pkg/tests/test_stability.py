import random
from fractions import Fraction

from hypothesis import given, strategies as st

from hearthkit.arith import GaussRat
from hearthkit.checks import _heart_charge
from hearthkit.corpus import random_kronecker
from hearthkit.kronecker import preprojective_rep
from hearthkit.linalg import GF, QQ, Mat
from hearthkit.quiver import Representation, Subobject, direct_sum, kronecker_quiver, point_quiver
from hearthkit.stability import (EQ, GT, LT, CentralCharge, chain_monitor, discreteness_report, hn_filtration,
                                 is_polystable, jh_factors, phase_order, s_equivalent)

K = kronecker_quiver()


def g(re, im=0):
    return GaussRat(Fraction(re), Fraction(im))


def indec11(F=QQ):
    return Representation.build(K, F, [1, 1], [[[1]], [[0]]])


def S(v, F=QQ):
    return Representation.simple(K, F, v)


def test_phase_order():
    assert phase_order(g(-5), g(0, 1)) == GT
    assert phase_order(g(0, 2), g(0, 3)) == EQ
    assert phase_order(g(-1, 2), g(-2, 3)) == LT


def test_hn_examples():
    Z = CentralCharge.of(K, [-1, -1])
    assert hn_filtration(Z, indec11()).length == 1
    Z = CentralCharge.of(K, [["0", "1"], -1])
    hn = hn_filtration(Z, indec11())
    assert [list(s.dims) for s in hn.chain] == [[0, 0], [0, 1], [1, 1]]
    assert hn.types() == [((0, 1), g(-1)), ((1, 0), g(0, 1))]
    Z = CentralCharge.of(K, [-1, ["0", "1"]])
    assert hn_filtration(Z, preprojective_rep(QQ, 1)).length == 1


def test_jh_examples():
    Z = CentralCharge.of(K, [-1, -1])
    assert sorted(f.dims for f in jh_factors(Z, indec11()).factors) == [(0, 1), (1, 0)]
    P = point_quiver()
    V = Representation.build(P, QQ, [2], [])
    assert [f.dims for f in jh_factors(CentralCharge.of(P, [-1]), V).factors] == [(1,), (1,)]
    Z = CentralCharge.of(K, [-1, ["0", "1"]])
    assert [f.dims for f in jh_factors(Z, preprojective_rep(QQ, 1)).factors] == [(1, 2)]


def test_s_equivalence_examples():
    Z = CentralCharge.of(K, [-1, -1])
    E = indec11()
    split = direct_sum([S(0), S(1)])[0]
    assert s_equivalent(Z, E, split)
    assert not s_equivalent(Z, S(0), S(1))
    assert s_equivalent(Z, E, E)
    assert is_polystable(Z, split) and not is_polystable(Z, E)


def test_discreteness_examples():
    r = discreteness_report(CentralCharge.of(K, [["1", "2"], ["-3", "1"]]))
    assert r.image_discrete and r.min_positive_im == 1
    r = discreteness_report(CentralCharge.of(K, [-1, ["-1/2", "1/3"]]))
    assert r.im_image_discrete and r.min_positive_im == Fraction(1, 3)
    r = discreteness_report(CentralCharge.of(K, [-1, -2]))
    assert r.im_image_discrete and r.min_positive_im is None


def test_chain_monitor_examples():
    P = point_quiver()
    E = Representation.build(P, QQ, [3], [])
    Z = CentralCharge.of(P, [-1])
    chain = [Subobject.from_spans(E, [Mat.identity(QQ, 3).submatrix(range(3), range(k))]).inclusion()
             for k in (1, 2, 3)]
    rep = chain_monitor(Z, E, chain)
    assert [s["re"] for s in rep.steps] == ["-1", "-2", "-3"]
    assert rep.stabilization_index == 3

    E = preprojective_rep(QQ, 1)
    Z = CentralCharge.of(K, [-1, ["0", "1"]])
    zero = Mat.zeros(QQ, 1, 0)
    chain = [Subobject.from_spans(E, [zero, Mat.from_rows(QQ, [[1], [0]])]).inclusion(),
             Subobject.from_spans(E, [zero, Mat.identity(QQ, 2)]).inclusion(),
             Subobject.whole(E).inclusion()]
    rep = chain_monitor(Z, E, chain)
    assert [s["im"] for s in rep.steps] == ["1", "2", "2"]
    assert [s.get("event") for s in rep.steps[1:]] == ["im-jump", "re-descent"]

    same = [Subobject.whole(E).inclusion()] * 3
    assert chain_monitor(Z, E, same).stabilization_index == 1


def _pair(seed):
    rng = random.Random(seed)
    F = GF(5)
    return rng, random_kronecker(rng, F, 2), random_kronecker(rng, F, 2)


@given(st.integers(0, 10 ** 6))
def test_hn_additive_on_sums(seed):
    rng, E, F = _pair(seed)
    if E.total_dim == 0 or F.total_dim == 0:
        return
    Z = CentralCharge(K, tuple(_heart_charge(rng, 2)))
    total = {}
    for X in (E, F):
        for d, z in hn_filtration(Z, X).types():
            key = hn_phase_key(z)
            total[key] = tuple(a + b for a, b in zip(total.get(key, (0, 0)), d))
    got = {hn_phase_key(z): d for d, z in hn_filtration(Z, direct_sum([E, F])[0]).types()}
    assert got == total


def hn_phase_key(z):
    # normalized ray: direction of z as a reduced rational pair
    from math import gcd
    a, b = z.re, z.im
    den = a.denominator * b.denominator
    x, y = int(a * den), int(b * den)
    d = gcd(x, y) or 1
    return (x // d, y // d)


@given(st.integers(0, 10 ** 6))
def test_hn_see_saw(seed):
    rng, E, _ = _pair(seed)
    if E.total_dim == 0:
        return
    Z = CentralCharge(K, tuple(_heart_charge(rng, 2)))
    hn = hn_filtration(Z, E)
    zE = Z(E.dims)
    A = hn.charges[0]
    B = Z(tuple(a - b for a, b in zip(E.dims, hn.chain[1].dims)))
    assert phase_order(A, zE) != LT
    if hn.length > 1:
        assert phase_order(zE, B) != LT


@given(st.integers(0, 10 ** 6))
def test_jh_class_sum(seed):
    rng = random.Random(seed)
    E = random_kronecker(rng, QQ, 3)
    if E.total_dim == 0:
        return
    Z = CentralCharge.of(K, [-1, -1])
    assert jh_factors(Z, E).class_sum() == E.dims


@given(st.integers(0, 10 ** 6), st.integers(1, 7), st.integers(1, 7))
def test_phase_order_scale_invariant(seed, num, den):
    rng = random.Random(seed)
    a, b = _heart_charge(rng, 2)
    c = GaussRat(Fraction(num, den), Fraction(0))
    assert phase_order(a, b) == phase_order(a * c, b * c)
