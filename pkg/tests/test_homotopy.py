import random

from hypothesis import given, strategies as st

from hearthkit.corpus import random_kronecker, random_morphism
from hearthkit.homotopy import ChainMap, Complex, cone, cone_les_exact, convolution, ext_dims, rhom_direct
from hearthkit.linalg import GF, QQ, Mat
from hearthkit.quiver import RepMorphism, Representation, kronecker_quiver, mor_kernel_cokernel, point_quiver

K = kronecker_quiver()
P = point_quiver()


def indec11():
    return Representation.build(K, QQ, [1, 1], [[[1]], [[0]]])


def ident(E):
    return RepMorphism(E, E, tuple(Mat.identity(E.field, d) for d in E.dims))


def two_term(f, low=0):
    return Complex(f.source.quiver, f.source.field, {low: f.source, low + 1: f.target}, {low: f})


def test_single_object():
    E = indec11()
    prof = Complex.single(E).cohomology()
    assert prof.dims() == {0: (1, 1)}


def test_identity_is_acyclic():
    E = Representation.build(P, QQ, [1], [])
    assert two_term(ident(E)).is_acyclic()


def test_projection_complex():
    A = Representation.build(P, QQ, [2], [])
    B = Representation.build(P, QQ, [1], [])
    f = RepMorphism(A, B, (Mat.from_rows(QQ, [[1, 0]]),))
    assert two_term(f, -1).cohomology().dims() == {-1: (1,)}


def test_cones():
    E = indec11()
    assert cone(ChainMap(Complex.single(E), Complex.single(E), {0: ident(E)})).is_acyclic()
    S1 = Representation.simple(K, QQ, 0)
    z = ChainMap(Complex.single(E), Complex.single(S1), {0: RepMorphism.zero(E, S1)})
    assert cone(z).cohomology().dims() == {-1: (1, 1), 0: (1, 0)}
    S2 = Representation.simple(K, QQ, 1)
    inc = RepMorphism(S2, E, (Mat.zeros(QQ, 1, 0), Mat.identity(QQ, 1)))
    C = cone(ChainMap(Complex.single(S2), Complex.single(E), {0: inc}))
    assert C.cohomology().dims() == {0: (1, 0)}


def test_convolution_examples():
    E = indec11()
    assert convolution(Complex.single(E)).cohomology().dims() == {0: (1, 1)}
    assert convolution(two_term(ident(E))).is_zero()


def test_hom_degrees():
    S1, S2 = Representation.simple(K, QQ, 0), Representation.simple(K, QQ, 1)
    assert ext_dims(Complex.single(S1), Complex.single(S1)) == {0: 1}
    assert ext_dims(Complex.single(S1), Complex.single(S2)) == {1: 2}
    assert -1 not in ext_dims(Complex.single(indec11()), Complex.single(S2))


def random_complex(rng, F):
    E, G = random_kronecker(rng, F, 2), random_kronecker(rng, F, 2)
    f = random_morphism(rng, E, G)
    if rng.random() < 0.5:
        return two_term(f, rng.randint(-1, 1))
    kc = mor_kernel_cokernel(f)
    low = rng.randint(-1, 0)
    return Complex(K, F, {low: E, low + 1: G, low + 2: kc.cokernel},
                   {low: f, low + 1: kc.cokernel_projection})


@given(st.integers(0, 10 ** 6))
def test_formality_matches_direct_rhom(seed):
    rng = random.Random(seed)
    A, B = random_complex(rng, GF(5)), random_complex(rng, GF(5))
    assert ext_dims(A, B) == rhom_direct(A, B)


@given(st.integers(0, 10 ** 6))
def test_cone_long_exact_sequence(seed):
    rng = random.Random(seed)
    E, G = random_kronecker(rng, QQ, 4), random_kronecker(rng, QQ, 4)
    f = random_morphism(rng, E, G)
    assert cone_les_exact(ChainMap(Complex.single(E), Complex.single(G), {0: f}))
    C = two_term(f)
    kc = mor_kernel_cokernel(f)
    D = Complex.single(kc.cokernel, 1)
    assert cone_les_exact(ChainMap(C, D, {1: kc.cokernel_projection}))


@given(st.integers(0, 10 ** 6))
def test_euler_characteristic_quasi_invariant(seed):
    rng = random.Random(seed)
    C = random_complex(rng, QQ)
    assert C.euler_characteristic() == convolution(C).euler_characteristic()
