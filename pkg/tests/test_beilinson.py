import random

import pytest
from hypothesis import given, settings, strategies as st

from hearthkit.beilinson import (CVObject, LineComplex, cv_isomorphism, gamma_cohomology, generator_surjection,
                                 heart_twist_n, in_tstructure_range, koszul_complex, line_cohomology_oracle,
                                 module_MF, n_tstructure_cohomology, phi, phi_psi_witness, psi,
                                 stabilization_bound, twist_T)
from hearthkit.corpus import random_cv_object
from hearthkit.errors import PreconditionError

O1 = CVObject.line_bundle(1, 0)
K01 = CVObject.from_json({"r": 1, "dims": [0, 1]})
K10 = CVObject.from_json({"r": 1, "dims": [1, 0]})
O_minus3 = LineComplex.line_bundle(1, -3)


def test_psi_phi_examples():
    assert psi(CVObject.zero(1)).is_zero()
    assert phi(psi(O1)).dims == (1, 2)
    assert phi(psi(K01)).dims == (0, 1)
    assert phi(LineComplex.line_bundle(1, 1)).dims == (2, 3)
    assert phi(psi(CVObject.zero(2))).is_zero()


def test_twist_examples():
    assert twist_T(K01, 0).dims == (1, 2)
    assert twist_T(K10, 0).is_zero()
    assert twist_T(K10, -1).dims == (0, 1)
    assert twist_T(O1, 0).dims == (2, 3)


def test_koszul_examples():
    assert koszul_complex(CVObject.zero(1)).is_zero()
    assert koszul_complex(O1).cohomology().dims() == {0: (3,)}
    assert koszul_complex(K10).cohomology().dims() == {-1: (1,)}


def test_heart_twist_examples():
    assert heart_twist_n(O1, 1).dims == (3, 4)
    assert heart_twist_n(CVObject.zero(1), 4).is_zero()
    assert heart_twist_n(K01, 2).dims == (3, 4)


def test_gamma_examples():
    O = LineComplex.line_bundle(1, 0)
    assert gamma_cohomology(O, 3).dims == {0: 4}
    assert gamma_cohomology(O, -1).dims == {}
    assert gamma_cohomology(LineComplex.line_bundle(2, 0), 0).dims == {0: 1}
    assert line_cohomology_oracle(1, -3) == {1: 2}


def test_n_tstructure_examples():
    assert set(n_tstructure_cohomology(psi(O1), 0)) == {0}
    assert set(n_tstructure_cohomology(O_minus3, 0)) == {1}
    assert set(n_tstructure_cohomology(O_minus3, 2)) == {0}


def test_stabilization_examples():
    assert stabilization_bound(psi(O1)).N == 0
    assert stabilization_bound(O_minus3).N == 2
    assert stabilization_bound(O_minus3.shift(5)).N == 2


def test_module_examples():
    mf = module_MF(psi(O1))
    assert mf.dims == {1: 2, 2: 3, 3: 4, 4: 5} and mf.generation_degree == 1
    assert module_MF(psi(CVObject.zero(1))).dims == {}
    assert module_MF(O_minus3.twist(2)).generation_degree <= 3


def test_generator_surjection_examples():
    g = generator_surjection(psi(O1))
    assert (g.generator_dim, g.twist) == (2, -1)
    two = psi(CVObject.from_json({"r": 1, "dims": [2, 4], "actions": {"0": [
        [[1, 0], [0, 0], [0, 1], [0, 0]], [[0, 0], [1, 0], [0, 0], [0, 1]]]}}))
    assert generator_surjection(two).generator_dim == 4
    g0 = generator_surjection(psi(O1), min_degree=0)
    assert (g0.generator_dim, g0.twist) == (1, 0)


def test_line_bundle_outside_heart_rejected():
    with pytest.raises(PreconditionError):
        CVObject.line_bundle(1, -2)


def test_projectives_adapted():
    for r in (1, 2):
        for j in range(r + 1):
            P = CVObject.projective(r, j)
            assert all(twist_T(P, i).is_zero() for i in range(-r, 0))


cv = st.builds(lambda seed, r: random_cv_object(random.Random(seed), r, 3),
               st.integers(0, 10 ** 6), st.sampled_from([1, 2]))


@given(cv)
def test_phi_psi_identity(M):
    assert phi_psi_witness(M).is_iso()


def _iso(A, B):
    return A.dims == B.dims and (A.is_zero() or cv_isomorphism(A, B) is not None)


@settings(max_examples=15)
@given(cv)
def test_heart_twist_matches_T0_when_adapted(M):
    # heart_twist_n(M, n) is the (n + r)-fold twist, so n = 1 means r + 1 applications of T_0
    H1 = heart_twist_n(M, 1)
    assert _iso(heart_twist_n(M, 2), twist_T(H1, 0))
    if all(twist_T(M, i).is_zero() for i in range(-M.r, 0)):
        C = M
        for _ in range(M.r + 1):
            C = twist_T(C, 0)
        assert _iso(H1, C)


@given(cv)
def test_koszul_matches_gamma(M):
    kd = {i: d[0] for i, d in koszul_complex(M).cohomology().dims().items()}
    assert kd == gamma_cohomology(psi(M), M.r + 1).dims


@settings(max_examples=8)
@given(cv)
def test_inclusions(M):
    F = psi(M)
    for m in range(3):
        for n in range(m + 1, 4):
            if in_tstructure_range(F, m, None, 0):
                assert in_tstructure_range(F, n, None, 0)
            if in_tstructure_range(F, n, 0, None):
                assert in_tstructure_range(F, m, 0, None)
                assert in_tstructure_range(F, n, -M.r, None)
