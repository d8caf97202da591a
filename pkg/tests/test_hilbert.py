import random

import pytest
from hypothesis import given, strategies as st

from hearthkit.corpus import random_submodule
from hearthkit.errors import ValidationError
from hearthkit.hilbert import (GradedModule, SubmoduleOfFree, ascending_chain_stabilize,
                               brute_force_generation_degree, chain_union, finite_type_test, generation_bound,
                               leading_terms, submodule_from_json)
from hearthkit.linalg import QQ
from hearthkit.quiver import Representation, point_quiver

k = Representation.build(point_quiver(), QQ, [1], [])


def ideal(d, *monos, window=10):
    return SubmoduleOfFree.ideal(d, window, [{m: 1} for m in monos])


def test_finite_type_examples():
    assert finite_type_test(SubmoduleOfFree.free(1, k, 8)).generation_degree == 0
    assert finite_type_test(ideal(1, (2,), window=8)).generation_degree == 2
    odd = GradedModule.from_json({"d": 1, "window": 8, "components": {str(n): n % 2 for n in range(9)}})
    rep = finite_type_test(odd)
    assert rep.verdict == "unknown" and rep.failures == [0, 2, 4, 6]


def _level_dims(L, i, upto=4):
    return [L.levels[i].dims(n)[0] for n in range(upto)]


def test_leading_terms_examples():
    L = leading_terms(ideal(2, (1, 0)))
    assert L.N1 == 1
    assert _level_dims(L, 0) == [0] * 4 and _level_dims(L, 1) == [1] * 4
    L = leading_terms(SubmoduleOfFree.free(2, k, 10))
    assert L.N1 == 0
    L = leading_terms(ideal(2, (1, 0), (0, 2)))
    assert L.N1 == 1 and _level_dims(L, 0) == [0, 0, 1, 1] and _level_dims(L, 2) == [1] * 4


def test_generation_bound_examples():
    b = generation_bound(ideal(1, (2,)))
    assert b.N >= 2 and b.brute_force == 2
    b = generation_bound(ideal(2, (1, 0), (0, 2)))
    assert (b.N, b.N1, b.N2, b.brute_force) == (3, 1, 2, 2)
    assert generation_bound(SubmoduleOfFree.free(2, k, 10)).N == 0


def test_chain_examples():
    chain = [ideal(1, (j,), window=8) for j in (3, 2, 1, 1)]
    assert ascending_chain_stabilize(chain).index == 3
    assert ascending_chain_stabilize([chain[0]] * 3).index == 1


def test_negative_shift_rejected():
    with pytest.raises(ValidationError):
        submodule_from_json({"d": 1, "window": 4, "shift": -1, "free": True})


def test_json_generators():
    m = submodule_from_json({"d": 2, "window": 8, "generators": [{"terms": [[[1, 0], 1]]},
                                                                   {"terms": [[[0, 2], 1]]}]})
    assert m == ideal(2, (1, 0), (0, 2), window=8)


seeds = st.integers(0, 10 ** 6)


@given(seeds)
def test_bound_is_sound(seed):
    m = random_submodule(random.Random(seed), window=10)
    b = generation_bound(m)
    assert b.N >= brute_force_generation_degree(m)
    assert all(m.surjective_at(n) for n in range(b.N, m.window))


@given(seeds)
def test_bound_shifts_with_grading(seed):
    m = random_submodule(random.Random(seed), window=10)
    assert generation_bound(m.shifted(1)).N == generation_bound(m).N + 1


@given(seeds)
def test_chain_stabilizes_per_degree(seed):
    rng = random.Random(seed)
    a = random_submodule(rng, window=8)
    b = SubmoduleOfFree.generated(a.d, a.F, a.window,
                                  [(n, v, a.bases[n][v].column(j)) for n in range(a.window + 1)
                                   for v in range(a.F.quiver.n) for j in range(a.bases[n][v].ncols)][:3],
                                  a.shift)
    chain = [b, chain_union([a, b]), chain_union([a, b])]
    rep = ascending_chain_stabilize(chain)
    U = chain_union(chain)
    U.check_closed()
    assert all(rep.per_degree[n] <= rep.index for n in rep.per_degree)
    assert all(x.contained_in(U) for x in chain)


@given(seeds)
def test_componentwise_reduction(seed):
    m = random_submodule(random.Random(seed), window=8)
    G = m.as_graded_module()
    for n in range(m.window):
        assert G.surjective_at(n) == all(G.forget(v).surjective_at(n) for v in range(m.F.quiver.n))
        assert m.dims(n) == tuple(m.forget(v).dims(n)[0] for v in range(m.F.quiver.n))
