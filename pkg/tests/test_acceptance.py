"""Acceptance criteria at full size; each test records one PASS/FAIL line.

Run directly (`python tests/test_acceptance.py`) to print just the lines.
"""

import pytest

from hearthkit import checks

LINES: list[str] = []


@pytest.fixture(scope="module")
def cv_objects():
    return checks.cv_corpus(12)


@pytest.fixture(scope="module")
def cv_complexes():
    return checks.complex_corpus((6, 4))


def _record(result):
    LINES.append(result.line())
    print(result.line())
    assert result.passed, result.failures[:3]


def test_01_hn_matches_exhaustive_oracle():
    _record(checks.check_hn_oracle(reps=200, charges=5))


def test_02_euler_form_identity():
    _record(checks.check_euler_form(pairs=100))


def test_03_phi_psi_identity(cv_objects):
    _record(checks.check_phi_psi(cv_objects))


def test_04_heart_twist_crosscheck(cv_objects):
    _record(checks.check_heart_twist(cv_objects, n_max=6))


def test_05_stabilization_bound(cv_complexes):
    _record(checks.check_stabilization(cv_complexes, confirm=5, bound=20))


def test_06_degree_inclusions(cv_objects, cv_complexes):
    _record(checks.check_inclusions([(M.r, M) for M in cv_objects] + cv_complexes, n_max=6))


def test_07_hilbert_bound_soundness():
    _record(checks.check_hilbert_bound(count=50, window=12))


def test_08_modification_laws():
    _record(checks.check_modifications(count=50))


def test_09_valuative_suite():
    _record(checks.check_valuative(count=30, max_degree=4))


def test_10_discreteness():
    _record(checks.check_discreteness(charges=20, radius=10))


def test_11_line_cohomology_oracle():
    _record(checks.check_line_cohomology())


if __name__ == "__main__":
    for r in checks.run_all():
        print(r.line())
