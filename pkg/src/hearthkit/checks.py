"""Seeded invariant suites shared by `hearthkit check` and the acceptance tests.

Each runner returns a CheckResult; `sizes` scales the generated corpora.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb
from typing import Callable

from .arith import GaussRat
from .linalg import GF, QQ
from .quiver import Quiver, euler_form, ext1_via_resolution, hom_dim, kronecker_quiver, SubrepLattice


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    failures: list = dc_field(default_factory=list)
    detail: dict = dc_field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" first failure: {self.failures[0]}" if self.failures else ""
        return f"{status} {self.name}: {self.cases} cases in {self.seconds:.1f}s{extra}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "cases": self.cases,
                "failures": [str(f) for f in self.failures[:5]], "detail": self.detail}


def _timed(name: str, fn: Callable[[], tuple[int, list, dict]]) -> CheckResult:
    t0 = time.perf_counter()
    cases, failures, detail = fn()
    return CheckResult(name, not failures and cases > 0, cases, failures, detail, time.perf_counter() - t0)


# --- stability ---

def _heart_charge(rng: random.Random, n: int) -> list[GaussRat]:
    out = []
    while len(out) < n:
        z = GaussRat(Fraction(rng.randint(-6, 6), rng.randint(1, 3)), Fraction(rng.randint(0, 6), rng.randint(1, 3)))
        if z.im > 0 or (z.im == 0 and z.re < 0):
            out.append(z)
    return out


def check_hn_oracle(reps: int = 200, charges: int = 5, seed: int = 1) -> CheckResult:
    from .corpus import random_kronecker
    from .stability import GT, CentralCharge, hn_exhaustive, hn_filtration, phase_order

    def run():
        rng = random.Random(seed)
        K, F5 = kronecker_quiver(), GF(5)
        fails, n = [], 0
        while n < reps:
            E = random_kronecker(rng, F5, 3)
            if E.is_zero():
                continue
            n += 1
            lat = SubrepLattice(E)
            for _ in range(charges):
                Z = CentralCharge(K, tuple(_heart_charge(rng, 2)))
                a, b = hn_filtration(Z, E), hn_exhaustive(Z, E, lat)
                if a.chain_key() != b.chain_key():
                    fails.append(("chain", E.dims, [str(z) for z in Z.charges]))
                if any(phase_order(x, y) != GT for x, y in zip(a.charges, a.charges[1:])):
                    fails.append(("phases", E.dims, [str(z) for z in Z.charges]))
        return n * charges, fails, {"representations": n}
    return _timed("hn-oracle", run)


def _random_quiver(rng: random.Random) -> Quiver:
    n = rng.randint(2, 4)
    arrows = [(s, t) for s in range(n) for t in range(s + 1, n) for _ in range(rng.randint(0, 2))]
    if not arrows:
        arrows = [(0, 1)]
    return Quiver([str(i + 1) for i in range(n)], arrows)


def check_euler_form(pairs: int = 100, seed: int = 2) -> CheckResult:
    from .corpus import random_matrix
    from .quiver import Representation

    def rep(rng, q, field):
        dims = [rng.randint(0, 2) for _ in range(q.n)]
        return Representation.build(q, field, dims,
                                    [random_matrix(rng, field, dims[t], dims[s], 0, 4) for s, t in q.arrows])

    def run():
        rng = random.Random(seed)
        fails = []
        for i in range(pairs):
            q = kronecker_quiver() if i % 3 == 0 else _random_quiver(rng)
            field = GF(5) if i % 2 else QQ
            E, F = rep(rng, q, field), rep(rng, q, field)
            lhs = euler_form(q, E.dims, F.dims)
            rhs = hom_dim(E, F) - ext1_via_resolution(E, F)
            if lhs != rhs:
                fails.append((q.arrows, E.dims, F.dims, lhs, rhs))
        return pairs, fails, {}
    return _timed("euler-form", run)


def check_discreteness(charges: int = 20, radius: int = 10, seed: int = 10) -> CheckResult:
    from .stability import CentralCharge, discreteness_report

    def scan(ims):
        best = None
        for d in itertools.product(range(-radius, radius + 1), repeat=len(ims)):
            s = sum(k * im for k, im in zip(d, ims))
            if s > 0 and (best is None or s < best):
                best = s
        return best

    def run():
        rng = random.Random(seed)
        fails = []
        for i in range(charges):
            q = kronecker_quiver() if i % 2 == 0 else Quiver(["1", "2", "3"], [(0, 1), (1, 2)])
            zs = _heart_charge(rng, q.n)
            rep = discreteness_report(CentralCharge(q, tuple(zs)), radius)
            if not (rep.im_image_discrete and rep.image_discrete):
                fails.append(("flags", [str(z) for z in zs]))
            if rep.min_positive_im != scan([z.im for z in zs]):
                fails.append(("min", [str(z) for z in zs], rep.min_positive_im))
        return charges, fails, {}
    return _timed("discreteness", run)


# --- Beilinson model ---

def cv_corpus(per_r: int = 12, seed: int = 3, max_dim: int = 3):
    from .corpus import random_cv_object
    rng = random.Random(seed)
    return [random_cv_object(rng, r, max_dim) for r in (1, 2) for _ in range(per_r)]


def complex_corpus(per_r: tuple[int, int] = (6, 4), seed: int = 5):
    from .beilinson import as_line_complex
    from .corpus import random_cv_complex
    rng = random.Random(seed)
    out = []
    for r, k in zip((1, 2), per_r):
        while sum(1 for rr, _ in out if rr == r) < k:
            C = random_cv_complex(rng, r, 4, 3)
            if not as_line_complex(C, r).is_zero():
                out.append((r, C))
    return out


def check_phi_psi(corpus) -> CheckResult:
    from .beilinson import phi, phi_psi_witness, psi

    def run():
        fails = []
        for M in corpus:
            try:
                f = phi_psi_witness(M)
                ok = f.is_iso() and f.target.key() == M.rep.key() and phi(psi(M)).dims == M.dims
            except AssertionError:
                ok = False
            if not ok:
                fails.append(M.dims)
        return len(corpus), fails, {}
    return _timed("phi-psi-identity", run)


def check_heart_twist(corpus, n_max: int = 6) -> CheckResult:
    from .beilinson import heart_twist_witnesses

    def run():
        fails, count = [], 0
        for M in corpus:
            for n, A, B, f in heart_twist_witnesses(M, n_max):
                count += 1
                if A.dims != B.dims or f is None or not f.is_iso():
                    fails.append((M.dims, n, A.dims, B.dims))
        return count, fails, {"n_max": n_max}
    return _timed("heart-twist-crosscheck", run)


def gamma_scan_bound(F, r: int, horizon: int = 8, limit: int = 24) -> int | None:
    """Least n >= 0 after which every twist F(n'+j), 0 <= j <= r, has global sections only in degree 0."""
    from .beilinson import gamma_cohomology
    for n in range(limit):
        if all(set(gamma_cohomology(F, m + j).dims) <= {0} for m in range(n, n + horizon) for j in range(r + 1)):
            return n
    return None


def check_stabilization(complexes, confirm: int = 5, bound: int = 20) -> CheckResult:
    from .beilinson import LineComplex, as_line_complex, stabilization_bound

    def run():
        fails, Ns = [], []
        for r, C in complexes:
            cert = stabilization_bound(as_line_complex(C, r), confirm=confirm)
            steps = {s.n: s for s in cert.scan}
            ok = cert.N <= bound and all(n in steps and steps[n].stable for n in range(cert.N, cert.N + confirm + 1))
            Ns.append(cert.N)
            if not ok:
                fails.append(("complex", r, cert.N))
        Om3 = LineComplex.line_bundle(1, -3)
        n_engine, n_scan = stabilization_bound(Om3).N, gamma_scan_bound(Om3, 1)
        if not (n_engine == 2 and n_scan == 2):
            fails.append(("O(-3)", n_engine, n_scan))
        for r in (1, 2):
            for m in range(-5, 1):
                F = LineComplex.line_bundle(r, m)
                a, b = stabilization_bound(F).N, gamma_scan_bound(F, r)
                if a != b:
                    fails.append(("line", r, m, a, b))
        return len(complexes) + 13, fails, {"N": Ns}
    return _timed("stabilization", run)


def _degree_range(window: dict) -> tuple[int, int] | None:
    degs = [i for i, P in window.items() if not P.is_zero()]
    return (min(degs), max(degs)) if degs else None


def check_inclusions(objects, n_max: int = 6) -> CheckResult:
    """For m < n: D^{<=0}_m in D^{<=0}_n, D^{>=0}_n in D^{>=0}_m, D^{>=0}_m in D^{>=-r}_n."""
    from .beilinson import as_line_complex

    def run():
        fails, count = [], 0
        for r, obj in objects:
            F = as_line_complex(obj, r)
            if F.is_zero():
                continue
            eng = F.engine(0)
            rng_ = {n: _degree_range(eng.window(n)) for n in range(n_max + 1)}
            for m in range(n_max + 1):
                for n in range(m + 1, n_max + 1):
                    count += 1
                    a, b = rng_[m], rng_[n]
                    if a is None or b is None:
                        if a != b:
                            fails.append((r, m, n, a, b))
                        continue
                    if not (b[1] <= a[1] and a[0] >= b[0] and b[0] >= a[0] - r):
                        fails.append((r, m, n, a, b))
        return count, fails, {}
    return _timed("degree-inclusions", run)


def check_line_cohomology() -> CheckResult:
    from .beilinson import LineComplex, gamma_cohomology

    def expected(r, m):
        if m >= 0:
            return {0: comb(m + r, r)}
        if -m - 1 >= r:
            return {r: comb(-m - 1, r)}
        return {}

    def run():
        fails = []
        for r in (1, 2):
            for m in range(-5, 6):
                got = gamma_cohomology(LineComplex.line_bundle(r, m), 0).dims
                if got != expected(r, m):
                    fails.append((r, m, got))
        return 22, fails, {}
    return _timed("line-cohomology", run)


# --- graded modules ---

def check_hilbert_bound(count: int = 50, window: int = 12, seed: int = 7) -> CheckResult:
    from .corpus import random_submodule
    from .errors import WindowError
    from .hilbert import brute_force_generation_degree, generation_bound

    def run():
        rng = random.Random(seed)
        fails, Ns = [], []
        for _ in range(count):
            m = random_submodule(rng, window)
            try:
                b = generation_bound(m)
            except WindowError as exc:
                fails.append(("window", m.d, m.F.dims, str(exc)))
                continue
            brute = brute_force_generation_degree(m)
            Ns.append((b.N, brute))
            if b.N < brute or not all(m.surjective_at(n) for n in range(b.N, window)):
                fails.append(("bound", m.d, b.N, brute))
        return count, fails, {"N_vs_brute": Ns}
    return _timed("hilbert-bound", run)


# --- families ---

def check_modifications(count: int = 50, seed: int = 8) -> CheckResult:
    from .corpus import random_fiber_kernel, random_kronecker_family
    from .families import elementary_modification, fiber_at, reverse_modification
    from .stability import CentralCharge

    def run():
        rng = random.Random(seed)
        Z = CentralCharge.of(kronecker_quiver(), [-1, -1])
        fails = []
        for i in range(count):
            F = random_kronecker_family(rng, 3 if i % 5 == 4 else 2)
            K = random_fiber_kernel(rng, fiber_at(F, 0).H0)
            step = elementary_modification(F, K, Z)
            _, iso = reverse_modification(step)
            ok = step.checks["roundtrip_F"] and step.checks["roundtrip_G"] and step.s_equivalent and iso.is_iso()
            if not ok or not all(step.checks.values()):
                fails.append((F.gens, K.dims, step.checks, step.s_equivalent))
        return count, fails, {}
    return _timed("modification-laws", run)


def check_valuative(count: int = 30, seed: int = 9, max_degree: int = 4) -> CheckResult:
    from .corpus import random_lattice, random_punctured_family
    from .families import extend_family, fiber_at, polystable_replacement
    from .stability import CentralCharge, is_polystable, is_semistable, s_equivalent

    def run():
        rng = random.Random(seed)
        Z = CentralCharge.of(kronecker_quiver(), [-1, -1])
        fails, degrees = [], []
        for _ in range(count):
            EU = random_punctured_family(rng)
            a = extend_family(EU)
            b = extend_family(EU, random_lattice(rng, EU.gens))
            fa, fb = fiber_at(a.family, 0), fiber_at(b.family, 0)
            flat = a.family.is_t_flat() and b.family.is_t_flat() and fa.t_flat and fb.t_flat
            z = Z(fa.H0.dims)
            phase1 = z.im == 0 and z.re < 0 and is_semistable(Z, fa.H0) and is_semistable(Z, fb.H0)
            witness = a.surjective and a.injective and b.surjective and b.injective
            same = s_equivalent(Z, fa.H0, fb.H0)
            rep = polystable_replacement(EU, Z)
            split = all(rd.get("split_witness") is not None for rd in rep.rounds if rd["kind"] == "split")
            degrees.append(rep.degree)
            done = rep.degree <= max_degree and rep.polystable and is_polystable(Z, rep.special_fiber) and split
            if not (flat and phase1 and witness and same and done):
                fails.append((EU.gens, flat, phase1, witness, same, rep.degree))
        return count, fails, {"degrees": degrees}
    return _timed("valuative-suite", run)


# --- registry ---

def run_all(quick: bool = False) -> list[CheckResult]:
    cv = cv_corpus(4 if quick else 12)
    cx = complex_corpus((2, 1) if quick else (6, 4))
    objs = [(M.r, M) for M in cv] + cx
    return [
        check_hn_oracle(40 if quick else 200),
        check_euler_form(30 if quick else 100),
        check_phi_psi(cv),
        check_heart_twist(cv, 3 if quick else 6),
        check_stabilization(cx),
        check_inclusions(objs),
        check_hilbert_bound(15 if quick else 50),
        check_modifications(15 if quick else 50),
        check_valuative(10 if quick else 30),
        check_discreteness(8 if quick else 20),
        check_line_cohomology(),
    ]
