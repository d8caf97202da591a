"""`hearthkit` command-line front end.

Every report is a JSON envelope {command, version, inputs, options, result} printed with sorted keys,
so identical inputs give identical bytes. Failures print {command, version, error} and exit 1
(malformed input) or 2 (mathematical precondition).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import HearthkitError, PreconditionError, ValidationError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message, location="argv")


class _Inputs:
    """Loads JSON files and remembers their sha256 digests."""

    def __init__(self):
        self.hashes: dict[str, str] = {}

    def load(self, name: str, path: str | None):
        if path is None:
            return None
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise ValidationError(f"cannot read {path}: {exc.strerror}", location=name) from exc
        self.hashes[name] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc.msg}", location=f"{name}:{exc.lineno}:{exc.colno}") from exc


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default)


# --- loaders ---

def _rep(data, name="rep"):
    from .families import quiver_from_json
    from .quiver import Representation
    try:
        return Representation.from_json(data, quiver_from_json(data["quiver"]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ValidationError(f"malformed representation: {exc}", location=name) from exc


def _charge(data, quiver):
    from .stability import CentralCharge
    if data is None:
        raise ValidationError("--charge is required", location="charge")
    try:
        return CentralCharge.from_json(data, quiver)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed charge: {exc}", location="charge") from exc


def _charge_quiver(data):
    from .families import quiver_from_json
    from .quiver import Quiver
    if "quiver" in data:
        return quiver_from_json(data["quiver"])
    raw = data.get("charges", data)
    names = list(raw) if isinstance(raw, dict) else [str(i + 1) for i in range(len(raw))]
    return Quiver(names, [])


def _object(data):
    from .beilinson import load_object
    return load_object(data)


def _cv(data):
    from .beilinson import CVObject
    try:
        return CVObject.from_json(data)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ValidationError(f"malformed cv-object: {exc}", location="object") from exc


def _graded(data):
    from .hilbert import GradedModule, submodule_from_json
    if "generators" in data or data.get("free"):
        return submodule_from_json(data)
    return GradedModule.from_json(data)


def _submodule(data):
    from .hilbert import submodule_from_json
    return submodule_from_json(data)


# --- stability commands ---

def cmd_hn(a, io):
    from .stability import hn_exhaustive, hn_filtration
    E = _rep(io.load("rep", a.rep))
    Z = _charge(io.load("charge", a.charge), E.quiver)
    return (hn_exhaustive(Z, E) if a.exhaustive else hn_filtration(Z, E)).to_json()


def cmd_jh(a, io):
    from .stability import jh_factors
    E = _rep(io.load("rep", a.rep))
    Z = _charge(io.load("charge", a.charge), E.quiver)
    return jh_factors(Z, E).to_json()


def cmd_sequiv(a, io):
    from .stability import jh_factors, s_equivalent
    E = _rep(io.load("rep", a.rep))
    F = _rep(io.load("other", a.other), "other")
    Z = _charge(io.load("charge", a.charge), E.quiver)
    return {"s_equivalent": s_equivalent(Z, E, F),
            "classes": [jh_factors(Z, E).to_json(), jh_factors(Z, F).to_json()]}


def cmd_discreteness(a, io):
    from .stability import discreteness_report
    data = io.load("charge", a.charge)
    if data is None:
        raise ValidationError("--charge is required", location="charge")
    return discreteness_report(_charge(data, _charge_quiver(data)), a.box).to_json()


def cmd_chainmon(a, io):
    from .quiver import RepMorphism
    from .stability import chain_monitor
    E = _rep(io.load("rep", a.rep))
    Z = _charge(io.load("charge", a.charge), E.quiver)
    chain = []
    for i, link in enumerate(io.load("chain", a.chain)):
        try:
            chain.append(RepMorphism.from_json(link["map"], _rep(link["rep"], f"chain[{i}]"), E))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed chain member: {exc}", location=f"chain[{i}]") from exc
    return chain_monitor(Z, E, chain).to_json()


# --- projective-space model ---

def cmd_twist(a, io):
    from .beilinson import heart_twist_n
    M = _cv(io.load("object", a.object))
    return {"n": a.n, "object": heart_twist_n(M, a.n).to_json()}


def cmd_gamma(a, io):
    from .beilinson import gamma_cohomology
    F = _object(io.load("object", a.object))
    hi = a.n if a.to is None else a.to
    if hi < a.n:
        raise ValidationError("--to must be at least --n", location="to")
    return {str(n): gamma_cohomology(F, n).to_json() for n in range(a.n, hi + 1)}


def cmd_stabilize(a, io):
    from .beilinson import stabilization_bound
    F = _object(io.load("object", a.object))
    return stabilization_bound(F, window=a.window, confirm=a.confirm).to_json()


def cmd_mf(a, io):
    from .beilinson import module_MF
    F = _object(io.load("object", a.object))
    return module_MF(F, start=a.start, horizon=a.window).to_json()


def cmd_gensurj(a, io):
    from .beilinson import generator_surjection
    F = _object(io.load("object", a.object))
    try:
        return generator_surjection(F, min_degree=a.min_degree).to_json()
    except AssertionError as exc:
        raise PreconditionError(str(exc)) from exc


# --- graded modules ---

def cmd_hilbert_finite_type(a, io):
    from .hilbert import finite_type_test
    m = _graded(io.load("module", a.module))
    return finite_type_test(m, horizon=a.horizon).to_json()


def cmd_hilbert_bound(a, io):
    from .hilbert import generation_bound
    return generation_bound(_submodule(io.load("module", a.module))).to_json()


def cmd_hilbert_chain(a, io):
    from .hilbert import ascending_chain_stabilize
    data = io.load("chain", a.chain)
    if not isinstance(data, list):
        raise ValidationError("chain file must hold a list of submodules", location="chain")
    return ascending_chain_stabilize([_submodule(d) for d in data]).to_json()


# --- families ---

def _family(io, name, path):
    from .families import family_from_json
    return family_from_json(io.load(name, path))


def _family_charge(io, a, quiver, required=False):
    if a.charge is None and not required:
        return None
    return _charge(io.load("charge", a.charge), quiver)


def cmd_family_fiber(a, io):
    from .families import fiber_at
    return fiber_at(_family(io, "family", a.family), Fraction(a.point)).to_json()


def cmd_family_extend(a, io):
    from .families import extend_family, lattice_from_json, punctured_from_json
    EU = punctured_from_json(io.load("family", a.family))
    lat = lattice_from_json(io.load("lattice", a.lattice), EU.quiver)
    return extend_family(EU, lat).to_json()


def cmd_family_modify(a, io):
    from .families import elementary_modification, fiber_at
    from .linalg import QQ, Mat
    from .quiver import Subobject
    F = _family(io, "family", a.family)
    H0 = fiber_at(F, 0).H0
    data = io.load("kernel", a.kernel)
    spans = []
    for v, name in enumerate(F.quiver.vertices):
        rows = data.get(name) or []
        spans.append(Mat.from_rows(QQ, rows) if rows and rows[0] else Mat.zeros(QQ, H0.dims[v], 0))
        if spans[-1].nrows != H0.dims[v]:
            raise ValidationError(f"kernel span at vertex {name} has the wrong height", location="kernel")
    K = Subobject.from_spans(H0, spans)
    return elementary_modification(F, K, _family_charge(io, a, F.quiver)).to_json()


def cmd_family_chain(a, io):
    from .families import family_from_json, modification_chain, morphism_from_json
    data = io.load("morphism", a.morphism)
    try:
        src, tgt = family_from_json(data["source"]), family_from_json(data["target"])
        phi = morphism_from_json(data["maps"], src, tgt)
    except KeyError as exc:
        raise ValidationError(f"missing field {exc}", location="morphism") from exc
    return modification_chain(phi, _family_charge(io, a, src.quiver)).to_json()


def cmd_family_polystable(a, io):
    from .families import lattice_from_json, polystable_replacement, punctured_from_json
    EU = punctured_from_json(io.load("family", a.family))
    Z = _family_charge(io, a, EU.quiver, required=True)
    return polystable_replacement(EU, Z, lattice_from_json(io.load("lattice", a.lattice), EU.quiver)).to_json()


def cmd_family_membership(a, io):
    from .families import complex_from_json, heart_membership
    C = complex_from_json(io.load("complex", a.complex))
    return heart_membership(C, Fraction(a.point), _family_charge(io, a, C.quiver)).to_json()


# --- check ---

def cmd_check(a, io):
    from . import checks
    results = checks.run_all(quick=a.quick)
    if a.only:
        unknown = set(a.only) - {r.name for r in results}
        if unknown:
            raise ValidationError(f"unknown check names {sorted(unknown)}", location="only")
        results = [r for r in results if r.name in a.only]
    if a.lines:
        for r in results:
            print(r.line(), file=sys.stderr)
    return {"matrix": {r.name: "pass" if r.passed else "fail" for r in results},
            "details": {r.name: r.to_json() for r in results},
            "all_passed": all(r.passed for r in results)}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hearthkit", description="Exact t-structure, stability and family computations.")
    p.add_argument("--version", action="version", version=f"hearthkit {__version__}")
    p.add_argument("--prime", type=int, help="prime for finite-field oracles (overrides HEARTHKIT_PRIME)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, *args, parent=sub, **kw):
        sp = parent.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        for flag, opts in args:
            sp.add_argument(flag, **opts)
        return sp

    req = {"required": True}
    rep, charge = ("--rep", req), ("--charge", req)
    opt_charge = ("--charge", {})
    obj = ("--object", req)
    add("hn", cmd_hn, charge, rep, ("--exhaustive", {"action": "store_true"}))
    add("jh", cmd_jh, charge, rep)
    add("sequiv", cmd_sequiv, charge, rep, ("--other", req))
    add("discreteness", cmd_discreteness, charge, ("--box", {"type": int, "default": 10}))
    add("chainmon", cmd_chainmon, charge, rep, ("--chain", req))
    add("twist", cmd_twist, obj, ("--n", {"type": int, "default": 1}))
    add("gamma", cmd_gamma, obj, ("--n", {"type": int, "default": 0}), ("--to", {"type": int}))
    add("stabilize", cmd_stabilize, obj, ("--window", {"type": int, "default": 24}),
        ("--confirm", {"type": int, "default": 5}))
    add("mf", cmd_mf, obj, ("--start", {"type": int, "default": 1}), ("--window", {"type": int, "default": 24}))
    add("gensurj", cmd_gensurj, obj, ("--min-degree", {"type": int, "default": 1}))

    hp = sub.add_parser("hilbert").add_subparsers(dest="action", required=True, parser_class=_Parser)
    add("finite-type", cmd_hilbert_finite_type, ("--module", req), ("--horizon", {"type": int}), parent=hp)
    add("bound", cmd_hilbert_bound, ("--module", req), parent=hp)
    add("chain", cmd_hilbert_chain, ("--chain", req), parent=hp)

    fp = sub.add_parser("family").add_subparsers(dest="action", required=True, parser_class=_Parser)
    fam = ("--family", req)
    add("fiber", cmd_family_fiber, fam, ("--point", {"default": "0"}), parent=fp)
    add("extend", cmd_family_extend, fam, ("--lattice", {}), parent=fp)
    add("modify", cmd_family_modify, fam, ("--kernel", req), opt_charge, parent=fp)
    add("chain", cmd_family_chain, ("--morphism", req), opt_charge, parent=fp)
    add("polystable", cmd_family_polystable, fam, charge, ("--lattice", {}), parent=fp)
    add("membership", cmd_family_membership, ("--complex", req), opt_charge, ("--point", {"default": "0"}),
        parent=fp)

    add("check", cmd_check, ("--quick", {"action": "store_true"}), ("--only", {"nargs": "+"}),
        ("--lines", {"action": "store_true", "help": "also print one pass/fail line per check to stderr"}))
    return p


def _options(args) -> dict:
    skip = {"fn", "command", "action"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    command = "hearthkit"
    try:
        args = build_parser().parse_args(argv)
        command = " ".join(x for x in (args.command, getattr(args, "action", None)) if x)
        if args.prime is not None:
            os.environ["HEARTHKIT_PRIME"] = str(args.prime)
        io = _Inputs()
        result = args.fn(args, io)
        report = {"command": command, "version": __version__, "inputs": io.hashes,
                  "options": _options(args), "result": result}
        out.write(dumps(report) + "\n")
        if args.command == "check" and not result["all_passed"]:
            return 1
        return 0
    except HearthkitError as exc:
        out.write(dumps({"command": command, "version": __version__, "error": exc.to_json()}) + "\n")
        return exc.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
