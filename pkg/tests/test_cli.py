import io
import json
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from hearthkit import __version__
from hearthkit.beilinson import CVObject
from hearthkit.cli import run
from hearthkit.corpus import random_cv_object, random_kronecker, random_punctured_family, random_submodule
from hearthkit.families import family_from_json
from hearthkit.hilbert import submodule_from_json
from hearthkit.linalg import GF

INDEC = {"quiver": "kronecker", "dims": {"1": 1, "2": 1}, "maps": {"0": [[1]], "1": [[0]]}}
Z_HN = {"charges": {"1": ["0", "1"], "2": ["-1", "0"]}}
Z_EQ = {"charges": [-1, -1]}


@pytest.fixture
def put(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)
    return write


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, json.loads(buf.getvalue()), buf.getvalue()


def test_hn_example(put):
    code, rep, _ = call("hn", "--charge", put("z.json", Z_HN), "--rep", put("e.json", INDEC))
    assert code == 0
    pieces = rep["result"]["pieces"]
    assert [p["dims"] for p in pieces] == [[0, 1], [1, 0]]
    assert [p["phase"] for p in pieces] == ["1", "1/2"]
    assert rep["version"] == __version__ and set(rep["inputs"]) == {"charge", "rep"}


def test_stabilize_example(put):
    code, rep, _ = call("stabilize", "--object", put("o.json", {"kind": "line-bundle", "r": 1, "twist": -3}))
    assert code == 0 and rep["result"]["N"] == 2


def test_exit_codes(put):
    code, rep, _ = call("hn", "--charge", put("z.json", Z_HN), "--rep", put("bad.json", '{"dims": '))
    assert code == 1 and rep["error"]["code"] == "validation"
    code, rep, _ = call("hn", "--rep", put("e.json", INDEC))
    assert code == 1
    code, rep, _ = call("hn", "--charge", put("z.json", Z_HN), "--rep", put("e.json", INDEC), "--bogus")
    assert code == 1 and rep["error"]["location"] == "argv"
    code, rep, _ = call("jh", "--charge", put("z.json", Z_HN), "--rep", put("e.json", INDEC))
    assert code == 2 and rep["error"]["code"] == "not-semistable"
    assert set(rep["error"]) == {"code", "message", "location"}


def test_other_commands(put):
    e = put("e.json", INDEC)
    z = put("zeq.json", Z_EQ)
    split = put("s.json", {"quiver": "kronecker", "dims": {"1": 1, "2": 1}, "maps": {"0": [[0]], "1": [[0]]}})
    code, rep, _ = call("sequiv", "--charge", z, "--rep", e, "--other", split)
    assert code == 0 and rep["result"]["s_equivalent"] is True
    code, rep, _ = call("discreteness", "--charge", put("zd.json", {"charges": [-1, ["-1/2", "1/3"]]}))
    assert rep["result"]["min_positive_im"] == "1/3"
    obj = put("o.json", CVObject.line_bundle(1, 0).to_json())
    code, rep, _ = call("twist", "--object", obj, "--n", "1")
    assert rep["result"]["object"]["dims"] == [3, 4]
    code, rep, _ = call("gamma", "--object", obj, "--n", "0", "--to", "2")
    assert rep["result"]["2"]["dims"] == {"0": 3}
    code, rep, _ = call("mf", "--object", obj)
    assert rep["result"]["generation_degree"] == 1
    code, rep, _ = call("gensurj", "--object", obj)
    assert rep["result"]["G_dim"] == 2 and rep["result"]["twist"] == -1
    m = put("m.json", {"d": 2, "window": 8, "generators": [{"terms": [[[1, 0], 1]]}, {"terms": [[[0, 2], 1]]}]})
    assert call("hilbert", "bound", "--module", m)[1]["result"]["N"] == 3
    assert call("hilbert", "finite-type", "--module", m)[1]["result"]["finite_type"] is True
    mono = {"d": 1, "window": 6, "generators": [{"terms": [[[2], 1]]}]}
    ch = put("c.json", [mono, mono])
    assert call("hilbert", "chain", "--chain", ch)[1]["result"]["index"] == 1


def test_family_commands(put):
    z = put("zeq.json", Z_EQ)
    fam = {"quiver": "kronecker", "modules": {"1": {"gens": 1}, "2": {"gens": 1}},
           "arrows": {"0": [[[1]]], "1": [[[0]]]}}
    f = put("f.json", fam)
    code, rep, _ = call("family", "fiber", "--family", f)
    assert rep["result"]["H0"]["dims"] == {"1": 1, "2": 1}
    code, rep, _ = call("family", "modify", "--family", f, "--kernel", put("k.json", {"1": [], "2": [[1]]}),
                        "--charge", z)
    assert code == 0 and rep["result"]["s_equivalent"] is True
    code, rep, _ = call("family", "polystable", "--family", f, "--charge", z)
    assert code == 0 and rep["result"]["degree"] == 2
    code, rep, _ = call("family", "extend", "--family", f)
    assert code == 0 and family_from_json(rep["result"]["family"]).is_t_flat()
    mor = {"source": {"quiver": "point", "modules": {"1": {"gens": 1}}},
           "target": {"quiver": "point", "modules": {"1": {"gens": 1}}}, "maps": {"1": [[[0, 0, 1]]]}}
    code, rep, _ = call("family", "chain", "--morphism", put("phi.json", mor))
    assert code == 0 and rep["result"]["length"] == 2
    cx = {"terms": {"0": fam}}
    code, rep, _ = call("family", "membership", "--complex", put("cx.json", cx), "--charge", z)
    assert rep["result"]["in_P1"] is True


def test_console_script_version():
    out = subprocess.run([sys.executable, "-m", "hearthkit.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_reports_are_deterministic(tmp_path_factory, seed):
    d = tmp_path_factory.mktemp("det")
    rng = random.Random(seed)
    E = random_kronecker(rng, GF(5), 3)
    if E.total_dim == 0:
        return
    (d / "e.json").write_text(json.dumps(E.to_json()))
    (d / "z.json").write_text(json.dumps({"charges": [["-1", "1"], ["0", "2"]]}))
    argv = ["hn", "--charge", str(d / "z.json"), "--rep", str(d / "e.json")]
    assert call(*argv)[2] == call(*argv)[2]


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_schema_round_trip(tmp_path_factory, seed):
    d = tmp_path_factory.mktemp("rt")
    rng = random.Random(seed)
    M = random_cv_object(rng, rng.choice([1, 2]), 3)
    (d / "m.json").write_text(json.dumps(M.to_json()))
    code, rep, _ = call("twist", "--object", str(d / "m.json"), "--n", "1")
    obj = rep["result"]["object"]
    assert CVObject.from_json(obj).to_json() == obj
    EU = random_punctured_family(rng)
    (d / "u.json").write_text(json.dumps(EU.to_json()))
    code, rep, _ = call("family", "extend", "--family", str(d / "u.json"))
    fam = rep["result"]["family"]
    assert family_from_json(fam).to_json() == fam
    m = random_submodule(rng, window=8)
    assert submodule_from_json(json.loads(json.dumps(m.to_json()))) == m
