import json
import math
import subprocess
import sys

import pytest

from orthocat import io
from orthocat.cli import main
from orthocat.generators import boolean, diamond_m3, divisor, empty_triangle


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return path

    return write


def poset_file(files, name, p):
    return files(name, io.poset_to_json(p))


# -- check ---------------------------------------------------------------------------


def test_check_empty_triangle(capsys, files):
    code, out, _ = run(capsys, "check", poset_file(files, "t.json", empty_triangle()))
    assert code == 0 and out["is_flag"] is False
    assert out["witnesses"]["is_flag"] == ["{a}", "{b}", "{c}"]


def test_check_boolean(capsys, files):
    code, out, _ = run(capsys, "check", poset_file(files, "b.json", boolean(3)))
    assert code == 0
    assert all(out[k] for k in ("is_semilattice", "is_locally_distributive", "is_locally_boolean", "is_flag"))


def test_check_m3(capsys, files):
    code, out, _ = run(capsys, "check", poset_file(files, "m.json", diamond_m3()))
    assert code == 0 and out["is_locally_distributive"] is False


def test_parse_errors_exit_2(capsys, files):
    assert run(capsys, "check", '{"elements": ["a"]}')[0] == 2
    assert run(capsys, "check", '{"elements": ["a"], "covers": [], "extra": 1}')[0] == 2
    assert run(capsys, "check", "{not json")[0] == 2
    assert run(capsys, "check", files("missing.json", None).parent / "nope.json")[0] == 2
    assert run(capsys, "bogus")[0] == 2


# -- represent ------------------------------------------------------------------------


def test_represent_divisor_12(capsys, files):
    code, out, _ = run(capsys, "represent", poset_file(files, "d.json", divisor(12)))
    assert code == 0
    K = io.parse_complex(out["complex"])
    assert sorted(K.complex.vertices) == ["2", "3", "4"]
    assert [sorted(f) for f in K.complex.facets] == [["2", "3", "4"]]
    assert out["complex"]["vertex_order_covers"] == [["2", "4"]]
    assert out["complex"] == io.complex_to_json(K)


def test_represent_boolean_and_chain(capsys):
    code, out, _ = run(capsys, "represent", json.dumps(io.poset_to_json(boolean(3))))
    assert code == 0 and len(out["complex"]["facets"]) == 1 and not out["complex"].get("vertex_order_covers")
    chain = {"elements": ["0", "a", "b"], "covers": [["0", "a"], ["a", "b"]]}
    code, out, _ = run(capsys, "represent", json.dumps(chain))
    assert code == 0 and out["complex"]["vertex_order_covers"] == [["a", "b"]]


def test_represent_rejects_m3(capsys, files):
    code, out, err = run(capsys, "represent", poset_file(files, "m.json", diamond_m3()))
    assert code == 3 and out is None and "witness" in err


# -- distance --------------------------------------------------------------------------


def test_distance_l_shape(capsys):
    K = json.dumps({"vertices": ["a", "b", "c"], "facets": [["a", "b"], ["b", "c"]]})
    code, out, _ = run(capsys, "distance", K, '{"coords": {"a": 1, "b": 1}}', '{"coords": {"b": 1, "c": 1}}')
    assert code == 0 and abs(out["distance"] - 2.0) <= 1e-6
    assert sum(s["length"] for s in out["path"]) == pytest.approx(out["distance"], abs=1e-12)


def test_distance_tripod_midpoint(capsys):
    K = json.dumps({"vertices": ["a", "b", "c"], "facets": [["a", "b"], ["b", "c"], ["a", "c"]]})
    code, out, _ = run(capsys, "distance", K, '{"coords": {"a": 0.5, "b": 0.5}}', '{"coords": {"c": 1}}')
    assert code == 0 and abs(out["distance"] - math.sqrt(2.5)) <= 1e-6


def test_distance_square_diagonal_via_chain_point(capsys):
    K = json.dumps({"vertices": ["a", "b"], "facets": [["a", "b"]]})
    code, out, _ = run(capsys, "distance", K, '{"chain": [[]], "weights": [1]}', '{"chain": [["a", "b"]], "weights": [1]}')
    assert code == 0 and abs(out["distance"] - math.sqrt(2)) <= 1e-9


def test_distance_on_poset(capsys, files):
    f = poset_file(files, "b.json", boolean(2))
    code, out, _ = run(capsys, "distance", f, '{"chain": ["{}"], "weights": [1]}', '{"chain": ["{1,2}"], "weights": [1]}')
    assert code == 0 and abs(out["distance"] - math.sqrt(2)) <= 1e-9


def test_distance_point_outside(capsys):
    K = json.dumps({"vertices": ["a", "b"], "facets": [["a"], ["b"]]})
    code, _, _ = run(capsys, "distance", K, '{"coords": {"a": 1, "b": 1}}', '{"coords": {}}')
    assert code == 3


def test_distance_budget_exit_4(capsys, files):
    f = files("n.json", json.loads(subprocess_generate("ncp", "--n", "4")))
    p = '{"chain": ["1|2|3|4", "12|3|4", "123|4"], "weights": [0.2, 0.5, 0.3]}'
    q = '{"chain": ["14|2|3", "14|23"], "weights": [0.6, 0.4]}'
    code, out, err = run(capsys, "distance", f, p, q, "--budget", 1)
    assert code == 4 and "budget" in err


# -- cat0 --------------------------------------------------------------------------------


def test_cat0_empty_triangle(capsys, files):
    code, out, _ = run(capsys, "cat0", poset_file(files, "t.json", empty_triangle()), "--trials", 5)
    assert code == 0 and out["verdict"] == "violation-found"
    assert out["witness"]["margin"] == pytest.approx(1.0, abs=1e-3)
    assert out["witness"]["certified_margin"] > 0.1


def test_cat0_boolean(capsys, files):
    code, out, _ = run(capsys, "cat0", poset_file(files, "b.json", boolean(3)), "--trials", 100)
    assert code == 0 and out["verdict"] == "flag-and-consistent" and out["trials"] == 100
    assert out["max_margin"] <= 1e-4


def test_cat0_samples_flag_input_that_is_not_locally_distributive(capsys, files):
    code, out, err = run(capsys, "cat0", poset_file(files, "m.json", diamond_m3()), "--trials", 5)
    assert code == 0 and out["sampling_only"] and "not a proof" in out["note"]


def test_cat0_rejects_non_distributive_non_flag(capsys):
    # empty triangle of atoms a, b, c beside an M3 diamond over d, e, f
    covers = [["0", v] for v in "abcdef"]
    covers += [["a", "ab"], ["b", "ab"], ["b", "bc"], ["c", "bc"], ["a", "ac"], ["c", "ac"]]
    covers += [[v, "t"] for v in "def"]
    p = {"elements": ["0", *"abcdef", "ab", "bc", "ac", "t"], "covers": covers}
    code, _, err = run(capsys, "cat0", json.dumps(p))
    assert code == 3 and "witness" in err


# -- generate ------------------------------------------------------------------------------


def subprocess_generate(*args):
    r = subprocess.run([sys.executable, "-m", "orthocat.cli", "generate", *args],
                       capture_output=True, text=True, check=True)
    return r.stdout


def test_generate_examples(capsys):
    _, out, _ = run(capsys, "generate", "boolean", "--n", 2)
    assert len(out["elements"]) == 4 and len(out["covers"]) == 4
    _, out, _ = run(capsys, "generate", "ncp", "--n", 3)
    assert len(out["elements"]) == 5
    p = io.parse_poset(out)
    assert sorted(len(p.lower_covers(x)) for x in p.elements) == [0, 1, 1, 1, 3]
    _, out, _ = run(capsys, "generate", "divisor", "--n", 12)
    assert len(out["elements"]) == 6


def test_generate_bad_params(capsys):
    assert run(capsys, "generate", "boolean")[0] == 3
    assert run(capsys, "generate", "empty-triangle", "--n", 3)[0] == 3
    assert run(capsys, "generate", "nonesuch")[0] == 2


def test_random_distributive_is_distributive(capsys):
    _, out, _ = run(capsys, "generate", "random-distributive", "--seed", 3, "--size", 10)
    code, rep, _ = run(capsys, "check", json.dumps(out))
    assert rep["is_locally_distributive"] and rep["is_flag"]


@pytest.mark.parametrize("family,args", [
    ("boolean", ["--n", "3"]), ("chain", ["--n", "4"]), ("empty-triangle", []),
    ("diamond-m3", []), ("divisor", ["--n", "30"]), ("random-distributive", ["--seed", "5"]),
    ("ncp", ["--n", "4"]),
])
def test_generate_round_trips(capsys, family, args):
    _, out, _ = run(capsys, "generate", family, *args)
    assert io.poset_to_json(io.parse_poset(out)) == out


def test_fixed_seed_output_is_byte_identical():
    a = subprocess_generate("random-distributive", "--seed", "11", "--size", "12")
    b = subprocess_generate("random-distributive", "--seed", "11", "--size", "12")
    assert a == b
    cmd = [sys.executable, "-m", "orthocat.cli", "cat0", a, "--trials", "5", "--seed", "2"]
    r1 = subprocess.run(cmd, capture_output=True, text=True)
    r2 = subprocess.run(cmd, capture_output=True, text=True)
    assert r1.returncode == 0 and r1.stdout == r2.stdout
