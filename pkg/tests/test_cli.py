import json

import pytest

from ladditive.cli import main
from ladditive.functions import builtin, spec_to_json
from ladditive.reconstruction import tabulate, write_table


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return _run


@pytest.fixture
def files(tmp_path):
    d_spec = tmp_path / "d-spec.json"
    d_spec.write_text(json.dumps(spec_to_json(builtin("D"))))
    d2_spec = tmp_path / "d2-spec.json"
    d2_spec.write_text(json.dumps({"x": {"overrides": {"2": "1"}, "default": {"kind": "const", "value": "0"}},
                                   "y": {"default": {"kind": "prime"}}}))
    table = tabulate(builtin("D"), 1000)
    d_table = tmp_path / "d-table.csv"
    write_table(table, d_table)
    corrupted = tmp_path / "corrupted-table.csv"
    write_table(table.replace(4, 3).replace(8, 5), corrupted)
    theta = tmp_path / "theta.csv"
    write_table(tabulate(builtin("theta"), 50), theta)
    return {"d_spec": d_spec, "d2_spec": d2_spec, "d_table": d_table,
            "corrupted": corrupted, "theta": theta, "dir": tmp_path}


def test_factor(run):
    assert run("factor", 360) == (0, "2^3 * 3^2 * 5\n", "")
    assert run("factor", 1)[1] == "1\n"


def test_deriv_and_ld(run):
    assert run("deriv", 60, "--all")[:2] == (0, "92\n")
    assert run("deriv", 60)[:2] == (0, "92\n")
    assert run("deriv", 60, "--set", "2,5")[:2] == (0, "72\n")
    assert run("deriv", 12, "--complement", "2")[:2] == (0, "4\n")
    assert run("ld", 8, "--all")[:2] == (0, "3/2\n")
    assert run("ld", 8, "--float")[1] == "3/2\t1.5\n"


@pytest.mark.parametrize("argv", [
    ("deriv", 0), ("deriv", "x"), ("deriv", 6, "--set", ""), ("deriv", 6, "--set", "4"),
    ("deriv", 6, "--set", "2", "--all"), ("factor",), ("bounds", 1), ("nonsense",),
])
def test_usage_errors(run, argv):
    code, out, err = run(*argv)
    assert code == 2 and err


def test_eval(run, files):
    assert run("eval", files["d_spec"], 12)[:2] == (0, "16\n")
    assert run("eval", "--builtin", "D_S=2,5", 60)[:2] == (0, "72\n")
    assert run("eval", files["d_spec"], 12, "--builtin", "D")[0] == 2
    assert run("eval", 12)[0] == 2
    bad = files["dir"] / "bad.json"
    bad.write_text('{"x": {}, "y": {"default": {"kind": "const", "value": "0"}}}')
    code, _, err = run("eval", bad, 3)
    assert code == 2 and "nonzero" in err
    assert run("eval", files["dir"] / "missing.json", 3)[0] == 2


def test_decompose(run, files):
    code, out, _ = run("decompose", files["d_spec"])
    assert code == 0
    assert json.loads(out) == {"g": {"x": {"overrides": {}, "default": {"kind": "reciprocal-prime"}}},
                               "h": {"y": {"overrides": {}, "default": {"kind": "prime"}}}}


def test_tabulate(run, files):
    code, out, _ = run("tabulate", "--builtin", "D", 6)
    assert (code, out) == (0, "n,f\n1,0\n2,1\n3,1\n4,4\n5,1\n6,5\n")
    dest = files["dir"] / "out.csv"
    assert run("tabulate", "--spec", files["d_spec"], 6, "-o", dest)[0] == 0
    assert dest.read_text() == out


def test_reconstruct(run, files):
    code, out, _ = run("reconstruct", files["d_table"], "--primes", 13)
    assert code == 0
    assert json.loads(out) == {"overrides": {str(p): str(p) for p in (2, 3, 5, 7, 11, 13)}}


def test_check(run, files):
    assert run("check", files["d_table"])[:2] == (0, "accepted\n")
    code, out, _ = run("check", files["corrupted"])
    assert (code, out) == (1, "rejected: g(8) ≠ g(2)+g(4)\n")
    code, out, _ = run("check", files["d_table"], "--primes", 10, "--report")
    assert code == 0
    report = json.loads(out.split("\n", 1)[1])
    assert report["ii"]["status"] == "holds"
    assert run("check", files["theta"])[0] == 2
    bad = files["dir"] / "bad.csv"
    bad.write_text("n,f\n1,0\n3,1\n")
    assert run("check", bad)[0] == 2


def test_bounds(run, files):
    code, out, _ = run("bounds", 8)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n = 8, class = power_of_two"
    assert [ln.split()[-1] for ln in lines[2:]] == ["equal"] * 5
    code, out, _ = run("bounds", 6, "--spec", files["d2_spec"])
    assert code == 0
    row = next(ln for ln in out.splitlines() if ln.startswith("ext-westrick"))
    assert row.split() == ["ext-westrick", "3", "1", "precondition-violated(s<r)"]
    code, out, _ = run("bounds", 12, "--builtin", "D", "--float")
    assert "(~" in out


def test_sweep(run, files):
    code, out, _ = run("sweep", "--max", 10000, "--builtin", "D", "--props", "leibniz,chain-eq10")
    assert code == 0
    report = json.loads(out)
    assert set(report) == {"leibniz", "chain-eq10"}
    code, _, _ = run("sweep", "--max", 200, "--table", files["corrupted"], "--props", "leibniz")
    assert code == 1
    dest = files["dir"] / "r.json"
    assert run("sweep", "--max", 100, "-o", dest, "--props", "westrick-eq11")[0] == 0
    assert json.loads(dest.read_text())["westrick-eq11"]["passed"]
    assert run("sweep", "--max", 100, "--props", "bogus")[0] == 2
