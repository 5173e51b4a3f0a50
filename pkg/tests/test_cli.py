import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from shuffle_bethe.cli import SEED_ENV, main
from shuffle_bethe.symbolic import materialize_tiny, substitute
from shuffle_bethe.bethe import G
from shuffle_bethe.signature import AlgebraSignature

G01 = json.dumps({"signature": {"m": 2, "n": 1}, "element": {"node": "builtin", "name": "G", "params": {"N": 1, "r": 0}}})
UNIT = json.dumps({"signature": {"m": 2, "n": 1}, "element": {"node": "unit"}})
GEN = json.dumps({"signature": {"m": 1, "n": 0}, "element": {"node": "generator", "color": 1, "exponent": -1}})


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_timing(report):
    report = json.loads(json.dumps(report))
    report["summary"].pop("wall_time_s")
    report["config"].pop("jobs", None)
    report["command"] = None
    return report


def test_dims(capsys):
    assert run(capsys, "dims", "3", "2")[:2] == (0, "1, 3, 9\n")
    assert run(capsys, "dims", "1", "5")[1] == "1, 1, 2, 3, 5, 7\n"
    assert run(capsys, "dims", "2", "0")[1] == "1\n"
    assert run(capsys, "dims", "0", "2")[0] == 2


def test_eval_examples(capsys):
    assert run(capsys, "eval", UNIT, json.dumps({"x": [[], [], []]}))[1].strip() == "1"
    assert run(capsys, "eval", GEN, json.dumps({"x": [["2/3"]]}))[1].strip() == "3/2"
    code, out, _ = run(capsys, "eval", G01, json.dumps({"q": 2, "d": 3, "s": [1, 1, 1], "x": [[1], [2], [3]]}))
    assert code == 0
    f, den, catalog, names = materialize_tiny(G(AlgebraSignature(2, 1), 0, 1))
    vals = {"x": 1, "y": 2, "z": 3, "q": 2, "d": 3, "s1": 1, "s2": 1}
    assert Fraction(out.strip()) == substitute(f, vals) / substitute(den, vals)


def test_eval_xi_and_file(capsys, tmp_path):
    path = tmp_path / "pt.json"
    path.write_text(json.dumps({"x": [["xi"]]}))
    code, out, _ = run(capsys, "eval", GEN, "@" + str(path))
    assert code == 0 and "xi" in out


@pytest.mark.parametrize("element,point", [
    ("{not json", json.dumps({"x": [[1]]})),
    (GEN, json.dumps({"q": 2})),
    (json.dumps({"signature": {"m": 1, "n": 0}, "element": {"node": "bogus"}}), json.dumps({"x": [[1]]})),
    (GEN, json.dumps({"x": [[0]]})),
])
def test_eval_malformed(element, point, capsys):
    assert run(capsys, "eval", element, point)[0] == 2


def test_usage_errors(capsys):
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "verify", "--suite", "identities", "--max-mn", "9")[0] == 2
    assert run(capsys, "verify", "--suite", "commutativity", "--m", "1", "--n", "1")[0] == 2
    assert run(capsys, "verify", "--trials", "0")[0] == 2


def test_example211_schema(capsys, tmp_path):
    out = tmp_path / "r.json"
    figs = tmp_path / "figs"
    code, _, err = run(capsys, "verify", "--suite", "example211", "--out", str(out), "--figures", str(figs))
    assert code == 0 and "passed" in err
    report = json.loads(out.read_text())
    assert {"version", "config", "checks", "summary"} <= set(report)
    for c in report["checks"]:
        assert {"name", "anchor", "params", "trials", "passed"} <= set(c)
    assert report["summary"]["failed"] == 0
    pngs = sorted(p.name for p in figs.iterdir())
    assert pngs == ["verify_example211_trials.png", "verify_example211_verdicts.png"]
    assert all((figs / p).stat().st_size > 1000 for p in pngs)


def test_seed_env_and_determinism(capsys, monkeypatch):
    args = ("verify", "--suite", "commutativity", "--m", "2", "--n", "0", "--max-N", "1", "--max-r", "2",
            "--trials", "2")
    monkeypatch.setenv(SEED_ENV, "7")
    a = run(capsys, *args)
    b = run(capsys, *args, "--seed", "7")
    c = run(capsys, *args, "--seed", "8")
    assert a[0] == b[0] == c[0] == 0
    ra, rb, rc = (json.loads(x[1]) for x in (a, b, c))
    assert ra["config"]["seed"] == 7
    assert strip_timing(ra) == strip_timing(rb)
    assert strip_timing(ra) != strip_timing(rc)
    monkeypatch.setenv(SEED_ENV, "abc")
    assert run(capsys, *args)[0] == 2


@pytest.mark.slow
def test_parallel_matches_serial(capsys):
    args = ("verify", "--suite", "membership", "--m", "2", "--n", "1", "--max-N", "1", "--seed", "3")
    serial = run(capsys, *args, "--jobs", "1")
    parallel = run(capsys, *args, "--jobs", "2")
    assert serial[0] == parallel[0] == 0
    assert strip_timing(json.loads(serial[1])) == strip_timing(json.loads(parallel[1]))


def test_printed_variant_exits_one(capsys):
    code, out, err = run(capsys, "verify", "--suite", "fusion", "--variant", "printed", "--trials", "1")
    assert code == 1
    report = json.loads(out)
    assert report["summary"]["failed"] > 0
    failing = [c for c in report["checks"] if not c["passed"] and c.get("role", "verdict") == "verdict"]
    assert all("witness" in c for c in failing)


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "shuffle_bethe.cli", "dims", "3", "2", "--figures", str(tmp_path)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "1, 3, 9"
    assert (tmp_path / "dims_K3.png").exists()
