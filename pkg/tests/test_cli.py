import json
import subprocess
import sys

import pytest

from repairsched.cli import main
from repairsched import jsonio


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_solve_example1(capsys):
    code, out, _ = run(capsys, "solve", "--instance", "data/ex1.json", "--method", "nonjumping")
    assert code == 0 and out["reward"] == 2
    code, out, _ = run(capsys, "solve", "--instance", "data/ex1.json", "--method", "exhaustive")
    assert out["reward"] == 2 and out["repaired"] == [2, 3]


def test_policy_examples(capsys):
    _, out, _ = run(capsys, "policy", "--instance", "data/ex3.json", "--name", "least-modified")
    assert out["reward"] == 0 and out["jumps"]
    _, out, _ = run(capsys, "policy", "--instance", "data/ex1.json", "--name", "healthiest")
    assert out["reward"] == 1
    _, out, _ = run(capsys, "policy", "--instance", "data/ex2.json", "--name", "least-modified")
    assert out["reward"] == 1
    _, out, _ = run(capsys, "policy", "--instance", "data/ex3.json", "--name", "order", "--order", "2,1")
    assert out["reward"] == 1


def test_simulate_both_forms(capsys):
    steps = ",".join(["2"] * 7 + ["3"] * 9)
    _, a, _ = run(capsys, "simulate", "--instance", "data/ex1.json", "--actions", steps)
    _, b, _ = run(capsys, "simulate", "--instance", "data/ex1.json", "--actions", "order:2,3")
    assert a["reward"] == b["reward"] == 2
    assert a["actions"] == b["actions"]


def test_horizon_override(capsys):
    _, out, _ = run(capsys, "solve", "--instance", "data/ex1.json", "--T", "5")
    assert out["reward"] == 1


def test_reduce(capsys):
    _, out, _ = run(capsys, "reduce", "--graph", "data/k3.json", "--p", "3", "--decide")
    assert out["clique"] is True and out["brute_force"] is True and out["z"] == 0
    _, out, _ = run(capsys, "reduce", "--graph", "data/path3.json", "--p", "3", "--decide")
    assert out["clique"] is False and out["threshold"] == 7


def test_classify(capsys):
    _, out, _ = run(capsys, "classify", "--instance", "data/ex1.json")
    assert out["assumption1"] == {"n": 1, "m": [4, 7, 2]}
    assert out["forest_k"] == 2 and out["complete_series"] is False


def test_gen_round_trip(capsys, tmp_path):
    path = tmp_path / "g.json"
    code, out, _ = run(capsys, "gen", "--n", "5", "--graph-class", "forest:3", "--regime", "decay-a1",
                       "--T", "12", "--seed", "9", "--out", str(path))
    assert code == 0 and out["T"] == 12
    assert jsonio.instance_to_json(jsonio.load_instance(path)) == out


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lemma1", "--seeds", "5")
    assert code == 0 and out["violations"] == []


def test_domain_errors(capsys, tmp_path):
    code, out, err = run(capsys, "simulate", "--instance", "data/ex1.json", "--actions", "3")
    assert code == 1 and out is None and "PrecedenceViolation" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": [{"id": 1, "v0": "1", "inc": "1/10", "dec": "1/10"}], "edges": []}')
    code, _, _ = run(capsys, "solve", "--instance", str(bad))
    assert code == 1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["solve"])
    assert e.value.code == 64
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 64
    assert main(["policy", "--instance", "data/ex1.json", "--name", "order"]) == 64
    assert main(["gen", "--n", "3", "--graph-class", "ring"]) == 64


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "repairsched", "solve", "--instance", "data/ex2.json"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["reward"] == 2
