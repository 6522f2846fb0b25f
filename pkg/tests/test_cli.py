import json

import pytest

from deltaramsey.cli import config_hash, main, run_config


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def report(out):
    (path,) = [p for p in out.iterdir() if p.suffix == ".json"]
    return json.loads(path.read_text())


def test_qrec_task(tmp_path):
    cfg = {"task": "qrec", "semigroup": {"catalog": "Z5"}, "measure": {"kind": "counting"},
           "params": {"set": [0, 1]}}
    out = tmp_path / "out"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out), "--csv"]) == 0
    rep = report(out)
    assert rep["result"]["good_h"] == [0, 1, 4] and rep["result"]["bound"] == "4/75"
    assert rep["config_hash"] == config_hash(cfg)
    assert any(p.suffix == ".csv" for p in out.iterdir())


def test_ramsey_task_true_relation(tmp_path):
    cfg = {"task": "ramsey", "semigroup": {"catalog": "Z5"}, "oracle": {"kind": "uniform"},
           "params": {"relation": "true", "n": 3}}
    out = tmp_path / "out"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    rep = report(out)
    assert len(rep["result"]["transcript"]["witness"]) == 4
    assert rep["result"]["verifier"] == []


def test_malformed_table_exits_2(tmp_path):
    cfg = {"task": "derive", "semigroup": {"table": [[0, 5], [1, 0]]}, "params": {"set": [0]}}
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(tmp_path)]) == 2


def test_schema_error_exits_2(tmp_path):
    assert main(["run", "--config", write(tmp_path, {"task": "qrec"}), "--out", str(tmp_path)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["frobnicate"]) == 2


def test_task_failure_exits_1(tmp_path):
    cfg = {"task": "qrec", "semigroup": {"catalog": "Z5"}, "measure": {"kind": "counting"},
           "params": {"set": []}}
    out = tmp_path / "out"
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 1
    rep = report(out)
    assert rep["error"]["type"] == "PreconditionViolated"


@pytest.mark.parametrize("cfg", [
    {"task": "derive", "semigroup": {"catalog": "Z6"}, "params": {"set": [0, 1, 2, 3], "steps": [1, 1]}},
    {"task": "delta", "semigroup": {"catalog": "Z6"}, "oracle": {"kind": "uniform"}, "params": {"set": [0, 3]}},
    {"task": "recur", "semigroup": {"catalog": "S3"}, "oracle": {"kind": "frechet", "k": 1}, "params": {"set": [0, 1, 2, 3]}},
    {"task": "tree", "semigroup": {"catalog": "Z5"}, "oracle": {"kind": "uniform"}, "params": {"set": [0, 1]}},
    {"task": "vdc", "semigroup": {"catalog": "Z8"}, "oracle": {"kind": "frechet", "k": 1}, "params": {"eps": 0.25, "hyp_eps": 0.1}, "seed": 4},
    {"task": "audit", "semigroup": {"catalog": "Z4"}, "measure": {"kind": "counting"}},
    {"task": "density", "semigroup": {"catalog": "truncated_nat", "N": 20},
     "measure": {"kind": "upper_density", "windows": [[0, 10], [0, 20]]}, "params": {"set": list(range(0, 20, 2)), "N": 2}},
])
def test_every_task_is_deterministic(cfg):
    a, _, code_a = run_config(cfg)
    b, _, code_b = run_config(cfg)
    assert code_a == code_b == 0
    strip = lambda r: json.dumps({k: v for k, v in r.items() if k != "timing"}, sort_keys=True, default=str)
    assert strip(a) == strip(b)


def test_derive_values():
    cfg = {"task": "derive", "semigroup": {"catalog": "Z6"}, "params": {"set": [0, 1, 2, 3], "steps": [1, 1]}}
    rep, _, _ = run_config(cfg)
    assert rep["result"]["derivative"] == [0, 1]


def test_suite_command(capsys):
    assert main(["suite", "--select", "algebra"]) == 0
    assert "[PASS]" in capsys.readouterr().out


def test_suite_writes_matrix(tmp_path):
    assert main(["suite", "--select", "triple", "--out", str(tmp_path), "--determinism"]) == 0
    agg = json.loads((tmp_path / "suite-triple.json").read_text())
    assert all(agg["matrix"].values())
