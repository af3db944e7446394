from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from treeembed.cli import main
from treeembed.scans import CSV_HEADER

TIMING = {"wall_time", "runtime"}


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def run(tmp_path, *argv, name="report.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, json.loads(out.read_text())


@pytest.fixture
def schema(root):
    return json.loads((root / "src" / "treeembed" / "report_schema.json").read_text())


def test_oracle_fixture_not_contained(root, capsys):
    code = main(["oracle", "--tree", str(root / "fixtures" / "broom12.tree"),
                 "--host", str(root / "fixtures" / "twoclique12.g6")])
    assert code == 0
    assert capsys.readouterr().out.strip() == "NOT CONTAINED"


def test_unknown_flag_is_usage_error(capsys):
    assert main(["oracle", "--bogus"]) == 64
    assert "usage" in capsys.readouterr().err.lower()
    assert main([]) == 64


def test_pipeline_complete_host(tmp_path, schema):
    code, rep = run(tmp_path, "pipeline", "--host", "gen:complete:600", "--k", "200", "--seed", "3")
    assert code == 0 and rep["status"] == "ok"
    jsonschema.validate(rep, schema)
    assert rep["result"]["validator"]["ok"]


def test_precondition_exit_code(tmp_path, schema):
    code, rep = run(tmp_path, "pipeline", "--host", "gen:gnp:300:0.05", "--k", "100")
    assert code == 2 and rep["status"] == "precondition" and rep["error"]
    jsonschema.validate(rep, schema)


def test_construct_reports(tmp_path, schema):
    code, rep = run(tmp_path, "construct", "broom", "--k", "12", "--check")
    assert code == 0 and rep["result"]["ok"]
    jsonschema.validate(rep, schema)
    code, rep = run(tmp_path, "construct", "broom", "--k", "7")
    assert code == 2
    code, rep = run(tmp_path, "construct", "skew", "--r", "3/10", "--eta", "1/10", "--n", "1600")
    assert code == 2 and not rep["result"]["ok"]


def test_scan_and_partition(tmp_path, root, schema):
    code, rep = run(tmp_path, "scan", "es", "--corpus", str(root / "data" / "connected5.g6"), "--k-range", "1-4")
    assert code == 0 and rep["result"]["ok"]
    jsonschema.validate(rep, schema)
    code, rep = run(tmp_path, "partition", "--tree", "gen:labelled:300", "--ell", "30")
    assert code == 0
    jsonschema.validate(rep, schema)


def test_embed_methods(tmp_path, root):
    code, rep = run(tmp_path, "embed", "--tree", "gen:labelled:10", "--host", "gen:complete:12")
    assert code == 0 and rep["result"]["validator"]["ok"]
    code, rep = run(tmp_path, "embed", "--method", "exact", "--tree", str(root / "fixtures" / "broom12.tree"),
                    "--host", str(root / "fixtures" / "twoclique12.g6"))
    assert code == 0


def test_experiment_csv(tmp_path):
    csv_path = tmp_path / "bal.csv"
    code, rep = run(tmp_path, "experiment", "balanced", "--k", "4,6,8", "--method", "exact",
                    "--csv", str(csv_path), "--equivalence")
    assert code == 0
    header = csv_path.read_text().splitlines()[0]
    assert header == ",".join(CSV_HEADER)
    assert all(not e["mismatches"] for e in rep["result"]["equivalence"])


def test_reports_are_deterministic(capsys):
    argv = ["pipeline", "--host", "gen:complete:600", "--k", "200", "--seed", "5"]
    texts = []
    for _ in range(2):
        assert main(argv) == 0
        texts.append(capsys.readouterr().out)
    ja, jb = (strip_timing(json.loads(t)) for t in texts)
    assert json.dumps(ja, sort_keys=True) == json.dumps(jb, sort_keys=True)
    assert texts[0] != "" and json.loads(texts[0])["config"]["seed"] == 5


def test_seed_env_and_config(tmp_path, monkeypatch):
    monkeypatch.setenv("TREEEMBED_SEED", "11")
    code, rep = run(tmp_path, "partition", "--tree", "gen:labelled:50", "--ell", "5")
    assert rep["config"]["seed"] == 11
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ell": 7, "seed": 4}))
    code, rep = run(tmp_path, "partition", "--tree", "gen:labelled:50", "--config", str(cfg))
    assert code == 0 and rep["config"]["ell"] == 7 and rep["config"]["seed"] == 4
    code, rep = run(tmp_path, "partition", "--tree", "gen:labelled:50", "--ell", "9", "--config", str(cfg))
    assert rep["config"]["ell"] == 9


def test_module_entry_point(root):
    proc = subprocess.run([sys.executable, "-m", "treeembed", "oracle", "--tree", str(root / "fixtures" / "broom12.tree"),
                           "--host", str(root / "fixtures" / "twoclique12.g6")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "NOT CONTAINED"
