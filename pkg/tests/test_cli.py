import json
import math
import subprocess
import sys

import pytest

from quasihull import cli

RHOMBUS = {"points": [[0, 0], [1, 0], [1, 1], [0, 1]], "allow_lightlike": True}
SQUARE = {"points": [[0, 0], [1, 1], ["inf", 3], [-1, -2]]}


def run_cli(capsys, tmp_path, command, config, *flags):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    code = cli.main([command, "--config", str(path), *flags])
    return code, capsys.readouterr().out


def test_width_of_the_rhombus(capsys, tmp_path):
    code, out = run_cli(capsys, tmp_path, "width", RHOMBUS)
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "width"
    assert report["result"]["lower"] == pytest.approx(math.pi / 2, abs=1e-6)


def test_reports_are_byte_identical(capsys, tmp_path):
    cfg = {"map": {"samples": [[0, 0], [1, 2], [3, 4], ["inf", "inf"]]}, "count": 64}
    _, first = run_cli(capsys, tmp_path, "qsnorm", cfg, "--seed", "4")
    _, second = run_cli(capsys, tmp_path, "qsnorm", cfg, "--seed", "4")
    assert first == second
    assert json.loads(first)["config_hash"] == json.loads(second)["config_hash"]


def test_config_hash_tracks_the_seed(capsys, tmp_path):
    cfg = {"map": {"samples": [[0, 0], [1, 2], [3, 4], ["inf", "inf"]]}, "count": 64}
    _, a = run_cli(capsys, tmp_path, "qsnorm", cfg, "--seed", "1")
    _, b = run_cli(capsys, tmp_path, "qsnorm", cfg, "--seed", "2")
    assert json.loads(a)["config_hash"] != json.loads(b)["config_hash"]


def test_missing_seed_is_a_schema_error(capsys, tmp_path):
    cfg = {"map": {"samples": [[0, 0], [1, 2], [3, 4]]}}
    code, out = run_cli(capsys, tmp_path, "qsnorm", cfg)
    assert code == cli.EXIT_SCHEMA == 3
    assert json.loads(out)["error"]["kind"] == "schema"


def test_malformed_input_is_a_schema_error(capsys, tmp_path):
    code, _ = run_cli(capsys, tmp_path, "hull-hyp", {"points": "nope"})
    assert code == 3


def test_domain_errors_exit_with_two(capsys, tmp_path):
    code, out = run_cli(capsys, tmp_path, "hull-ads", {"points": [[0, 0], [1, 3], [2, 1]]})
    assert code == cli.EXIT_DOMAIN == 2
    err = json.loads(out)["error"]
    assert err["kind"] == "domain" and err["type"] == "NotAcausal"


def test_gluing_csv_output(capsys, tmp_path):
    cfg = {"geometry": "ads", **SQUARE}
    code, out = run_cli(capsys, tmp_path, "gluing", cfg, "--format", "csv", "--out", str(tmp_path / "out"))
    assert code == 0
    assert out.startswith("index,x,y\r\n")
    assert (tmp_path / "out" / "gluing.csv").read_bytes() == out.encode()
    assert json.loads((tmp_path / "out" / "gluing.json").read_text())["command"] == "gluing"


def test_hull_hyp_and_earthquake(capsys, tmp_path):
    code, out = run_cli(capsys, tmp_path, "hull-hyp", {"points": [[0, 0], [1, 0], "inf", [1, 1]]})
    assert code == 0 and len(json.loads(out)["result"]["faces"]) == 4
    eq_cfg = {"lamination": {"leaves": [{"p": 0, "q": "inf", "w": 1.0}]}, "base": -1, "points": [[2, 0], [1, 1]]}
    code, out = run_cli(capsys, tmp_path, "earthquake", eq_cfg)
    values = json.loads(out)["result"]["values"]
    assert values[0]["image"] == pytest.approx(2 * math.e)


def test_mess_check_batch(capsys, tmp_path):
    cfg = {"random": {"count": 5, "min_vertices": 4, "max_vertices": 6}}
    code, out = run_cli(capsys, tmp_path, "mess-check", cfg, "--seed", "3")
    result = json.loads(out)["result"]
    assert code == 0 and result["count"] == 5 and result["ok"]


def test_degeneration_study_csv(capsys, tmp_path):
    code, out = run_cli(capsys, tmp_path, "degeneration-study", {"family": "rhombus", "steps": 4}, "--format", "csv")
    lines = out.strip().split("\r\n")
    assert lines[0] == "parameter,width,qs_norm_estimate"
    widths = [float(line.split(",")[1]) for line in lines[1:]]
    assert widths == sorted(widths)


def test_run_dispatches_on_the_config_command(capsys, tmp_path):
    code, out = run_cli(capsys, tmp_path, "run", {"command": "width", "input": RHOMBUS})
    assert code == 0 and json.loads(out)["command"] == "width"
    code, _ = run_cli(capsys, tmp_path, "run", {"command": "nonsense", "input": {}})
    assert code == 3


def test_approx_lam_claims(capsys, tmp_path):
    cfg = {"lamination": {"leaves": [{"p": -1, "q": 1, "w": 0.5}]}, "n": 1, "k": 1}
    code, out = run_cli(capsys, tmp_path, "approx-lam", cfg)
    result = json.loads(out)["result"]
    assert code == 0 and all(result["claims"].values()) and result["restriction_equal"]


def test_module_entry_point_reads_stdin():
    proc = subprocess.run(
        [sys.executable, "-m", "quasihull", "width", "--config", "-"],
        input=json.dumps(RHOMBUS), capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["lower"] == pytest.approx(math.pi / 2, abs=1e-6)
