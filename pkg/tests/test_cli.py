import json
import os
import subprocess
import sys

import pytest

from ellqg.cli import ConfigError, build_config, main, parse_config, run_suite

MINIMAL = {
    "q": 0.5, "r": 3.0, "k": 0.0, "N": 2, "n": 2, "lambda": [1, 1],
    "P": [1.7], "z": [[0.8, 0.0], [0.0, 0.9]],
}


def write_config(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_parse_minimal_config(tmp_path):
    cfg = parse_config(write_config(tmp_path, MINIMAL))
    assert cfg.q == 0.5
    assert cfg.P == (1.7 + 0j,)
    assert cfg.z == (0.8 + 0j, 0.9j)
    assert cfg.trunc_eps == 1e-14
    assert cfg.max_terms == 512
    assert cfg.seed == 0


def test_parse_rejects_bad_q(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(write_config(tmp_path, {**MINIMAL, "q": 1.5}))


def test_parse_rejects_r_equal_k(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(write_config(tmp_path, {**MINIMAL, "k": 3.0}))


def test_parse_rejects_shape_mismatch(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(write_config(tmp_path, {**MINIMAL, "lambda": [2, 1]}))
    with pytest.raises(ConfigError):
        parse_config(write_config(tmp_path, {**MINIMAL, "P": [1.0, 2.0]}))


def test_parse_rejects_unknown_key(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(write_config(tmp_path, {**MINIMAL, "mystery": 1}))


def test_parse_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/config.json")


def test_exit_code_2_on_bad_config(tmp_path, capsys):
    path = write_config(tmp_path, {**MINIMAL, "q": -1.0})
    assert main(["--config", path, "theta"]) == 2


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nosuchsuite"])
    assert exc.value.code == 2


def test_theta_command_runs(capsys):
    assert main(["theta"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert "values" in out and len(out["values"]) == 2


def test_rmat_command_entries(capsys):
    assert main(["rmat"]) == 0
    out = json.loads(capsys.readouterr().out)
    pairs = {(tuple(e["in"]), tuple(e["out"])) for e in out["entries"]}
    assert ((1, 2), (2, 1)) in pairs
    assert ((1, 1), (1, 1)) in pairs


def test_wf_eval_and_triangularity(capsys):
    assert main(["wf", "eval"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["records"]) == 2
    assert main(["wf", "triangularity"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["records"]) == 4


def test_gt_basis_and_act(capsys):
    assert main(["gt", "basis"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["records"]) == 2
    assert main(["gt", "act", "--op", "e", "--j", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["op"] == "e"


def test_qkz_eval_and_quad(capsys):
    assert main(["qkz", "eval"]) == 0
    json.loads(capsys.readouterr().out)
    assert main(["qkz", "quad", "--gridsize", "8"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert "report" in out


def test_run_suite_report_shape():
    cfg = build_config({})
    report = run_suite("ellfn", cfg)
    assert report["all_pass"]
    for check in report["checks"]:
        assert set(check) >= {"id", "residual", "tolerance", "pass"}


def test_run_suite_unknown_name():
    cfg = build_config({})
    with pytest.raises(ConfigError):
        run_suite("nope", cfg)


def test_verify_determinism(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["--out", str(out1), "--seed", "3", "verify", "ellfn"]) == 0
    assert main(["--out", str(out2), "--seed", "3", "verify", "ellfn"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_verify_seed_changes_draws(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["--out", str(out1), "--seed", "3", "verify", "ellfn"]) == 0
    assert main(["--out", str(out2), "--seed", "4", "verify", "ellfn"]) == 0
    assert out1.read_bytes() != out2.read_bytes()


def test_jobs_parallel_matches_serial(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["--out", str(out1), "verify", "rmat"]) == 0
    assert main(["--out", str(out2), "--jobs", "4", "verify", "rmat"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_break_shift_fails_gt_suite(tmp_path):
    assert main(["--out", str(tmp_path / "r.json"), "verify", "gt",
                 "--break-shift"]) == 1
    report = json.loads((tmp_path / "r.json").read_text())
    failed = {c["id"] for c in report["checks"] if not c["pass"]}
    assert "gt.exchange_ee" in failed


def test_cli_entry_point_subprocess():
    env = dict(os.environ)
    src = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                       "src")
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    proc = subprocess.run([sys.executable, "-m", "ellqg.cli", "verify", "rmat"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["all_pass"]


def test_shipped_default_config_matches_builtin():
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    shipped = os.path.join(here, "configs", "default.json")
    assert parse_config(shipped) == build_config({})


def test_shared_flags_valid_before_and_after_subcommand(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(["--seed", "3", "--out", str(out1), "verify", "ellfn"]) == 0
    assert main(["verify", "ellfn", "--seed", "3", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
