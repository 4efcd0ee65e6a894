import io
import json

import pytest

from bilinear_lab.cli import run
from bilinear_lab.exponents import CITE_GLOBAL


def _run(argv):
    buf = io.StringIO()
    code = run(argv, buf)
    return code, buf.getvalue()


def test_classify_global_example():
    code, out = _run(["classify", "--d", "2", "--p", "2", "--q", "2", "--r", "1",
                      "--op", "global"])
    assert code == 0
    data = json.loads(out)
    assert data["status"] == "Bounded"
    assert data["citation"] == CITE_GLOBAL


def test_classify_csv_uses_lf():
    code, out = _run(["classify", "--d", "3", "--p", "3/2", "--q", "3", "--r", "1",
                      "--format", "csv"])
    assert code == 0
    assert "\r" not in out
    header, row = out.strip().split("\n")
    assert "status" in header.split(",")


def test_config_error_exit_code(capsys):
    code, _ = _run(["classify", "--p", "1/3", "--q", "2", "--r", "1"])
    assert code == 2
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "config"


def test_unknown_subcommand_exit_code():
    assert _run(["nope"])[0] == 2


def test_assertion_failure_exit_code(capsys):
    code, _ = _run(["scan", "--family", "scaling", "--p", "2", "--q", "4", "--r", "2",
                    "--slope-tol", "-1"])
    assert code == 1
    assert json.loads(capsys.readouterr().err.strip())["error"] == "assertion"


def test_scaling_scan_passes():
    code, out = _run(["scan", "--family", "scaling", "--p", "2", "--q", "4", "--r", "2",
                      "--format", "json"])
    assert code == 0
    assert json.loads(out)["target"] == pytest.approx(-0.5)


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"classify": {"d": 3, "p": "2", "q": "2", "r": "1"}}))
    _, out = _run(["--config", str(cfg), "classify"])
    assert json.loads(out)["d"] == 3
    _, out = _run(["--config", str(cfg), "classify", "--d", "4"])
    assert json.loads(out)["d"] == 4


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]")
    assert _run(["--config", str(cfg), "classify"])[0] == 2


def test_slice_check_deterministic():
    argv = ["--seed", "7", "slice-check", "--n", "32", "--pairs", "2"]
    code_a, a = _run(argv)
    code_b, b = _run(argv)
    assert code_a == code_b == 0
    assert a == b
    data = json.loads(a)
    assert data["seed"] == 7
    assert data["max_rel_error"] <= 1e-6


def test_seed_after_subcommand():
    _, out = _run(["slice-check", "--seed", "3", "--n", "32", "--pairs", "1"])
    assert json.loads(out)["seed"] == 3


def test_partition_and_reconstruct():
    code, out = _run(["partition", "--n", "16"])
    assert code == 0 and json.loads(out)["passed"]
    code, out = _run(["br-reconstruct", "--format", "csv"])
    assert code == 0
    assert out.splitlines()[0].startswith("alpha,J,sup_error")


def test_report_subset():
    code, out = _run(["report", "--only", "exponents,partition"])
    assert code == 0
    data = json.loads(out)
    assert [c["name"] for c in data["checks"]] == ["exponent calculus", "multiplier partition"]
    assert _run(["report", "--only", "bogus"])[0] == 2


def test_threads_do_not_change_output():
    a = _run(["--threads", "1", "classify", "--op", "local"])[1]
    b = _run(["--threads", "4", "classify", "--op", "local"])[1]
    assert a == b


def test_top_level_seed_with_section(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "slice-check": {"n": 32, "pairs": 1}}))
    _, out = _run(["--config", str(cfg), "slice-check"])
    data = json.loads(out)
    assert data["seed"] == 3
    assert data["params"]["n"] == 32
