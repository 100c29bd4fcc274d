import json
import subprocess
import sys

import pytest

from vlineq.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, EXIT_PARSE, EXIT_USAGE, main
from vlineq.suites import EXAMPLE_RESOURCE

EXAMPLE = str(__import__("vlineq").__path__[0]) + "/data/" + EXAMPLE_RESOURCE


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_bundled_example(capsys):
    code, out, _ = run(["verify", "--instance", EXAMPLE], capsys)
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["passed"] and d["instances"] == 2


def test_verify_text_and_report_file(capsys, tmp_path):
    target = tmp_path / "r.txt"
    code, out, _ = run(["verify", "--suite", "modulus", "--trials", "3", "--format", "text", "--report", str(target)], capsys)
    assert code == EXIT_OK and out == ""
    assert target.read_text().startswith("[PASS] modulus: 3/3")


def test_grid_options_reach_report(capsys):
    argv = ["verify", "--suite", "geometric-mean", "--trials", "2", "--grid-theta", "512", "--grid-lambda", "64", "--refine", "30", "--tol", "1e-8"]
    code, out, _ = run(argv, capsys)
    d = json.loads(out)
    assert code == EXIT_OK
    assert d["grid_diagnostics"]["theta_points"] == 512
    assert d["grid_diagnostics"]["lambda_points"] == 64
    assert d["grid_diagnostics"]["refine_iters"] == 30


def test_seed_env_and_flag(capsys, monkeypatch):
    monkeypatch.setenv("VLINEQ_SEED", "77")
    _, out, _ = run(["verify", "--suite", "holder", "--trials", "2"], capsys)
    assert json.loads(out)["seed"] == 77
    _, out2, _ = run(["verify", "--suite", "holder", "--trials", "2", "--seed", "77"], capsys)
    assert out == out2
    _, out3, _ = run(["verify", "--suite", "holder", "--trials", "2", "--seed", "5"], capsys)
    assert json.loads(out3)["seed"] == 5


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["verify", "--instance", str(bad)], capsys)[0] == EXIT_PARSE
    assert run(["verify", "--instance", str(tmp_path / "missing.json")], capsys)[0] == EXIT_PARSE
    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps({"field": "real", "maps": {"M": [[-1]]}}))
    code, _, err = run(["verify", "--instance", str(invalid)], capsys)
    assert code == EXIT_INVALID and "/maps/M/0/0" in err
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nope"])
    assert exc.value.code == EXIT_USAGE
    capsys.readouterr()


def test_failing_check_exit_code(capsys, tmp_path):
    inst = json.loads(open(EXAMPLE).read())
    inst["checks"][1]["params"]["expect_equality"] = False
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(inst))
    assert run(["verify", "--instance", str(path)], capsys)[0] == EXIT_FAILED


def test_generate_then_verify(capsys, tmp_path):
    out = tmp_path / "g.json"
    assert run(["generate", "--kind", "psd-form", "--dims", "3,2", "--seed", "7", "--out", str(out)], capsys)[0] == EXIT_OK
    first = out.read_text()
    run(["generate", "--kind", "psd-form", "--dims", "3,2", "--seed", "7", "--out", str(out)], capsys)
    assert out.read_text() == first
    assert run(["verify", "--instance", str(out)], capsys)[0] == EXIT_OK
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--kind", "psd-form", "--dims", "0,2", "--out", str(out)])
    assert exc.value.code == EXIT_USAGE


def test_console_script_module_entry(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "vlineq.cli", "verify", "--instance", EXAMPLE, "--format", "text"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("[PASS] instance")
