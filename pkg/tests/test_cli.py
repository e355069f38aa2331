import json
import subprocess
import sys

import jsonschema
import pytest

from extraspecial.cli import main, run_command
from extraspecial.config import ConfigError, config_load
from extraspecial.report import REPORT_SCHEMA, RunReport, render_text, strip_timings


def run_json(argv, tmp_path, capsys):
    code = main(argv + ["--json", "--cache-dir", str(tmp_path)])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_dickson_example(tmp_path, capsys):
    code, doc, _ = run_json(["dickson", "--p", "2", "--m", "2", "--s", "1"], tmp_path, capsys)
    assert code == 0
    assert doc["payload"]["invariants"] == {"Q_2,1": "t1^2 + t1*t2 + t2^2"}


def test_membership_both(tmp_path, capsys):
    code, doc, _ = run_json(["membership", "--p", "3", "--n", "1", "--R", "1", "--both"],
                            tmp_path, capsys)
    item = doc["payload"]["results"][0]
    assert code == 0 and doc["status"] == "pass"
    assert item["oracle"]["result"] == "NOT_IN_T"
    assert item["criterion"] is False and item["agreement"] is True
    assert item["certificate_valid"] is True


def test_membership_oracle_unsat_exits_one(tmp_path, capsys):
    code, doc, _ = run_json(["membership", "--p", "3", "--n", "1", "--R", "1", "--oracle"],
                            tmp_path, capsys)
    assert code == 1 and doc["status"] == "unsat"


def test_verify_recursion_rank_two(tmp_path, capsys):
    code, doc, _ = run_json(["verify", "kappa-recursion", "--p", "2", "--n", "2"], tmp_path, capsys)
    assert code == 0 and doc["status"] == "pass"


def test_failing_check_exits_one(tmp_path, capsys):
    # the norm identity fails on the Lagrangians transverse to the hyperplane at (3, 2)
    code, doc, _ = run_json(["verify", "norm-identity", "--p", "3", "--n", "2"], tmp_path, capsys)
    assert code == 1 and doc["status"] == "fail"
    assert doc["payload"]["checks"][0]["norm_identity"][0]["first_difference"] is not None


@pytest.mark.parametrize("argv,msg", [
    (["lagrangians", "--p", "4"], "p must be prime"),
    (["lagrangians", "--n", "0"], "n must be at least 1"),
    (["frobnicate"], "invalid choice"),
    (["steenrod", "--p", "2", "--op", "1"], "--poly is required"),
    (["steenrod", "--p", "2", "--op", "1", "--poly", "y1 +"], "position"),
])
def test_usage_errors_exit_two(argv, msg, tmp_path, capsys):
    code = main(argv + ["--json"])
    captured = capsys.readouterr()
    assert code == 2
    doc = json.loads(captured.out)
    assert doc["status"] == "error" and msg in doc["error"]
    jsonschema.validate(doc, REPORT_SCHEMA)


@pytest.mark.parametrize("argv", [
    ["dickson", "--p", "3", "--m", "2"],
    ["mui", "--p", "5", "--m", "1"],
    ["steenrod", "--p", "3", "--op", "1", "--poly", "y1^2*y2"],
    ["norm", "--p", "3", "--poly", "t1^2 + t2^2"],
    ["lagrangians", "--p", "3", "--n", "2"],
    ["zrel", "--p", "3", "--n", "2"],
    ["solve-f", "--p", "2", "--n", "2"],
    ["solve-eta", "--p", "2", "--n", "2"],
    ["membership", "--p", "3", "--n", "2", "--dmax", "16"],
    ["verify", "subgroup-restriction", "--p", "3", "--n", "2", "--R", "1,0"],
    ["verify", "norm-dickson", "--p", "2", "--n", "2"],
    ["verify", "additivity", "--p", "3", "--n", "2"],
    ["hilbert", "--p", "2", "--n", "2", "--dmax", "6"],
    ["presentation-check", "--p", "3", "--n", "1", "--dmax", "8"],
    ["invariants", "--p", "3", "--n", "1", "--dmax", "8"],
    ["enumerate-r", "--p", "3", "--n", "2", "--dmax", "20", "--filter", "prime"],
])
def test_subcommands_pass_and_conform(argv, tmp_path, capsys):
    code, doc, _ = run_json(argv, tmp_path, capsys)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert code == 0, doc
    # the same content renders as text
    text = render_text(RunReport(**doc))
    assert text.startswith("PASS")


def test_json_deterministic(tmp_path, capsys):
    argv = ["membership", "--p", "3", "--n", "2", "--dmax", "20"]
    _, a, _ = run_json(argv, tmp_path, capsys)
    _, b, _ = run_json(argv, tmp_path, capsys)
    assert json.dumps(strip_timings(a), sort_keys=True) == json.dumps(strip_timings(b), sort_keys=True)


def test_threads_env_gives_identical_output(tmp_path):
    argv = ["membership", "--p", "3", "--n", "2", "--dmax", "16", "--cache-dir", str(tmp_path)]
    one = run_command(argv, env={"EXTRASPECIAL_THREADS": "1"}).to_json()
    four = run_command(argv, env={"EXTRASPECIAL_THREADS": "4"}).to_json()
    assert one["config"]["threads"] == 1 and four["config"]["threads"] == 4
    assert strip_timings(one)["payload"] == strip_timings(four)["payload"]


def test_config_precedence(tmp_path):
    env = {"EXTRASPECIAL_THREADS": "3", "EXTRASPECIAL_CACHE_DIR": str(tmp_path)}
    cfg = config_load({}, env)
    assert (cfg.p, cfg.n, cfg.threads, cfg.cache_dir) == (2, 1, 3, tmp_path)
    cfg = config_load({"threads": 2, "p": 5}, env)
    assert (cfg.p, cfg.threads) == (5, 2)
    with pytest.raises(ConfigError, match="p must be prime"):
        config_load({"p": 9}, {})


def test_unsat_text_shows_certificate_row(tmp_path, capsys):
    code = main(["membership", "--p", "3", "--n", "1", "--R", "1", "--oracle",
                 "--cache-dir", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 1
    assert out.startswith("UNSAT")
    assert "(1,1,1,1)" in out


def test_console_script_module_entry(tmp_path):
    res = subprocess.run([sys.executable, "-m", "extraspecial.cli", "dickson", "--p", "2",
                          "--m", "2", "--s", "1", "--json"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["status"] == "pass"
