import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from heegner_lab.cli import run_capture

GOLDEN = Path(__file__).parent / "golden"
GOLDEN_CASES = {
    "analyze_m2_d1": ["analyze", "--m", "2", "--d", "1", "--gamma", "1", "--format", "json"],
    "normality_t9_d15_g2": ["normality", "--t", "9", "--d", "15", "--gamma", "2", "--json"],
    "classify_t1_d1_k": ["classify", "--t", "1", "--d", "1", "--beta", "0,0,1,0", "--json"],
    "enumerate_m2_d5": ["enumerate", "--m", "2", "--d", "5", "--json"],
    "enumerate_m2_d20": ["enumerate", "--m", "2", "--d", "20", "--json"],
    "disc_form_t9_d15_g2": ["disc-form", "--t", "9", "--d", "15", "--gamma", "2", "--group", "--json"],
}


def call(*argv):
    return run_capture(list(argv))


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden(name):
    code, out, _ = call(*GOLDEN_CASES[name])
    assert code == 0
    path = GOLDEN / f"{name}.json"
    if os.environ.get("HEEGNER_LAB_REGEN_GOLDEN"):
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")


def test_analyze_d1_content():
    code, out, _ = call("analyze", "--m", "2", "--d", "1", "--gamma", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["schema"] == "heegner-lab/1"
    (rec,) = data["divisors"]
    assert (rec["label"], rec["disc_Kperp"], rec["image_status"]) == ("nontrivial", 4, "meets_image")


def test_normality_counterexample_table():
    code, out, _ = call("normality", "--t", "9", "--d", "15", "--gamma", "2")
    assert code == 0
    assert "not_normal" in out and "[[1, 10], [6, 2]]" in out and "[[1, 5], [3, 2]]" in out


def test_classify_identity():
    code, out, _ = call("classify", "--t", "1", "--d", "1", "--beta", "0,0,1,0", "--json")
    cls = json.loads(out)["class"]
    assert code == 0 and cls["label"] == "id" and cls["beta_sq"] == -2


@pytest.mark.parametrize(
    "argv,code,rule",
    [
        (["normality", "--t", "1", "--d", "1", "--gamma", "2"], 2, "gamma_sq_divides_d_plus_tc2"),
        (["disc-form", "--t", "4", "--d", "4", "--gamma", "2", "--group", "--budget", "10"], 3, "enumeration_budget"),
        (["normality", "--t", "2", "--d", "14", "--gamma", "4"], 2, "c_not_unique"),
        (["normality", "--t", "2", "--d", "14", "--gamma", "4", "--c", "3"], 0, None),
        (["analyze", "--m", "3", "--d", "14", "--gamma", "4"], 2, "c_not_unique"),
        (["analyze", "--m", "2", "--d", "2", "--gamma", "4"], 2, "gamma_sq_divides_d_plus_tc2"),
        (["classify", "--t", "1", "--d", "1", "--beta", "1,0,1,1"], 2, "square_divides_twice_div"),
        (["enumerate", "--m", "10", "--d", "15", "--budget", "5"], 3, "enumeration_budget"),
        (["enumerate", "--m", "4", "--d", "3"], 2, "normality_required"),
        (["normality", "--t", "1", "--d", "1", "--gamma", "1", "--bogus"], 2, "cli_usage"),
        (["frobnicate"], 2, "cli_usage"),
        (["normality", "--t", "1"], 2, "cli_usage"),
    ],
)
def test_exit_codes(argv, code, rule):
    got, out, err = call(*argv, "--json") if argv[0] != "frobnicate" else call(*argv)
    assert got == code, err
    if rule:
        assert f"[{rule}]" in err


def test_omega_ne_1_is_undecided():
    code, out, _ = call("normality", "--t", "4", "--d", "4", "--gamma", "2", "--json")
    assert code == 0 and json.loads(out)["normality"]["status"] == "undecided"
    code, _, err = call("analyze", "--m", "5", "--d", "4", "--gamma", "2")
    assert code == 2 and "normality_required" in err


def test_error_json_payload():
    code, out, _ = call("normality", "--t", "1", "--d", "1", "--gamma", "2", "--json")
    data = json.loads(out)
    assert code == 2 and data["error"]["rule"] == "gamma_sq_divides_d_plus_tc2"


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"m": 2, "d": 5, "format": "json"}))
    code, out, _ = call("enumerate", "--config", str(cfg))
    assert code == 0 and json.loads(out)["d"] == 5
    code, out, _ = call("enumerate", "--config", str(cfg), "--d", "1")
    assert json.loads(out)["d"] == 1
    cfg.write_text(json.dumps({"m": 2, "d": 5, "colour": "red"}))
    code, _, err = call("enumerate", "--config", str(cfg))
    assert code == 2 and "cli_config" in err


def test_env_budget(monkeypatch):
    monkeypatch.setenv("HEEGNER_LAB_BUDGET", "10")
    code, _, err = call("disc-form", "--t", "9", "--d", "15", "--gamma", "2", "--group")
    assert code == 3 and "enumeration_budget" in err
    code, _, _ = call("disc-form", "--t", "9", "--d", "15", "--gamma", "2", "--group", "--budget", "1000")
    assert code == 0


def test_lattice_verb():
    code, out, _ = call("lattice", "--desc", '{"blocks": ["U","U","E8(-1)","Z(-4)"]}', "--json")
    data = json.loads(out)
    assert code == 0 and data["rank"] == 13 and data["disc_orders"] == [4]


def test_enumerate_byte_stable_across_jobs():
    outs = {call("enumerate", "--m", "2", "--d", "12", "--json", "--jobs", str(j))[1] for j in (1, 2, 8)}
    assert len(outs) == 1


def test_json_round_trip_of_records():
    from heegner_lab.hk import DivisorReport, NormalityVerdict

    data = json.loads(call("analyze", "--m", "2", "--d", "20", "--gamma", "1", "--json")[1])
    for rec in data["divisors"]:
        assert DivisorReport.from_json(rec).to_json() == rec
    nv = json.loads(call("normality", "--t", "9", "--d", "15", "--gamma", "2", "--json")[1])["normality"]
    assert NormalityVerdict.from_json(nv).to_json() == nv


def test_verify_quick():
    code, out, _ = call("verify-paper", "--quick")
    assert code == 0 and "all checks passed" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "heegner_lab", "classify", "--t", "1", "--d", "1", "--beta", "0,0,1,-1", "--json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["class"]["label"] == "nontrivial"
