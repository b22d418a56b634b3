"""End-to-end runs of the shipped scenario corpus.

Every scenario file is executed through the real argument parser; the
expected exit codes below are part of the corpus contract.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from treeclose.cli import main

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

# 0 = property holds / computation succeeded, 10 = property fails with a
# certificate, 20 = inconclusive at the configured budget
EXPECTED_EXIT = {
    "bs23-discreteness-k1.json": 0,
    "bs23-ipk-k1-r3.json": 10,
    "bs23-ipk-k1-r4.json": 10,
    "bs23-local-action.json": 0,
    "bs23-normal-form.json": 0,
    "bs23-pk-edge.json": 10,
    "bs23-plusk-k1.json": 0,
    "bs23-stab-germs-k1.json": 0,
    "cl-discreteness-k2.json": 20,
    "cl-ipk-k2.json": 0,
    "cl-legality-k1.json": 0,
    "cl-legality-k2-fails.json": 10,
    "cl-plusk-k2.json": 0,
    "cl-stab-germs-k1.json": 0,
    "cover-c25-discreteness-k2.json": 0,
    "cover-c25-local-action.json": 0,
    "cover-compare-k1.json": 0,
    "cover-compare-k3.json": 10,
    "full-aut-commutator-a1.json": 0,
    "full-aut-ipk-k1.json": 0,
    "full-aut-local-action.json": 0,
    "full-aut-pk-len2.json": 0,
    "psl2-discreteness-k2.json": 0,
    "psl2-lattice-r1.json": 0,
    "psl2-lattice-r2.json": 10,
    "psl2-stab-germs-k1.json": 0,
}


def run_cli(args, capsys):
    code = main(args)
    return code, capsys.readouterr().out


def test_corpus_matches_expectation_table():
    found = {p.name for p in SCENARIO_DIR.glob("*.json")}
    assert found == set(EXPECTED_EXIT)


@pytest.mark.parametrize("name", sorted(EXPECTED_EXIT))
def test_scenario_runs_with_expected_exit(name, capsys):
    path = SCENARIO_DIR / name
    code, out = run_cli(["run", str(path), "--format", "json"], capsys)
    assert code == EXPECTED_EXIT[name]
    report = json.loads(out)
    assert report["schema"] == "treeclose.report/v1"
    assert report["exit_code"] == code
    assert report["scenario"] == json.loads(path.read_text(encoding="utf-8"))
    assert report["model"]["degree"] >= 3
    # determinism contract: no timing leaks unless --timings was passed
    assert report["wall_clock_ms"] == 0
    verdict_verbs = ("ipk", "pk", "kclosure-compare", "discreteness")
    if code == 10 and report["scenario"]["verb"] in verdict_verbs:
        assert report["witnesses"]


@pytest.mark.parametrize(
    "name",
    ["bs23-ipk-k1-r4.json", "full-aut-commutator-a1.json", "psl2-lattice-r1.json"],
)
def test_reruns_are_byte_identical(name, capsys):
    path = str(SCENARIO_DIR / name)
    _, first = run_cli(["run", path, "--format", "json"], capsys)
    _, second = run_cli(["run", path, "--format", "json"], capsys)
    assert first == second


def test_text_format_header_and_order(capsys):
    path = str(SCENARIO_DIR / "bs23-local-action.json")
    code, out = run_cli(["run", path], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "treeclose report"
    keys = [line.split()[0] for line in lines[1:]]
    assert keys == sorted(keys)


def test_seed_override_is_echoed(capsys):
    path = str(SCENARIO_DIR / "bs23-local-action.json")
    _, out = run_cli(["run", path, "--format", "json", "--seed", "5"], capsys)
    assert json.loads(out)["seed"] == 5


def test_budget_override_respected(capsys):
    path = str(SCENARIO_DIR / "cl-discreteness-k2.json")
    code, out = run_cli(
        ["run", path, "--format", "json", "--budget-override", "5"], capsys
    )
    assert code == 20
    report = json.loads(out)
    assert report["budget_used"] <= 5


def test_timings_flag_breaks_determinism_only_there(capsys):
    path = str(SCENARIO_DIR / "bs23-normal-form.json")
    _, out = run_cli(["run", path, "--format", "json", "--timings"], capsys)
    report = json.loads(out)
    assert isinstance(report["wall_clock_ms"], int)


def test_element_cap_env_var(capsys, monkeypatch):
    monkeypatch.setenv("TREECLOSE_MAX_ELEMENTS", "10")
    path = str(SCENARIO_DIR / "bs23-plusk-k1.json")
    code, out = run_cli(["run", path, "--format", "json"], capsys)
    assert code == 2
    report = json.loads(out)
    assert report["error"]["type"] == "TooLarge"


def test_greek_letters_are_escaped_in_json(capsys):
    path = str(SCENARIO_DIR / "bs23-discreteness-k1.json")
    _, out = run_cli(["run", path, "--format", "json"], capsys)
    assert "\\u03b5" in out
    assert "ε" not in out


def test_missing_scenario_file_is_exit_2(capsys, tmp_path):
    code, out = run_cli(
        ["run", str(tmp_path / "nope.json"), "--format", "json"], capsys
    )
    assert code == 2
    assert json.loads(out)["error"]["type"] == "FileNotFoundError"


def test_scenario_without_verb_is_rejected(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"model": {"model": "full_aut", "d": 3}}))
    code, out = run_cli(["run", str(bad), "--format", "json"], capsys)
    assert code == 2
    assert "verb" in json.loads(out)["error"]["message"]


def test_unknown_verb_lists_the_known_ones(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps({"model": {"model": "full_aut", "d": 3}, "verb": "frobnicate"})
    )
    code, out = run_cli(["run", str(bad), "--format", "json"], capsys)
    assert code == 2
    message = json.loads(out)["error"]["message"]
    assert "frobnicate" in message and "ipk" in message


def test_wrong_schema_tag_is_rejected(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {"schema": "bogus/v9", "model": {"model": "full_aut", "d": 3},
             "verb": "local-action"}
        )
    )
    code, out = run_cli(["run", str(bad), "--format", "json"], capsys)
    assert code == 2
    assert "schema" in json.loads(out)["error"]["message"]


def test_module_entry_point_subprocess():
    path = str(SCENARIO_DIR / "bs23-normal-form.json")
    proc = subprocess.run(
        [sys.executable, "-m", "treeclose.cli", "run", path],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("treeclose report")


def test_console_script_installed():
    exe = shutil.which("treeclose")
    assert exe is not None
    path = str(SCENARIO_DIR / "cl-legality-k2-fails.json")
    proc = subprocess.run([exe, "run", path], capture_output=True, text=True)
    assert proc.returncode == 10
