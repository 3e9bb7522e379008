import json
import subprocess
import sys

import pytest

from spirkit.cli import main


@pytest.fixture
def files(tmp_path):
    paths = {name: str(tmp_path / f"{name}.json") for name in ("ex1", "mmsp", "thr", "spir", "nss", "vdm")}
    assert main(["example", "access", "--out", paths["ex1"]]) == 0
    assert main(["example", "mmsp", "--out", paths["mmsp"]]) == 0
    assert main(["access", "threshold", "--n", "3", "--r", "2", "--t", "1", "--out", paths["thr"]]) == 0
    assert main(["convert", "mmsp-to-spir", "--in", paths["mmsp"], "--f", "2", "--out", paths["spir"]]) == 0
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err.strip()


def test_verify_ok(files, capsys):
    assert run(capsys, "mmsp", "verify", "--in", files["mmsp"], "--access", files["ex1"]) == (0, "valid rate=1/4", "")


def test_verify_fails_with_set(files, capsys):
    code, out, _ = run(capsys, "mmsp", "verify", "--in", files["mmsp"], "--access", files["thr"])
    assert code == 1
    assert "{1,2}" in out


def test_verify_json(files, capsys):
    code, out, _ = run(capsys, "mmsp", "verify", "--in", files["mmsp"], "--access", files["ex1"], "--format", "json")
    assert code == 0 and json.loads(out)["rate"] == "1/4"


def test_bound_delta(files, capsys):
    assert run(capsys, "bound", "delta", "--access", files["ex1"])[:2] == (0, "delta=1 bound=1/3")


def test_audit(files, capsys):
    code, out, _ = run(capsys, "audit", "spir", "--in", files["spir"], "--access", files["ex1"])
    assert code == 0 and "complete_security=yes" in out
    code, out, _ = run(capsys, "audit", "spir", "--in", files["spir"], "--access", files["thr"])
    assert code == 1 and "complete_security=no" in out


def test_audit_budget_is_usage_error(files, capsys):
    code, _, err = run(capsys, "audit", "spir", "--in", files["spir"], "--access", files["ex1"], "--budget", "5")
    assert code == 2 and err.startswith("error: BUDGET:")


def test_audit_nss(files, capsys):
    assert main(["convert", "spir-to-nss", "--in", files["spir"], "--out", files["nss"]]) == 0
    code, out, _ = run(capsys, "audit", "nss", "--in", files["nss"], "--access", files["ex1"])
    assert code == 0 and "complete_security=yes" in out


def test_convert_chain_is_identity(files, capsys):
    main(["convert", "spir-to-nss", "--in", files["spir"], "--out", files["nss"]])
    code, out, _ = run(capsys, "convert", "nss-to-mmsp", "--in", files["nss"])
    with open(files["mmsp"]) as fh:
        assert json.loads(out)["g"] == json.load(fh)["g"]
    code, out, _ = run(capsys, "convert", "project", "--in", files["spir"])
    with open(files["spir"]) as fh:
        assert json.loads(out) == json.load(fh)


def test_simulate(files, capsys):
    args = ["simulate", "--in", files["spir"], "--k", "1", "--respond", "2,3", "--collude", "3", "--seed", "5"]
    code, first, _ = run(capsys, *args, "--format", "json")
    assert code == 0 and json.loads(first)["outcome"]["status"] == "reconstructed"
    assert run(capsys, *args, "--format", "json")[1] == first
    code, out, _ = run(capsys, "simulate", "--in", files["spir"], "--respond", "1,2", "--trials", "20")
    assert out == "respond={1,2} unreachable=20"


def test_checks(files, capsys):
    main(["mmsp", "vandermonde", "--q", "5", "--n", "3", "--r", "2", "--t", "1", "--out", files["vdm"]])
    assert run(capsys, "check", "theorem1", "--in", files["vdm"], "--r", "2", "--t", "1")[:2] == (
        0, "mmsp=true mds=true agree=true")
    assert run(capsys, "check", "lemma2", "--in", files["mmsp"])[0] == 0
    assert run(capsys, "check", "lemma3", "--in", files["mmsp"], "--access", files["ex1"])[:2] == (0, "holds")
    assert run(capsys, "check", "prop2", "--in", files["vdm"])[0] == 0


def test_share_dependence_witness(files, capsys, tmp_path):
    leaky = tmp_path / "leaky.json"
    leaky.write_text(json.dumps({"n": 3, "min_authorized": [], "max_forbidden": [[2, 3]]}))
    code, out, _ = run(capsys, "check", "lemma3", "--in", files["mmsp"], "--access", str(leaky))
    assert code == 1 and out.startswith("fails B={2,3}")


def test_search(files, capsys):
    code, out, _ = run(capsys, "mmsp", "search", "--access", files["ex1"], "--q", "3", "--y", "2", "--max-z", "4")
    assert code == 0 and json.loads(out)["kind"] == "mmsp"


@pytest.mark.parametrize("argv,code_word", [
    (["mmsp", "verify", "--in", "missing.json", "--access", "missing.json"], "IO"),
    (["check", "theorem1", "--in", "x.json"], "USAGE"),
])
def test_errors(argv, code_word, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith(f"error: {code_word}:")


def test_bad_json_and_kind(files, capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "mmsp", "verify", "--in", str(bad), "--access", files["ex1"])[2].startswith("error: JSON:")
    code, _, err = run(capsys, "audit", "spir", "--in", files["mmsp"], "--access", files["ex1"])
    assert code == 2 and err.startswith("error: SCHEMA:")


def test_unknown_verb_exit_2(capsys):
    assert main(["frobnicate"]) == 2


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "spirkit.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "spirkit" in out.stdout
