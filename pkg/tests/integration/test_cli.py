"""
🖥️ Pruebas de la línea de comandos gkv
"""

import json

import pytest

from gkverify.core.harness import parse_spec
from gkverify.core.zoo import zoo_generate
from main import main
from tests.conftest import ZOO_DIR


def emit(tmp_path, name, *params) -> str:
    path = tmp_path / f"{name.lower()}.json"
    args = ["zoo", name, "--emit", str(path)]
    for param in params:
        args += ["--param", param]
    assert main(args) == 0
    return str(path)


# =============================================================================
# 🦓 gkv zoo
# =============================================================================

def test_zoo_emit_round_trips(tmp_path):
    path = emit(tmp_path, "Z1", "alpha=0", "beta=1")
    spec = parse_spec(open(path, encoding="utf-8").read())
    assert spec.model_dump() == zoo_generate("Z1", {"alpha": 0.0, "beta": 1.0}).model_dump()


def test_zoo_to_stdout(capsys):
    assert main(["zoo", "Z2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["dim"] == 4
    assert "samplePlan" in data


def test_zoo_bad_parameter():
    assert main(["zoo", "Z1", "--param", "alpha"]) == 2


def test_zoo_unknown_example():
    assert main(["zoo", "Z7"]) == 2


# =============================================================================
# 🧪 gkv check
# =============================================================================

def test_check_writes_report(tmp_path):
    report_path = tmp_path / "report.json"
    code = main([
        "check", str(ZOO_DIR / "z1.json"), "--suite", "gk", "--grid", "1",
        "--seed", "3", "--workers", "1", "--report", str(report_path),
    ])
    assert code == 0
    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["metadata"]["suite"] == "gk"
    assert report["metadata"]["seed"] == 3
    assert report["metadata"]["sampleCount"] == 65
    assert all(check["pass"] for check in report["checks"])


def test_check_prints_report(capsys):
    assert main(["check", str(ZOO_DIR / "z1.json"), "--suite", "validate", "--grid", "1", "--workers", "1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert {c["checkName"] for c in report["checks"]} >= {"validate.j_plus_square", "validate.sigma_spectrum"}


def test_check_residual_failure_exit_code(tmp_path):
    path = emit(tmp_path, "Z4", "base=Z1")
    assert main(["check", path, "--suite", "gk", "--grid", "1", "--workers", "1"]) == 1


def test_tolerance_override(tmp_path):
    path = emit(tmp_path, "Z4", "base=Z1")
    assert main(["check", path, "--suite", "gk", "--grid", "1", "--tol", "10", "--workers", "1"]) == 0


def test_check_inapplicable_suite(tmp_path):
    path = emit(tmp_path, "Z2")
    assert main(["check", path, "--suite", "identities", "--grid", "1", "--workers", "1"]) == 2


def test_check_invalid_spec(tmp_path):
    path = tmp_path / "roto.json"
    path.write_text('{"dim": 2}', encoding="utf-8")
    assert main(["check", str(path)]) == 2


def test_check_missing_file(tmp_path):
    assert main(["check", str(tmp_path / "nada.json")]) == 2


def test_ambiguous_clustering_exit_code(tmp_path):
    path = emit(tmp_path, "Z3", "a2=0.000001")
    assert main(["check", path, "--suite", "eigendist", "--grid", "1", "--workers", "1"]) == 3


def test_sampler_check():
    assert main(["check", str(ZOO_DIR / "z5.json"), "--suite", "fourdim", "--workers", "2"]) == 0


def test_check_defaults_to_declared_suites(tmp_path):
    path = emit(tmp_path, "Z4", "base=Z1")
    out = tmp_path / "report.json"
    assert main(["check", path, "--grid", "1", "--workers", "1", "--report", str(out)]) == 1
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["metadata"]["suite"] == "gk,theorem"
    prefixes = {check["checkName"].split(".")[0] for check in report["checks"]}
    assert prefixes == {"gk", "theorem"}
    assert report["verdicts"][0]["verdict"] == "out_of_scope"
    assert report["skipped"] == []


def test_sampler_declared_suite_skips_nothing(capsys):
    assert main(["check", str(ZOO_DIR / "z5.json"), "--workers", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["metadata"]["suite"] == "fourdim"
    assert report["skipped"] == []


def test_explicit_all_overrides_declared_suites(tmp_path):
    path = emit(tmp_path, "Z5", "samples=20")
    out = tmp_path / "report.json"
    assert main(["check", path, "--suite", "all", "--report", str(out)]) == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["metadata"]["suite"] == "all"
    assert len(report["skipped"]) == 7


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "GK Verify" in capsys.readouterr().out


# =============================================================================
# 🧭 gkv courant
# =============================================================================

def test_courant_sections(tmp_path):
    sections = tmp_path / "secciones.json"
    sections.write_text(json.dumps({"pairs": [{
        "u": {"vector": ["1", "0", "0", "0"], "form": ["0", "0", "0", "0"]},
        "v": {"vector": ["0", "x1", "0", "0"], "form": ["0", "0", "0", "0"]},
    }]}), encoding="utf-8")
    out = tmp_path / "courant.json"
    code = main([
        "courant", str(ZOO_DIR / "z1.json"), "--sections", str(sections),
        "--grid", "1", "--report", str(out),
    ])
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert len(report["brackets"]) == 65
    first = report["brackets"][0]
    assert first["vectorReal"] == [0.0, 1.0, 0.0, 0.0]
    assert first["formReal"] == [0.0, 0.0, 0.0, 0.0]
    assert first["transverseNormPlus"] is not None


def test_courant_sections_wrong_length(tmp_path):
    sections = tmp_path / "secciones.json"
    sections.write_text(json.dumps({"pairs": [{
        "u": {"vector": ["1", "0"], "form": ["0", "0"]},
        "v": {"vector": ["0", "1"], "form": ["0", "0"]},
    }]}), encoding="utf-8")
    assert main(["courant", str(ZOO_DIR / "z1.json"), "--sections", str(sections)]) == 2
