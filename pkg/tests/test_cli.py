import json
import subprocess
import sys

import pytest

from proetale.cli import EXIT_CAP, EXIT_INVALID, EXIT_OK, EXIT_PARSE, main


@pytest.fixture
def run(data_dir, tmp_path):
    """Run a subcommand on a data file; returns (exit code, document or None)."""
    def go(command, name, *flags):
        out = tmp_path / f"{command}.out"
        source = name if name.startswith("/") else str(data_dir / name)
        code = main([command, source, "-o", str(out), *flags])
        text = out.read_text() if out.exists() else ""
        return code, (json.loads(text) if text.startswith("{") else text or None)
    return go


def recheck(run, doc, tmp_path):
    path = tmp_path / "emitted.json"
    path.write_text(json.dumps(doc))
    return run("check", str(path))


@pytest.mark.parametrize("name, dim, levels", [
    ("z2.json", 3, [1, 2, 4, 8]),
    ("trivial.json", 3, [1, 1, 1, 1]),
    ("s3.json", 2, [1, 6, 36]),
])
def test_bg_levels(run, name, dim, levels):
    code, doc = run("bg", name, "--dim", str(dim))
    assert code == EXIT_OK and doc["ok"]
    assert doc["levels"] == levels


def test_bg_reports_the_edge_path_group(run):
    _, doc = run("bg", "z2.json", "--dim", "2")
    assert doc["pi1"]["order"] == 2 and doc["pi0"]["points"] == [0]
    assert doc["nondegenerate"] == [1, 1, 1]


def test_output_is_deterministic(data_dir):
    cmd = [sys.executable, "-m", "proetale", "homotopy", str(data_dir / "cosk0_z2.json"), "--seed", "4"]
    first = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert first == second and json.loads(first)["ok"]


@pytest.mark.parametrize("command, name, flags", [
    ("bg", "z3.json", ["--dim", "2"]),
    ("cohomology", "z4.json", ["--pmax", "2", "--coeff", "Z/2"]),
    ("cohomology", "z4_to_z2.json", ["--pmax", "1"]),
    ("refine", "slice_cosk0.json", []),
    ("homotopy", "cosk0_z2.json", []),
    ("lift", "lift_fold.json", []),
    ("pi0", "cosk0_z2.json", []),
    ("pi1", "s3.json", []),
    ("components", "sierpinski_plus_point.json", []),
    ("fibreproduct", "fibre_input.json", []),
])
def test_emitted_documents_pass_check(run, tmp_path, command, name, flags):
    code, doc = run(command, name, *flags)
    assert code == EXIT_OK and doc["ok"]
    code, verdict = recheck(run, doc, tmp_path)
    assert code == EXIT_OK and verdict["checked"] == {"refine": "refinement"}.get(command, command)
    assert all(verdict["checks"].values())


def test_tampered_certificate_fails_check(run, tmp_path):
    _, doc = run("bg", "z2.json", "--dim", "2")
    maps = doc["nerve_isomorphism"]["maps"]
    maps[1][0][1], maps[1][1][1] = maps[1][1][1], maps[1][0][1]
    code, verdict = recheck(run, doc, tmp_path)
    assert code == EXIT_INVALID and not verdict["checks"]["nerve_isomorphism"]


def test_failed_document_is_not_rechecked(run, tmp_path):
    _, doc = run("bg", "z2.json", "--dim", "1")
    doc["ok"] = False
    code, verdict = recheck(run, doc, tmp_path)
    assert code == EXIT_INVALID and verdict["checks"] == {"document": False}


@pytest.mark.parametrize("coeff, groups", [
    ("Z", ["Z", "0", "Z/2"]),
    ("Z/2", ["Z/2", "Z/2", "Z/2"]),
    ("Z/3", ["Z/3", "0", "0"]),
])
def test_cohomology_of_z2(run, coeff, groups):
    code, doc = run("cohomology", "z2.json", "--pmax", "2", "--coeff", coeff)
    assert code == EXIT_OK
    assert [r["group"] for r in doc["rows"]] == groups
    assert all(r["oracle_match"] for r in doc["rows"])


def test_cohomology_of_klein_in_degree_two(run):
    _, doc = run("cohomology", "klein.json", "--pmax", "2")
    assert doc["rows"][2]["invariant_factors"] == [2, 2]


def test_galois_system_colimit(run):
    _, doc = run("cohomology", "z4_to_z2.json", "--pmax", "2", "--coeff", "Z/2")
    assert [r["stabilized"] for r in doc["rows"]] == [True, True, False]
    assert doc["rows"][2]["transitions"] == {"Z4->Z2": [[0]]}


def test_pi0_and_pi1(run):
    _, doc = run("pi0", "cosk0_z2.json")
    assert doc["points"] == 1
    _, doc = run("pi1", "s3.json")
    assert doc["pi1"]["order"] == 6 and doc["pi1"]["status"] == "finite"


def test_homotopy_certificate_shape(run):
    _, doc = run("homotopy", "cosk0_z2.json", "--seed", "2")
    assert doc["checks"]["reduced_homotopy"]
    assert set(doc["homotopy"]) >= {"f", "g"}


def test_components_and_fibre_product(run):
    _, doc = run("components", "sierpinski_plus_point.json")
    assert doc["components"]["points"] == ["a", "c"]
    assert not doc["totally_disconnected"]
    _, doc = run("fibreproduct", "fibre_input.json")
    assert len(doc["product"]["points"]) == 4


def test_markdown_output(run):
    code, text = run("bg", "z2.json", "--dim", "1", "--format", "markdown")
    assert code == EXIT_OK and text.startswith("## bg")
    assert "| nerve_isomorphism | yes |" in text


def test_size_cap_exit_code(run):
    code, _ = run("bg", "z2.json", "--dim", "8", "--cap", "100")
    assert code == EXIT_CAP


@pytest.mark.parametrize("content, flags", [
    ("nope", []),
    ('{"order": 2, "mul": [[0, 1], [1, 1]]}', []),
    ('{"order": 2, "mul": [[0, 1], [1, 0]]}', ["--coeff", "Q"]),
    ('{"order": 2, "mul": [[0, 1], [1, 0]]}', ["--dim", "1", "--pmax", "2"]),
])
def test_parse_errors(run, tmp_path, content, flags):
    path = tmp_path / "input.json"
    path.write_text(content)
    code, _ = run("cohomology", str(path), *flags)
    assert code == EXIT_PARSE


def test_unknown_document_kind(run, data_dir):
    assert run("check", "z2.json")[0] == EXIT_PARSE
