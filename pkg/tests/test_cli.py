import json

import pytest
from typer.testing import CliRunner

from lsa import __version__
from lsa.cli import app

runner = CliRunner()


def run(*args):
    return runner.invoke(app, list(args))


def sections(result):
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    return {s["title"]: s for s in payload["sections"]}, payload


def test_version():
    result = run("--version")
    assert result.exit_code == 0
    assert f"LSA version: {__version__}" in result.output


def test_symmetries_json():
    found, payload = sections(run("symmetries", "stagnation.pde", "--no-stability", "--json"))
    assert list(found) == [
        "solved forms",
        "determining equations",
        "symmetries",
        "sample determining equations",
    ]
    data = found["symmetries"]["data"]
    assert data["dimension"] == 4
    assert data["matches_published_basis"] is True
    assert "printed coefficient of ∂P is T; computed 0" in found["symmetries"]["flags"]
    assert payload["provenance"]["options"]["degree"] == 2
    assert len(payload["provenance"]["input_sha256"]) == 64


def test_symmetries_text():
    result = run("symmetries", "stagnation.pde", "--no-stability")
    assert result.exit_code == 0, result.output
    assert "== symmetries ==" in result.stdout
    assert "null space dimension 4" in result.stdout


def test_algebra_json():
    found, _ = sections(run("algebra", "stagnation.pde", "--json"))
    structure = found["structure"]
    assert structure["data"]["decomposition"] == "ℝ² ⊕ a(1)"
    assert structure["data"]["solvable"] is True
    assert any("printed derived series" in f for f in structure["flags"])
    assert found["commutator table"]["data"]["brackets"] == [
        {"left": "v3", "right": "v4", "value": {"v3": "1"}}
    ]
    assert not found["adjoint action"]["flags"]


def test_algebra_from_table(tmp_path):
    path = tmp_path / "heisenberg.json"
    path.write_text(
        json.dumps({"labels": ["x", "y", "z"], "brackets": [{"left": "x", "right": "y", "value": {"z": "1"}}]}),
        encoding="utf-8",
    )
    found, _ = sections(run("algebra", "--from-table", str(path), "--json"))
    assert found["structure"]["data"]["nilpotent"] is True
    assert found["structure"]["data"]["center"] == [["0", "0", "1"]]


def test_algebra_table_errors(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert run("algebra", "--from-table", str(path)).exit_code == 2
    assert run("algebra").exit_code == 2
    assert run("algebra", "stagnation.pde", "--from-table", str(path)).exit_code == 2


def test_missing_file():
    result = run("symmetries", "no-such-file.pde")
    assert result.exit_code == 2
    assert "not found" in result.output


def test_parse_error_exit_code(tmp_path):
    path = tmp_path / "bad.pde"
    path.write_text("independent x;\n$", encoding="utf-8")
    result = run("parse", str(path))
    assert result.exit_code == 2
    assert "2:1:" in result.output


def test_verify_declared_and_inline_fields():
    found, _ = sections(run("verify", "stagnation.pde", "-f", "v4", "-e", "d/dU", "--json"))
    fields = found["verification"]["data"]["fields"]
    assert [(f["field"], f["holds"]) for f in fields] == [("v4", True), ("d/dU", False)]
    assert fields[1]["residuals"]


def test_verify_unknown_field():
    result = run("verify", "stagnation.pde", "-f", "v9")
    assert result.exit_code == 2
    assert "unknown vector field 'v9'" in result.output


def test_reduce_scaling():
    found, _ = sections(run("reduce", "stagnation.pde", "-f", "v4", "--json"))
    (section,) = found.values()
    assert section["data"]["invariants"] == ["x", "y", "U", "V", "P"]
    assert "T1 = exp(-eps)*r(x, y)" in section["data"]["transformed"]


def test_reduce_coupled_field_is_unsupported():
    result = run("reduce", "stagnation.pde", "-f", "y * d/dx")
    assert result.exit_code == 3


@pytest.mark.parametrize("dim", ["1", "3"])
def test_optimal(dim):
    found, _ = sections(run("optimal", "stagnation.pde", "-n", dim, "--json"))
    if dim == "1":
        reps = [c["representative"] for c in found["one-dimensional optimal system"]["data"]["classes"]]
        assert reps == ["α1*v1 + α2*v2", "α1*v1 + α2*v2 + v3", "α1*v1 + α2*v2 + v4"]
    else:
        assert found["optimal-system table"]["data"]["all_closed"] is True


def test_optimal_two():
    found, _ = sections(run("optimal", "stagnation.pde", "-n", "2", "--json"))
    listed = {name for c in found["two-dimensional optimal system"]["data"]["found"] for name in c["published"]}
    assert listed == {"class 1", "class 2", "class 3"}


def test_parse_prints_normal_form(stagnation_source):
    from lsa.dsl import parse

    result = run("parse", "stagnation.pde")
    assert result.exit_code == 0
    assert parse(result.stdout) == parse(stagnation_source)


def test_output_is_deterministic():
    first = run("algebra", "stagnation.pde")
    second = run("algebra", "stagnation.pde")
    assert first.exit_code == 0
    assert first.stdout == second.stdout


def test_symmetries_at_degree_zero():
    found, payload = sections(run("symmetries", "stagnation.pde", "-d", "0", "--no-stability", "--json"))
    assert payload["provenance"]["options"]["degree"] == 0
    assert found["determining equations"]["data"]["ansatz_degree"] == 0
    assert found["symmetries"]["data"]["dimension"] == 3
