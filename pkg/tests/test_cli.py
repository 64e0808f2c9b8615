import json
import os

import pytest

from stokesdata.cli import main
from stokesdata.exact_linalg import ExactMatrix
from stokesdata.stokes_combinatorics import DEFAULT_CONVENTIONS

PINNED = DEFAULT_CONVENTIONS.with_reading("cross_referenced")


def write_matrix(tmp_path, rows, name="T.json"):
    path = tmp_path / name
    doc = ExactMatrix.from_rows(rows).to_doc() if rows else {"rows": 0, "cols": 0, "entries": []}
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_order(capsys):
    code, out = run(capsys, "order", "--p", "4", "--q", "5")
    doc = json.loads(out)
    assert code == 0 and doc["even_order"] == [0, 7, 2, 5, 4, 3, 6, 1, 8] and doc["a"] == 7
    code, out = run(capsys, "order", "--p", "1", "--q", "1")
    doc = json.loads(out)
    assert doc["even_order"] == [0, 1] and doc["zeta_max_is_minus_one"]
    assert main(["order", "--p", "2", "--q", "4"]) == 2


def test_usage_errors():
    assert main([]) == 2
    assert main(["order", "--p", "x"]) == 2
    assert main(["nope"]) == 2


def test_packaged_conventions_are_pinned(capsys):
    code, out = run(capsys, "order", "--p", "2", "--q", "1")
    assert json.loads(out)["conventions"] == PINNED.to_doc()


def test_stokes(tmp_path, capsys):
    code, out = run(capsys, "stokes", "--p", "1", "--q", "1", "--matrix", write_matrix(tmp_path, [[1]]))
    doc = json.loads(out)
    assert code == 0
    assert ExactMatrix.from_doc(doc["maps"][0]) == ExactMatrix.from_rows([[-1, 0], [2, 1]])
    assert ExactMatrix.from_doc(doc["maps"][1]) == ExactMatrix.from_rows([[1, 2], [0, -1]])
    code, out = run(capsys, "stokes", "--p", "2", "--q", "1", "--matrix", write_matrix(tmp_path, []))
    assert code == 0 and json.loads(out)["r"] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"rows": 1, "cols": 2, "entries": [[1, 1, 0, 1], [1, 1, 0, 1]]}))
    assert main(["stokes", "--p", "1", "--q", "1", "--matrix", str(bad)]) == 2
    sing = write_matrix(tmp_path, [[1, 1], [1, 1]], "sing.json")
    assert main(["stokes", "--p", "1", "--q", "1", "--matrix", sing]) == 1
    floats = tmp_path / "float.json"
    floats.write_text(json.dumps({"rows": 1, "cols": 1, "entries": [[0.5, 1, 0, 1]]}))
    assert main(["stokes", "--p", "1", "--q", "1", "--matrix", str(floats)]) == 2
    assert main(["stokes", "--p", "1", "--q", "1", "--matrix", str(tmp_path / "missing")]) == 2


def test_env_override(tmp_path, capsys, monkeypatch):
    conv = tmp_path / "conv.json"
    conv.write_text(json.dumps(DEFAULT_CONVENTIONS.to_doc()))
    monkeypatch.setenv("STOKESDATA_CONVENTIONS", str(conv))
    code, out = run(capsys, "stokes", "--p", "1", "--q", "1", "--matrix", write_matrix(tmp_path, [[1]]))
    assert json.loads(out)["pinned_conventions"] == DEFAULT_CONVENTIONS.to_doc()
    ambiguous = tmp_path / "amb.json"
    ambiguous.write_text(json.dumps({"status": "ambiguous", "pinned": None}))
    monkeypatch.setenv("STOKESDATA_CONVENTIONS", str(ambiguous))
    assert main(["order", "--p", "2", "--q", "1"]) == 2


def test_verify_single_and_zero_rank(tmp_path, capsys):
    code, out = run(capsys, "verify", "--p", "2", "--q", "1", "--matrix", write_matrix(tmp_path, [[2]]))
    doc = json.loads(out)
    assert code == 0 and doc["all_pass"]
    assert [c["name"] for c in doc["checks"]] == [
        "sigma_invertible", "opposedness", "filtered_splittings", "multiplier_triangularity",
        "determinant_identity", "explicit_vs_composition", "block_vs_direct", "spectral",
        "geometry_counts"]
    code, out = run(capsys, "verify", "--p", "2", "--q", "1", "--matrix", write_matrix(tmp_path, []))
    assert code == 0 and json.loads(out)["all_pass"]
    assert main(["verify", "--p", "2", "--q", "1"]) == 2


def test_verify_negative_control(tmp_path, capsys):
    code, out = run(capsys, "verify", "--p", "1", "--q", "1", "--matrix", write_matrix(tmp_path, [[2]]),
                    "--set", "wrap_twist_direction=T")
    doc = json.loads(out)
    assert code == 1 and not doc["all_pass"]
    failing = [c for c in doc["checks"] if not c["pass"]]
    assert failing and all(c["witness"]["first_failure"] for c in failing)
    # the full list is reported even after a failure
    assert len(doc["checks"]) == 9
    assert main(["verify", "--p", "1", "--q", "1", "--matrix", "x", "--set", "bogus=1"]) == 2


def test_verify_sweep_small(capsys):
    code, out = run(capsys, "verify", "--sweep", "5")
    doc = json.loads(out)
    assert code == 0 and doc["all_pass"] and "wall_time_s" not in doc
    code2, out2 = run(capsys, "verify", "--sweep", "5")
    assert out2 == out


def test_calibrate_ambiguous(capsys):
    code, out = run(capsys, "calibrate", "--sweep", "0")
    assert code == 1 and json.loads(out)["status"] == "ambiguous"


def test_calibrate_writes_atomically(tmp_path, capsys):
    out = tmp_path / "conv.json"
    assert main(["calibrate", "--sweep", "4", "--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(["calibrate", "--sweep", "4", "--out", str(out)]) == 0
    assert out.read_bytes() == first
    assert [f for f in os.listdir(tmp_path) if f.startswith(".tmp-")] == []
    doc = json.loads(first)
    assert doc["status"] == "unique" and doc["pinned"] == PINNED.to_doc()


def test_plot(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["plot", "--p", "2", "--q", "1", "--resolution", "64", "--out", str(a)]) == 0
    assert main(["plot", "--p", "2", "--q", "1", "--resolution", "64", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["plot", "--p", "4", "--q", "5", "--resolution", "32"]) == 2


def test_formal(capsys):
    code, out = run(capsys, "formal", "--p", "2", "--q", "1")
    doc = json.loads(out)
    assert code == 0 and doc["p_hat"] == 3 and doc["twist_sign"] == -1
    assert doc["rho_hat_lead"]["exact"] == [2, 1, 0, 1]
    assert doc["phi_hat_lead"]["exact"] == [3, 2, 0, 1]
    assert main(["formal", "--p", "1", "--q", "1", "--phi-re", "0"]) == 2


def test_monodromy(tmp_path, capsys):
    code, out = run(capsys, "monodromy", "--p", "1", "--q", "1", "--matrix", write_matrix(tmp_path, [[1]]),
                    "--method", "composition")
    doc = json.loads(out)
    assert code == 0 and doc["composition"]["charpoly"] == "x^2 - 2*x + 1"
    assert ExactMatrix.from_doc(doc["composition"]["matrix"]) == ExactMatrix.from_rows([[3, 2], [-2, -1]])
    code, out = run(capsys, "monodromy", "--p", "2", "--q", "1", "--matrix", write_matrix(tmp_path, [[2]]))
    doc = json.loads(out)
    assert code == 0 and doc["conjugate"] is True
    assert doc["composition"]["charpoly"] == "x^3 - x^2 - 8*x + 8"
    code, out = run(capsys, "monodromy", "--p", "2", "--q", "1", "--matrix", write_matrix(tmp_path, []))
    assert code == 0 and json.loads(out)["conjugate"] is True
    code, out = run(capsys, "monodromy", "--p", "1", "--q", "1", "--matrix", write_matrix(tmp_path, [[2]]),
                    "--set", "wrap_twist_direction=T")
    assert code == 1 and json.loads(out)["conjugate"] is False
