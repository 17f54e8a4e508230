import json

import pytest

from grgraph.cli import DESK_SPACES, main, parse_spaces

RING = ["--p", "3", "--s", "2", "--m", "1"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ring_info(capsys):
    code, out, _ = run(capsys, "ring-info", *RING)
    assert code == 0
    assert "xi=8" in out and "z=8" in out and "units=6" in out
    code, out, _ = run(capsys, "ring-info", "--p", "3", "--s", "1", "--m", "1", "--format", "json")
    assert code == 0 and json.loads(out)["units"] == 2


def test_ring_info_gr92(capsys):
    code, out, _ = run(capsys, "ring-info", "--p", "3", "--s", "2", "--m", "2", "--format", "json")
    info = json.loads(out)
    assert info["xi"] == "7,7" and info["units"] == 72


def test_bad_prime(capsys):
    code, _, err = run(capsys, "ring-info", "--p", "2", "--s", "2", "--m", "1")
    assert code == 1 and "NotOddPrime" in err


def test_usage_errors(capsys):
    assert run(capsys, "build")[0] == 1
    assert run(capsys, "build", *RING, "--nu", "1", "--delta", "1", "--h", "1,x")[0] == 1
    assert run(capsys, "build", *RING, "--nu", "1", "--delta", "5")[0] == 1


def test_build_edges(capsys, tmp_path):
    out = tmp_path / "g.edges"
    code, _, _ = run(capsys, "build", *RING, "--nu", "1", "--delta", "1", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# GR(3^2,1) nu=1 delta=1")
    assert len(lines) - 1 == 54
    code, text, _ = run(capsys, "build", *RING, "--nu", "1", "--delta", "0")
    assert text.splitlines()[1:] == ["0 1"]


def test_build_vertices_and_json(capsys):
    code, text, _ = run(capsys, "build", *RING, "--nu", "1", "--delta", "1", "--format", "vertices")
    assert code == 0 and len(text.splitlines()) == 12
    code, text, _ = run(capsys, "build", *RING, "--nu", "1", "--delta", "1", "--format", "json")
    doc = json.loads(text)
    assert doc["n"] == 12 and len(doc["edges"]) == 54


def test_budget_exit(capsys):
    code, _, err = run(capsys, "build", *RING, "--nu", "2", "--delta", "1", "--budget", "10")
    assert code == 2 and "budget" in err


def test_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("OG_BUDGET", "10")
    assert run(capsys, "build", *RING, "--nu", "2", "--delta", "1")[0] == 2
    monkeypatch.setenv("OG_BUDGET", "ten")
    assert run(capsys, "build", *RING, "--nu", "2", "--delta", "1")[0] == 1


def test_params(capsys):
    code, out, _ = run(capsys, "params", *RING, "--nu", "1", "--delta", "1")
    doc = json.loads(out)
    assert code == 0 and all(doc["matches"].values())
    code, out, _ = run(capsys, "params", *RING, "--nu", "2", "--delta", "0")
    doc = json.loads(out)
    assert code == 0 and doc["grade"] == 2
    code, out, _ = run(capsys, "params", *RING, "--nu", "3", "--delta", "2", "--formula-only")
    assert code == 0 and json.loads(out)["k"] == 3 ** (2 * 6)


def test_params_jobs_identical(capsys):
    outs = {run(capsys, "params", *RING, "--nu", "2", "--delta", "1", "--jobs", str(j))[1] for j in (1, 2)}
    assert len(outs) == 1


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", *RING, "--nu", "1", "--delta", "1", "--vertex", "0,1,0")
    assert code == 0 and json.loads(out)["label"] == "ADJ"
    code, out, _ = run(capsys, "classify", *RING, "--nu", "1", "--delta", "1", "--vertex", "1,0,3")
    assert json.loads(out)["label"] == "N1(r=1)"
    code, _, err = run(capsys, "classify", *RING, "--nu", "1", "--delta", "1", "--vertex", "1,1,1")
    assert code == 1 and "NotAVertex" in err
    code, _, _ = run(capsys, "classify", *RING, "--nu", "1", "--delta", "1", "--vertex", "1,0")
    assert code == 1


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", *RING, "--nu", "1", "--delta", "1", "--all")
    doc = json.loads(out)
    assert code == 0 and not doc["partial"]
    assert all(c["status"] == "pass" for c in doc["checks"].values())
    code, out, _ = run(capsys, "verify", *RING, "--nu", "1", "--delta", "2", "--suborbits")
    doc = json.loads(out)
    assert code == 0 and doc["checks"]["coincidence"]["detail"] == ["M1(r=1) -> M2(r=1)"]


def test_verify_low_budget_is_partial(capsys):
    code, out, _ = run(capsys, "verify", *RING, "--nu", "2", "--delta", "2", "--all", "--budget", "100")
    doc = json.loads(out)
    assert doc["partial"] and code == 0
    assert doc["checks"]["vertex_count"]["status"] == "skipped"


def test_parse_spaces():
    assert parse_spaces(None) == DESK_SPACES and len(DESK_SPACES) == 10
    assert parse_spaces("3,2,1,1,1; 3,2,1,1,1,1;3,2,1,1,0,z") == [(3, 2, 1, 1, 1, "1"), (3, 2, 1, 1, 0, "1")]


def test_census(capsys, tmp_path):
    code, _, err = run(capsys, "census", "--spaces", "")
    assert code == 1 and "empty" in err
    code, out, _ = run(capsys, "census", "--spaces", "3,2,1,1,1;3,2,1,2,0", "--format", "json", "--out", str(tmp_path))
    docs = json.loads(out)
    assert code == 0 and len(docs) == 2
    assert docs[0]["census"] == {"E1": 1, "ADJ": 9, "N1(r=1)": 2}
    assert sorted(p.name for p in tmp_path.iterdir()) == ["3_2_1_1_1_1.json", "3_2_1_2_0_1.json"]
