from __future__ import annotations

import json

import pytest

from sumclique import sumsets
from sumclique.cli import main
from sumclique.verify import check_duality


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_census_to_file(tmp_path, capsys):
    out = tmp_path / "t.json"
    code, _, _ = run(["census", "--group", "zN", "--size", "16", "--k", "4", "--out", str(out)], capsys)
    assert code == 0
    report = json.loads(out.read_text())
    assert sum(report["counts"].values()) == 1820
    assert report["config"]["command"] == "census"
    assert report["config"]["group"]["order"] == 16


def test_census_csv(capsys):
    code, out, _ = run(["census", "--size", "5", "--k", "2", "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines() == ["m,count", "1,10"]


def test_expect(capsys):
    code, out, _ = run(["expect", "--size", "5", "--k", "3"], capsys)
    body = json.loads(out)
    assert code == 0
    assert (body["expectation"]["expectation_num"], body["expectation"]["expectation_den"]) == (5, 4)


def test_clique_paley_file(tmp_path, capsys):
    f = tmp_path / "paley5.txt"
    f.write_text("# quadratic residues mod 5\n1\n4\n")
    code, out, _ = run(["clique", "--group", "zN", "--size", "5", "--set-file", str(f)], capsys)
    assert code == 0
    assert json.loads(out)["clique"]["omega"] == 2


def test_clique_budget_exit(capsys):
    code, _, err = run(["clique", "--group", "z2n", "--dim", "8", "--budget-nodes", "5"], capsys)
    assert code == 3
    assert "budget" in err


def test_precondition_exit(tmp_path, capsys):
    assert run(["clique", "--group", "z2n"], capsys)[0] == 2
    assert run(["clique", "--size", "6", "--paley"], capsys)[0] == 2
    assert run(["clique", "--size", "5", "--set-file", str(tmp_path / "missing.txt")], capsys)[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1\nx\n")
    assert run(["clique", "--size", "5", "--set-file", str(bad)], capsys)[0] == 2
    assert run(["witness", "--size", "1000", "--ap-length", "100"], capsys)[0] == 2


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["census", "--bogus"])
    assert exc.value.code == 2


def test_freiman_integers(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("0\n1\n3\n7\n")
    code, out, _ = run(["freiman", "--integers", "--set-file", str(f)], capsys)
    body = json.loads(out)
    assert code == 0
    assert body["freiman_dim"] == 3 and body["relation_basis"] == []
    assert body["freiman_inequality"]["holds"]


def test_freiman_classify(capsys):
    code, out, _ = run(["freiman", "--classify", "10", "--k", "4"], capsys)
    body = json.loads(out)
    assert code == 0 and body["sets"] == 210 and body["classes"] == 5


def test_subspace_and_bounds(capsys):
    code, out, _ = run(["subspace", "--dim", "8", "--k", "2"], capsys)
    body = json.loads(out)
    assert code == 0
    assert body["moments"]["E_X_exact"] == {"num": 10795, "den": 8}
    code, out, _ = run(["bounds", "--group", "zN", "--size", "1048576", "--k", "8", "--m-max", "10"], capsys)
    body = json.loads(out)
    assert code == 0 and body["tail"]["passes"] and len(body["count_bounds_log2"]) == 4


def test_rectify_and_refine(capsys):
    code, out, _ = run(["rectify", "--size", "11", "--paley"], capsys)
    assert code == 0 and "rectifiable" in json.loads(out)
    code, out, _ = run(["refine", "--size", "100000", "--ap-length", "2000", "--seed", "3"], capsys)
    body = json.loads(out)
    assert code == 0 and body["k"] == 2000


def test_simulate_report(capsys):
    code, out, _ = run(["simulate", "--group", "z2n", "--dim", "9", "--trials", "30", "--seed", "7"], capsys)
    body = json.loads(out)
    assert code == 0
    assert sum(body["histogram"].values()) + len(body["inexact_trials"]) == 30
    assert body["config"]["master_seed"] == 7


def test_reports_identical_across_thread_counts(monkeypatch, capsys):
    argv = ["simulate", "--group", "z2n", "--dim", "7", "--trials", "6", "--seed", "5"]
    reports = []
    for threads in ("1", "2"):
        monkeypatch.setenv("SUMCLIQUE_THREADS", threads)
        code, out, _ = run(argv, capsys)
        assert code == 0
        body = json.loads(out)
        body.pop("timings_ms")
        reports.append(json.dumps(body, sort_keys=True))
    assert reports[0] == reports[1]


def _with_diagonal(g, X):
    # off by one: lets i == j into the pair sums
    return sumsets.sumset(g, X, X)


def test_duality_check_catches_mutation(monkeypatch):
    assert check_duality(pairs=300).passed
    monkeypatch.setattr(sumsets, "restricted_sumset", _with_diagonal)
    assert not check_duality(pairs=300).passed


def test_verify_quick_passes(capsys):
    code, out, _ = run(["verify", "--level", "quick"], capsys)
    body = json.loads(out)
    assert code == 0 and body["failed"] == []
    assert [c["id"] for c in body["checks"]] == list(range(1, 13))


def test_verify_quick_fails_under_mutation(monkeypatch, capsys):
    monkeypatch.setattr(sumsets, "restricted_sumset", _with_diagonal)
    code, out, _ = run(["verify", "--level", "quick"], capsys)
    assert code != 0
    assert 2 in json.loads(out)["failed"]
