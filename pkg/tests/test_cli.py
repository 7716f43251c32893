import json

import pytest

from growth_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_prime_tools(capsys):
    code, out, _ = run(capsys, "prime-tools", "--p", "10007", "--table-check")
    assert code == 0
    assert "is_prime=true" in out and "primitive_root=5" in out and "table_check=ok" in out
    code, out, _ = run(capsys, "prime-tools", "--p", "10008")
    assert code == 0 and "is_prime=false" in out


def test_setops(capsys):
    code, out, _ = run(capsys, "setops", "--p", "7", "--a", "1,2", "--b", "3,5", "--op", "sum")
    assert code == 0
    assert out.splitlines() == ["0,4,5,6", "card=4"]
    code, out, _ = run(capsys, "setops", "--p", "7", "--a", "1,2,3", "--op", "shifted")
    assert out.splitlines() == ["1,2,3,4,5,6", "card=6"]


def test_usage_errors(capsys):
    assert run(capsys, "setops", "--p", "8", "--a", "1", "--op", "sum")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "extremal", "--p", "101", "--n", "11")[0] == 2
    assert run(capsys, "fit", "--pairs", "1:1")[0] == 2
    assert run(capsys, "grid")[0] == 2


def test_extremal_and_reports(capsys, tmp_path):
    j, c = tmp_path / "r.json", tmp_path / "r.csv"
    code, out, _ = run(capsys, "extremal", "--p", "101", "--n", "3", "--json", str(j), "--csv", str(c))
    assert code == 0 and "1/1 reports passed" in out
    data = json.loads(j.read_text())
    assert data[0]["audit"] == "extremal" and data[0]["sizes"]["M"] == 34
    assert c.read_text().startswith("schema,run_id")


def test_trial_commands(capsys):
    assert run(capsys, "thm2", "--p", "101", "--size", "5", "--trials", "2")[0] == 0
    assert run(capsys, "thm3", "--size", "5", "--trials", "2")[0] == 0
    for audit in ("anchor", "levels", "injection", "bsg", "ruzsa"):
        assert run(capsys, "prooflab", audit, "--p", "101", "--size", "6", "--trials", "2")[0] == 0
    assert run(capsys, "prooflab", "lemma2", "--p", "10007", "--size", "20", "--trials", "1")[0] == 0


def test_quiet_prints_only_summary(capsys):
    code, out, _ = run(capsys, "--quiet", "prooflab", "ruzsa", "--p", "101", "--trials", "3")
    assert code == 0 and out.splitlines() == ["3/3 reports passed"]


def test_grid_and_fit(capsys, tmp_path):
    code, out, _ = run(capsys, "grid", "--audit", "thm1", "--p", "10007", "--sizes", "20,50")
    assert code == 0 and "summary thm1: 2/2 passed" in out
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps([{"audit": "ruzsa", "kind": "ap", "size": 5, "p": 101,
                                 "params": {"start": 2, "step": 3}}]))
    assert run(capsys, "grid", "--plan", str(plan))[0] == 0
    pairs = tmp_path / "pairs.csv"
    pairs.write_text("n,v\n10,100\n100,10000\n")
    code, out, _ = run(capsys, "fit", "--input", str(pairs))
    assert code == 0 and out.strip() == "beta=2 r2=1"


def test_audit_failure_exit_code(capsys, monkeypatch):
    from growth_lab import AuditFailure, harness

    def explode(spec, report):
        raise AuditFailure("forced")

    monkeypatch.setitem(harness.AUDITS, "ruzsa", explode)
    code, _, err = run(capsys, "prooflab", "ruzsa", "--p", "101", "--trials", "1")
    assert code == 1 and "forced" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\np = 101\nsize = 8\ntrials = 2\nquiet = true\n")
    code, out, _ = run(capsys, "prooflab", "ruzsa", "--config", str(cfg))
    assert code == 0 and out.strip() == "2/2 reports passed"
    code, out, _ = run(capsys, "prooflab", "ruzsa", "--config", str(cfg), "--trials", "3")
    assert out.strip() == "3/3 reports passed"
    cfg.write_text("colour = blue\n")
    assert run(capsys, "fit", "--config", str(cfg), "--pairs", "1:1,2:2")[0] == 2


def test_same_seed_same_report(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        run(capsys, "thm2", "--p", "101", "--size", "6", "--trials", "3", "--seed", "9", "--json", str(path))
    data = [json.loads(p.read_text()) for p in paths]
    for reports in data:
        for r in reports:
            r.pop("wall_time")
    assert data[0] == data[1]
