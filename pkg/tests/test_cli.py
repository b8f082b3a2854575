import csv
import io
import json
import math

import numpy as np
import pytest

from hessgas import acceptance, asymptotics, cli
from hessgas.cli import dump_json, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_metric_at_rest(capsys):
    code, out, _ = run(capsys, "eval", "--mass", "1", "--radius", "1", "--beta", "1", "--omega", "0,0,0", "--chart", "beta-omega")
    assert code == 0
    rep = json.loads(out)
    np.testing.assert_allclose(rep["metric"], np.diag([1.5, 0.4, 0.4, 0.4]), rtol=1e-12, atol=1e-14)
    assert rep["chart"] == "beta-omega"
    assert rep["coordinates"] == ["beta", "omega_x", "omega_y", "omega_z"]
    assert "row-major" in rep["index_order"]
    assert sorted(rep["derivatives"]) == ["1", "2", "3", "4"]


def test_eval_beta_m_cross_block(capsys):
    code, out, _ = run(capsys, "eval", "--chart", "beta-M", "--omega", "0.3,-0.2,0.9")
    assert code == 0
    g = np.array(json.loads(out)["metric"])
    assert np.max(np.abs(g[0, 1:])) <= 1e-12 * np.max(np.abs(g))


def test_eval_higher_order_and_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "eval", "--order", "5", "--omega", "0,0,1")
    assert code == 0
    d5 = np.array(json.loads(out)["derivatives"]["5"])
    assert d5.shape == (4,) * 5
    path = tmp_path / "eval.csv"
    assert main(["eval", "--format", "csv", "--out", str(path)]) == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["tensor", "index", "value"]
    assert rows[1][0] == "metric" and float(rows[1][2]) == pytest.approx(1.5)


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--omega", "0,0"],
        ["eval", "--beta", "-1"],
        ["eval", "--chart", "polar"],
        ["eval", "--order", "0"],
        ["eval", "--mass", "abc"],
        ["eval", "--bogus"],
        ["sweep", "--theta-grid", ""],
        ["sweep", "--theta-grid", "10,1"],
        ["verify", "--only", "nothing"],
        ["verify", "--tolerance-scale", "0"],
        [],
    ],
)
def test_usage_errors_exit_two_without_output(argv, tmp_path, capsys):
    out = tmp_path / "out.json"
    code = main(argv + ["--out", str(out)] if argv else argv)
    assert code == 2
    assert not out.exists()
    assert "usage" in capsys.readouterr().err


def test_numerical_failure_exits_one(monkeypatch, capsys):
    def boom(cfg):
        raise FloatingPointError("overflow")

    monkeypatch.setitem(cli.COMMANDS, "eval", boom)
    code, _, err = run(capsys, "eval")
    assert code == 1
    assert "numerical failure" in err


def test_outputs_are_deterministic(tmp_path):
    for cmd, extra in (("eval", ["--omega", "0.1,0.7,-0.3"]), ("sweep", ["--theta-grid", "1:1e3:4"])):
        a, b = tmp_path / f"{cmd}a", tmp_path / f"{cmd}b"
        main([cmd, *extra, "--out", str(a)])
        main([cmd, *extra, "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


def test_json_round_trip(tmp_path):
    path = tmp_path / "eval.json"
    assert main(["eval", "--omega", "0.5,0.5,0.5", "--out", str(path)]) == 0
    text = path.read_text()
    assert dump_json(json.loads(text)) == text


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# point\nbeta = 2\nomega = 0, 0, 1\nchart = flat\n")
    _, out, _ = run(capsys, "eval", "--config", str(cfg), "--chart", "beta-omega")
    rep = json.loads(out)
    assert rep["point"]["beta"] == 2.0
    assert rep["point"]["omega"] == [0.0, 0.0, 1.0]
    assert rep["chart"] == "beta-omega"
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert main(["eval", "--config", str(bad)]) == 2


def test_help_documents_columns_and_config(capsys):
    with pytest.raises(SystemExit):
        main(["sweep", "--help"])
    out = capsys.readouterr().out
    assert ", ".join(cli.SWEEP_COLUMNS) in " ".join(out.split())
    assert "key = value" in out


def test_default_sweep_final_rows(capsys):
    code, out, _ = run(capsys, "sweep")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == list(cli.SWEEP_COLUMNS)
    assert len(rows) == len(asymptotics.SWEEP_QUANTITIES) * len(asymptotics.DEFAULT_GRID)
    last = {r["quantity"]: r for r in rows}
    assert float(last["sectional"]["limit"]) == pytest.approx(-1.0 / 12.0, rel=1e-15)
    assert float(last["inertia"]["limit"]) == 1.0
    assert float(last["inertia"]["theta"]) == 1e5
    assert code == 0


def test_sweep_ninety_percent_rule(monkeypatch, capsys):
    real = asymptotics.limit_quantities

    def flaky(theta, gp, beta=1.0, **kw):
        if theta == 1e1:
            raise asymptotics.AccuracyError("no convergence")
        return real(theta, gp, beta, **kw)

    monkeypatch.setattr(asymptotics, "limit_quantities", flaky)
    # one of ten grid points failing leaves exactly 90% of rows ok
    code, out, _ = run(capsys, "sweep", "--theta-grid", ",".join(str(k) for k in range(1, 11)))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    failed = [r for r in rows if r["status"] != "ok"]
    assert failed and all(r["status"].startswith("failed: ") for r in failed)
    assert all(float(r["theta"]) == 1e1 or r["status"] == "ok" for r in rows)
    code, _, err = run(capsys, "sweep", "--theta-grid", "1,10")
    assert code == 1
    assert "rows succeeded" in err


def test_verify_only_rigidbody(capsys, tmp_path):
    path = tmp_path / "verdict.json"
    code, _, err = run(capsys, "verify", "--only", "rigidbody", "--out", str(path))
    verdict = json.loads(path.read_text())
    assert code == 0 and verdict["passed"]
    modules = {c["module"] for c in verdict["criteria"]}
    assert modules == {"rigidbody"}
    assert all(line.startswith("[PASS]") for line in err.strip().splitlines())


def test_verify_tightened_tolerances_identify_failures(capsys, tmp_path):
    path = tmp_path / "verdict.json"
    code, _, err = run(capsys, "verify", "--only", "covderiv", "--tolerance-scale", "1e-6", "--out", str(path))
    verdict = json.loads(path.read_text())
    assert code == 1
    assert verdict["failing"]
    assert "failing criteria" in err
    for c in verdict["criteria"]:
        assert math.isfinite(c["error"])


def test_verify_full_run_reports_every_criterion(tmp_path):
    path = tmp_path / "verdict.json"
    code = main(["verify", "--out", str(path)])
    verdict = json.loads(path.read_text())
    assert [c["id"] for c in verdict["criteria"]] == sorted(c.id for c in acceptance.criteria())
    assert code == (0 if verdict["passed"] else 1)
