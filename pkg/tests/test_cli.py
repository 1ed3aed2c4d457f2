from __future__ import annotations

import csv
import json

import pytest

from tvpshrink.cli import main

FAST = ["--niter", "400", "--nburn", "200"]


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def sim_csv(tmp_path_factory):
    d = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--seed", "123", "--T", "80", "--out", str(d / "sim.csv")]) == 0
    return d / "sim.csv"


def test_simulate_defaults(tmp_path):
    assert main(["simulate", "--out", str(tmp_path / "a.csv")]) == 0
    r = rows(tmp_path / "a.csv")
    assert r[0] == ["t", "y", "x1", "x2"] and len(r) == 201
    truth = rows(tmp_path / "a_truth.csv")
    assert truth[0][:4] == ["t", "beta_Intercept", "beta_x1", "beta_x2"] and len(truth) == 202


def test_simulate_flags_and_determinism(tmp_path):
    args = ["simulate", "--T", "500", "--theta", "0.2,0,0", "--beta-mean", "1.5,-0.3,0", "--seed", "123"]
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--out", str(tmp_path / "b.csv")])
    assert len(rows(tmp_path / "a.csv")) == 501
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_fit_deterministic_and_complete(sim_csv, tmp_path):
    for name in ("r1", "r2"):
        assert main(["fit", "--data", str(sim_csv), "--out", str(tmp_path / name), "--seed", "9"] + FAST) == 0
    assert (tmp_path / "r1/draws.csv").read_bytes() == (tmp_path / "r2/draws.csv").read_bytes()
    assert (tmp_path / "r1/beta_x1.csv").read_bytes() == (tmp_path / "r2/beta_x1.csv").read_bytes()
    draws = rows(tmp_path / "r1/draws.csv")
    assert len(draws) == 201 and "beta_mean_x1" in draws[0] and "a_xi" in draws[0]
    path = rows(tmp_path / "r1/beta_Intercept.csv")
    assert len(path) == 201 and len(path[0]) == 81
    q = rows(tmp_path / "r1/quantiles_x2.csv")
    assert q[0] == ["t", "q2.5", "q25", "q50", "q75", "q97.5"]
    man = json.loads((tmp_path / "r1/manifest.json").read_text())
    assert man["command"] == "fit" and man["seed"] == 9 and len(man["inputs"]) == 1
    assert "abs(theta_sr_Intercept)" in (tmp_path / "r1/summary.txt").read_text()


def test_fit_lasso_horseshoe_ridge(sim_csv, tmp_path):
    lasso = ["--mod-type", "double", "--a-xi", "1", "--a-tau", "1", "--no-learn-a-xi", "--no-learn-a-tau"]
    hs = ["--mod-type", "triple"] + [x for p in ("a-xi", "a-tau", "c-xi", "c-tau") for x in (f"--{p}", "0.5")]
    hs += [f"--no-learn-{p}" for p in ("a-xi", "a-tau", "c-xi", "c-tau", "kappa2-b", "lambda2-b")]
    for name, extra in (("lasso", lasso), ("hs", hs), ("ridge", ["--mod-type", "ridge"])):
        assert main(["fit", "--data", str(sim_csv), "--out", str(tmp_path / name)] + FAST + extra) == 0
    assert "a_xi" not in rows(tmp_path / "lasso/draws.csv")[0]
    assert "kappa2_Intercept" in rows(tmp_path / "hs/draws.csv")[0]
    summary = (tmp_path / "ridge/summary.txt").read_text()
    assert "a_xi" not in summary and "kappa2_B" not in summary


def test_fit_config_file_and_override(sim_csv, tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[lasso]\nmod_type = double\na_xi = 1\nlearn_a_xi = false\nniter = 300\nnburn = 100\n")
    assert main(["fit", "--data", str(sim_csv), "--config", str(cfg), "--niter", "200",
                 "--out", str(tmp_path / "r")]) == 0
    model = json.loads((tmp_path / "r/model.json").read_text())
    assert model["prior"]["a_xi"] == 1.0 and model["mcmc"]["niter"] == 200


def test_errors_are_machine_readable(sim_csv, tmp_path, capsys):
    assert main(["fit", "--data", str(sim_csv), "--covariates", "nope", "--out", str(tmp_path / "x")]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "usage" and "nope" in err["message"]
    assert main(["fit", "--data", str(sim_csv), "--nburn", "500", "--niter", "100", "--out", str(tmp_path / "x")]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "validation" and "empty draw window" in err["details"][0]
    bad = tmp_path / "bad.ini"
    bad.write_text("[s]\nfoo = 1\n")
    assert main(["fit", "--data", str(sim_csv), "--config", str(bad), "--out", str(tmp_path / "x")]) == 2
    assert "unknown key" in json.loads(capsys.readouterr().err)["details"][0]


def test_lpds_run_and_refit_agree(sim_csv, tmp_path, capsys):
    train = tmp_path / "train.csv"
    test = tmp_path / "test.csv"
    lines = sim_csv.read_text().splitlines()
    train.write_text("\n".join(lines[:80]) + "\n")
    test.write_text("\n".join([lines[0], lines[80]]) + "\n")
    main(["fit", "--data", str(train), "--out", str(tmp_path / "r"), "--seed", "4"] + FAST)
    capsys.readouterr()
    assert main(["lpds", "--run", str(tmp_path / "r"), "--test", str(test), "--eval-points", "1,2,3",
                 "--density-grid=-10:10:41", "--grid-out", str(tmp_path / "g.csv")]) == 0
    out1 = capsys.readouterr().out.splitlines()
    assert out1[0].startswith("lpds ") and len([l for l in out1 if l.startswith("density")]) == 3
    assert all(float(l.split()[2]) > 0 for l in out1 if l.startswith("density"))
    assert len(rows(tmp_path / "g.csv")) == 42
    assert main(["lpds", "--data", str(sim_csv), "--origin", "79", "--seed", "4"] + FAST) == 0
    out2 = capsys.readouterr().out.splitlines()
    assert out2 == [out1[0]]


def test_backtest_scheduling_independent(sim_csv, tmp_path, capsys):
    specs = tmp_path / "specs.ini"
    specs.write_text("[ng]\nmod_type = double\n\n[ridge]\nmod_type = ridge\n")
    base = ["backtest", "--data", str(sim_csv), "--config-set", str(specs), "--t0", "76", "--tmax", "78",
            "--seed-base", "100", "--nthin", "1"] + FAST
    assert main(base + ["--jobs", "1", "--out", str(tmp_path / "b1")]) == 0
    assert main(base + ["--jobs", "2", "--out", str(tmp_path / "b2")]) == 0
    for f in ("lpds_long.csv", "lpds_cumulative.csv"):
        assert (tmp_path / "b1" / f).read_bytes() == (tmp_path / "b2" / f).read_bytes()
    cum = rows(tmp_path / "b1/lpds_cumulative.csv")
    assert cum[0] == ["origin", "ng", "ridge"] and [r[0] for r in cum[1:]] == ["76", "77", "78"]
    # single origin equals the lpds command for the same origin and seed
    capsys.readouterr()
    main(["lpds", "--data", str(sim_csv), "--origin", "77", "--seed", "177", "--mod-type", "ridge",
          "--nthin", "1"] + FAST)
    val = capsys.readouterr().out.split()[1]
    long = rows(tmp_path / "b1/lpds_long.csv")
    assert [r[2] for r in long if r[0] == "77" and r[1] == "ridge"] == [val]


def test_backtest_records_job_failures(sim_csv, tmp_path, capsys):
    specs = tmp_path / "specs.ini"
    specs.write_text("[good]\nmod_type = ridge\n\n[bad]\nmod_type = double\nkappa2_B = -1\n")
    code = main(["backtest", "--data", str(sim_csv), "--config-set", str(specs), "--t0", "78",
                 "--out", str(tmp_path / "b")] + FAST)
    assert code == 1
    long = rows(tmp_path / "b/lpds_long.csv")
    assert long[1][1] == "good" and long[1][3] == ""
    assert long[2][1] == "bad" and "ValidationError" in long[2][3]
    assert json.loads(capsys.readouterr().err.splitlines()[-1])["failed_jobs"][0]["spec"] == "bad"
