import json
import subprocess
import sys

import numpy as np
import pytest

import zipfkit as zk
from zipfkit.cli import main
from zipfkit.reedsim import ReedConfig


@pytest.fixture(scope="module")
def reed_csv(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("pipeline")
    sp = zk.reed_panel(n_companies=2000, n_years=10, p=0.05, missing_rate=0.35, seed=7)
    path = tmp / "panel.csv"
    zk.write_panel_csv(path, sp.dataset, bad_rows=5)
    return path


def _config(reed_csv, out_dir, **overrides):
    base = dict(input_path=str(reed_csv), output_dir=str(out_dir), seed=3,
                bootstrap_replicates=200)
    base.update(overrides)
    return zk.RunConfig(**base)


def test_pipeline_report_contents(reed_csv, tmp_path):
    config = _config(reed_csv, tmp_path / "out")
    report = zk.run_pipeline(config)

    assert report["input"]["rows"] == report["input"]["kept"] + sum(
        report["input"]["dropped"].values())
    assert set(report["series"]) == {"actual", "theoretical", "fundamental"}
    for row in report["series"].values():
        for key in ("alpha", "x_min", "cvm_p", "lmz", "lr", "tail_n"):
            assert key in row
    assert report["config"]["seed"] == 3

    # the fundamentals tail should match the generator's analytic exponent
    analytic, _ = zk.analytic_tail_exponent(
        ReedConfig(p=0.05, x0=1.0, log_z_mean=-0.5, log_z_sd=1.0, n_firms=1))
    assert abs(report["series"]["fundamental"]["alpha"] - analytic) < 0.1

    summary = (tmp_path / "out" / "summary.txt").read_text()
    for column in ("exponent", "x_min", "CvM p", "LMZ", "LR", "tail n"):
        assert column in summary
    for name in ("actual", "theoretical", "fundamental"):
        assert name in summary
        assert (tmp_path / "out" / f"ccdf_{name}.txt").exists()


def test_pipeline_indicator_battery(reed_csv, tmp_path):
    report = zk.run_pipeline(_config(reed_csv, tmp_path / "out"))
    rows = report["indicator_series"]
    assert set(rows) == {"dividends", "cash_flow", "book_value"}
    # same schema as the price series rows: one shared code path
    assert all(set(rows[n]) == set(report["series"]["actual"]) for n in rows)
    summary = (tmp_path / "out" / "summary.txt").read_text()
    for name in rows:
        assert name in summary

    lean = zk.run_pipeline(_config(reed_csv, tmp_path / "lean", include_indicators=False))
    assert "indicator_series" not in lean


def test_pipeline_labels_series_errors(tmp_path):
    sp = zk.fe_panel(12, 2, noise_sd=0.1, seed=0)  # far too small for a 2% tail
    path = tmp_path / "tiny.csv"
    zk.write_panel_csv(path, sp.dataset)
    config = zk.RunConfig(input_path=str(path), output_dir=str(tmp_path / "out"),
                          bootstrap_replicates=100)
    with pytest.raises(ValueError, match="series 'actual'"):
        zk.run_pipeline(config)


def test_pipeline_rerun_byte_identical(reed_csv, tmp_path):
    config = _config(reed_csv, tmp_path / "out")
    zk.run_pipeline(config)
    first = (tmp_path / "out" / "report.json").read_bytes()
    zk.run_pipeline(config)
    second = (tmp_path / "out" / "report.json").read_bytes()
    assert first == second


def test_pipeline_seed_changes_bootstrap(reed_csv, tmp_path):
    r1 = zk.run_pipeline(_config(reed_csv, tmp_path / "a", seed=3))
    r2 = zk.run_pipeline(_config(reed_csv, tmp_path / "b", seed=4))
    assert r1["series"]["actual"]["alpha"] == r2["series"]["actual"]["alpha"]
    assert r1["series"]["actual"]["bootstrap_seed"] != r2["series"]["actual"]["bootstrap_seed"]


def test_run_config_validation(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"input_path": "x.csv"}))
    with pytest.raises(ValueError, match="output_dir"):
        zk.RunConfig.from_file(path)
    path.write_text(json.dumps({"input_path": "x", "output_dir": "y", "bogus": 1}))
    with pytest.raises(ValueError, match="unknown config key"):
        zk.RunConfig.from_file(path)
    with pytest.raises(ValueError, match="two-way"):
        zk.run_pipeline(zk.RunConfig(input_path="x", output_dir="y", model="pooled"))


def _vector_file(tmp_path, seed=0, n=3000, alpha=1.0):
    rng = np.random.default_rng(seed)
    path = tmp_path / "values.txt"
    np.savetxt(path, zk.sample_pareto(alpha, 1.0, n, rng))
    return path


def test_cli_fit_tail(tmp_path, capsys):
    path = _vector_file(tmp_path)
    assert main(["fit-tail", str(path), "--xmin-policy", "frac:0.05"]) == 0
    out = capsys.readouterr().out
    assert "alpha" in out and "tail_n" in out


def test_cli_gof_and_zipf(tmp_path, capsys):
    path = _vector_file(tmp_path, seed=1)
    assert main(["gof", str(path), "--replicates", "120", "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert "CvM_W2" in out and "p_value" in out
    assert main(["zipf", str(path)]) == 0
    out = capsys.readouterr().out
    assert "LMZ" in out and "LR" in out


def test_cli_zipf_table(tmp_path, capsys):
    out_path = tmp_path / "table.tsv"
    code = main(["zipf", "--table", "--sizes", "10,15", "--levels", "0.1",
                 "--replicates", "10000", "--seed", "2", "--out", str(out_path)])
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "n\tlevel\tcritical_value"
    assert len(lines) == 4  # two sizes plus the asymptotic row


def test_cli_simulate_ccdf_roundtrip(tmp_path, capsys):
    sim_path = tmp_path / "sim.txt"
    assert main(["simulate", "--p", "0.05", "--mu", "-0.5", "--sigma", "1.0",
                 "--firms", "5000", "--seed", "4", "--out", str(sim_path)]) == 0
    ccdf_path = tmp_path / "ccdf.txt"
    assert main(["ccdf", str(sim_path), "--out", str(ccdf_path)]) == 0
    pairs = np.loadtxt(ccdf_path)
    assert pairs.shape[1] == 2
    assert main(["fit-tail", str(sim_path), "--xmin-policy", "frac:0.02"]) == 0


def test_cli_panel_and_fundamentals(tmp_path, capsys):
    sp = zk.fe_panel(60, 6, noise_sd=0.3, seed=9)
    csv_path = tmp_path / "panel.csv"
    zk.write_panel_csv(csv_path, sp.dataset)
    assert main(["panel", str(csv_path), "--model", "fe-2w", "--select"]) == 0
    out = capsys.readouterr().out
    assert "Hausman" in out and "R2" in out
    fund_path = tmp_path / "fund.csv"
    assert main(["fundamentals", str(csv_path), "--out", str(fund_path)]) == 0
    assert fund_path.read_text().startswith("company_id,year,ln_fundamentals")


def test_cli_pipeline(reed_csv, tmp_path, capsys):
    cfg = {"input_path": str(reed_csv), "output_dir": str(tmp_path / "out"),
           "seed": 1, "bootstrap_replicates": 150}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["pipeline", "--config", str(cfg_path)]) == 0
    out = capsys.readouterr().out
    assert "two-sample KS" in out
    assert (tmp_path / "out" / "report.json").exists()


def test_cli_exit_codes(tmp_path, capsys):
    # missing file: i/o error
    assert main(["fit-tail", str(tmp_path / "absent.txt")]) == 2
    # bad data: validation error
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\n-3.0\n")
    assert main(["fit-tail", str(bad)]) == 1
    # bad usage: validation error
    assert main(["no-such-command"]) == 1
    assert main(["gof"]) == 1
    capsys.readouterr()


def test_console_entry_point():
    result = subprocess.run([sys.executable, "-m", "zipfkit.cli", "--help"],
                            capture_output=True, text=True)
    assert result.returncode == 0
    assert "pipeline" in result.stdout
