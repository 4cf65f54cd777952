import numpy as np
import pytest

from jsdm import cli
from jsdm.errors import ConfigError
from jsdm.harness import (RESULT_COLUMNS, ScenarioConfig, load_config,
                          reduction_verify, run_scenario, validate_sinr,
                          write_rows)

# self-regression of the full pipeline, pinned at first build
DESK_BEST_SUM_RATE = 35.20578716971952
DESK_BASELINE_SUM_RATE = 34.49698611066295


def small_config(**kw):
    defaults = dict(seeds=(1,), snr_db=(10.0,), num_slots=50,
                    alpha_sweep=(1.0, 4.0))
    defaults.update(kw)
    return ScenarioConfig(**defaults)


def test_config_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(approach="mystery")
    with pytest.raises(ConfigError):
        ScenarioConfig(snr_db=())
    with pytest.raises(ConfigError):
        ScenarioConfig(num_users=40, n_t=32)


def test_load_config_file_and_overrides(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text("n_t = 16\nsnr_db = 0, 10\nadaptive_threshold = false\n"
                    "# comment line\nseeds = 7\n", encoding="utf-8")
    config = load_config(str(path), {"num_users": "5", "dol_th": "0.8"})
    assert config.n_t == 16
    assert config.snr_db == (0.0, 10.0)
    assert config.seeds == (7,)
    assert config.num_users == 5
    assert config.dol_th == 0.8


def test_load_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("power_level = 9000\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_desk_scale_regression():
    rows = run_scenario(small_config())
    best = [r for r in rows if r.experiment == "run:best"]
    base = [r for r in rows if r.experiment == "run:noscheduling"]
    assert best[0].sum_rate == pytest.approx(DESK_BEST_SUM_RATE, rel=1e-12)
    assert base[0].sum_rate == pytest.approx(DESK_BASELINE_SUM_RATE, rel=1e-12)


def test_single_user_scenario():
    rows = run_scenario(ScenarioConfig(num_users=1, seeds=(3,), snr_db=(10.0,),
                                       num_slots=10, alpha_sweep=(1.0,)))
    for r in rows:
        assert r.num_clusters == 1
        assert r.num_schedules == 1
        assert r.jain_index == pytest.approx(1.0)
        assert r.sum_rate > 0.0


def test_orthogonal_pair_always_scheduled_together():
    # two users far apart: negligible coupling, one joint schedule
    rows = run_scenario(ScenarioConfig(num_users=2, seeds=(2,), snr_db=(10.0,),
                                       num_slots=20, alpha_sweep=(1.0,),
                                       sector_min_deg=-55.0, sector_max_deg=55.0))
    best = [r for r in rows if r.experiment == "run:best"][0]
    assert best.num_schedules == 1
    assert best.jain_index > 0.8


def test_rows_have_valid_ranges():
    config = small_config(seeds=(1, 2))
    for r in run_scenario(config):
        assert np.isfinite(r.sum_rate) and r.sum_rate >= 0.0
        assert 1.0 / config.num_users - 1e-12 <= r.jain_index <= 1.0 + 1e-12


def test_baseline_row_present_at_every_snr():
    config = small_config(snr_db=(0.0, 10.0, 20.0))
    rows = run_scenario(config)
    baseline_snrs = sorted(r.snr_db for r in rows
                           if r.experiment == "run:noscheduling")
    assert baseline_snrs == [0.0, 10.0, 20.0]


def test_csv_deterministic_and_schema(tmp_path):
    config = small_config()
    path_a = tmp_path / "a.csv"
    path_b = tmp_path / "b.csv"
    write_rows(run_scenario(config), str(path_a))
    write_rows(run_scenario(config), str(path_b))
    data_a, data_b = path_a.read_bytes(), path_b.read_bytes()
    assert data_a == data_b
    header = data_a.decode("utf-8").splitlines()[0]
    assert header == ",".join(RESULT_COLUMNS)
    # normalized timing column keeps files byte-stable
    for line in data_a.decode("utf-8").splitlines()[1:]:
        assert line.endswith(",0")


def test_validate_sinr_verdict_and_accuracy():
    report = validate_sinr(draws=200)
    assert report["verdict"] == "per_group"
    assert max(report["max_rel_err"]["per_group"]) < 0.10


def test_adaptive_threshold_wiring():
    # the adaptation loop drives the pipeline and lands on a legal
    # threshold that every emitted row carries
    config = ScenarioConfig(seeds=(1,), snr_db=(10.0,), num_slots=10,
                            alpha_sweep=(2.0,), num_users=8,
                            adaptive_threshold=True, threshold_step=0.1)
    rows = run_scenario(config)
    thresholds = {r.dol_th for r in rows}
    assert len(thresholds) == 1
    chosen = thresholds.pop()
    assert 0.1 - 1e-9 <= chosen <= 1.0


def test_reduction_verify_on_sat_file(tmp_path):
    path = tmp_path / "sat.cnf"
    path.write_text("p cnf 2 2\n1 2 0\n-1 -2 0\n", encoding="utf-8")
    report = reduction_verify(str(path), delta=0.05)
    assert report["decision"] is True
    assert report["sat_oracle"] is True
    assert report["equivalent"] is True
    assert report["lemma_conditions"] == [True, True, True]


def run_cli(args):
    return cli.main(args)


def test_cli_run_writes_csv(tmp_path):
    out = tmp_path / "results"
    code = run_cli(["run", "--out", str(out), "--seeds", "1", "--snr_db", "10",
                    "--num_slots", "5", "--num_users", "6",
                    "--alpha_sweep", "1"])
    assert code == 0
    data = (out / "results.csv").read_text(encoding="utf-8")
    assert data.splitlines()[0] == ",".join(RESULT_COLUMNS)


def test_cli_cluster_and_schedule(tmp_path, capsys):
    common = ["--seed", "1", "--num_users", "6", "--num_slots", "5"]
    assert run_cli(["cluster", "--out", str(tmp_path)] + common) == 0
    assert (tmp_path / "clusters.csv").exists()
    assert run_cli(["schedule", "--alpha", "1.0", "--out", str(tmp_path)] + common) == 0
    assert (tmp_path / "schedules.csv").exists()
    captured = capsys.readouterr()
    assert "schedule 1" in captured.out


def test_cli_figure_threshold(tmp_path):
    code = run_cli(["figure", "threshold", "--out", str(tmp_path),
                    "--seeds", "1", "--num_users", "6", "--num_slots", "4",
                    "--snr_db", "10", "--alpha_sweep", "2",
                    "--threshold_sweep", "0.6,0.9"])
    assert code == 0
    assert (tmp_path / "figure_threshold.csv").exists()


def test_cli_validate_sinr(capsys):
    assert run_cli(["validate-sinr", "--mc_draws", "40"]) == 0
    assert "per_group" in capsys.readouterr().out


def test_cli_reduction_verify(tmp_path, capsys):
    path = tmp_path / "f.cnf"
    path.write_text("p cnf 2 2\n1 2 0\n-1 -2 0\n", encoding="utf-8")
    assert run_cli(["reduction", "verify", "--cnf", str(path)]) == 0
    assert "EQUIVALENT" in capsys.readouterr().out


def test_cli_exit_code_config_error(capsys):
    assert run_cli(["run", "--approach", "bogus"]) == 2


def test_cli_exit_code_size_cap(tmp_path, capsys):
    path = tmp_path / "big.cnf"
    path.write_text("p cnf 7 3\n1 2 3 4 5 6 7 0\n-1 -2 -3 -4 -5 -6 -7 0\n"
                    "1 -2 3 -4 5 -6 7 0\n", encoding="utf-8")
    assert run_cli(["reduction", "verify", "--cnf", str(path),
                    "--delta", "0.01"]) == 4
