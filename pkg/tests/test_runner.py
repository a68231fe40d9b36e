import pytest

from hris_sim.cli import main as cli_main
from hris_sim.runner import (emit_csv, run_battery_experiment,
                             run_energy_experiment, run_sumrate_experiment,
                             validate_schemes)
from hris_sim.scenario import Scenario, ScenarioError

SMALL = Scenario(n_drops=5, k_users=8, k_sweep=(4, 8), n_sweep=(16, 32),
                 q_sweep=(1, 2), p_on_sweep_mw=(0.1, 0.5),
                 capacity_sweep_mah=(100.0, 200.0),
                 battery_trace_periods=5000, soc_trace_periods=100,
                 schemes=("idle", "oracle-weighted", "probe-q2"))


def test_invalid_scheme_rejected():
    with pytest.raises(ScenarioError, match="not-a-scheme"):
        validate_schemes(("idle", "not-a-scheme"))
    validate_schemes(("probe-q4",))  # arbitrary bit depths parse


def test_sumrate_report_shape_and_provenance():
    report = run_sumrate_experiment(SMALL)
    assert len(report.sumrate_drops) == len(SMALL.k_sweep) * SMALL.n_drops * 3
    for row in report.sumrate_drops:
        assert set(row) == {"scheme", "k_users", "seed", "drop", "sum_rate_bps_hz"}
        assert row["seed"] == SMALL.seed
    ks = {r["k_users"] for r in report.sumrate_summary}
    assert ks == set(SMALL.k_sweep)
    # per-UE direct fractions carry full provenance too
    assert len(report.direct_fraction) == sum(k for k in SMALL.k_sweep) * SMALL.n_drops * 3


def test_schemes_share_channel_drops():
    report = run_sumrate_experiment(SMALL)
    # identical UE draws per (k, drop) across schemes means eta=0 baselines
    # depend only on the drop; idle vs probe rows must differ (reflection on)
    by_key = {}
    for row in report.sumrate_drops:
        by_key.setdefault((row["k_users"], row["drop"]), {})[row["scheme"]] = \
            row["sum_rate_bps_hz"]
    for rates in by_key.values():
        assert len(rates) == 3


def test_energy_report_monotone_in_n_and_q():
    report = run_energy_experiment(SMALL)
    for q in (1, 2):
        means = [r["mean_harvested_w"] for r in report.energy_summary
                 if r["q_bits"] == q]
        assert len(means) == 2
        assert means[1] > means[0]
    consumed = {(r["n_elements"], r["q_bits"]): r["mean_consumed_w"]
                for r in report.energy_summary}
    assert consumed[(32, 2)] > consumed[(32, 1)]
    assert consumed[(16, 2)] > consumed[(16, 1)]
    assert report.battery_ploc  # battery sections piggyback on the energy run


def test_battery_report_contents():
    report = run_battery_experiment(SMALL)
    assert len(report.battery_ploc) == 4
    for row in report.battery_ploc:
        assert 0.0 <= row["ploc_theory"] <= 1.0
        assert 0.0 <= row["ploc_empirical"] <= 1.0
        assert row["chain_status"] in ("ok", "saturated-charge",
                                       "saturated-discharge")
    zetas = {row["zeta"] for row in report.battery_soc}
    assert zetas == set(SMALL.zeta_sweep)


def test_soc_traces_discharge_at_low_traffic_and_charge_at_high():
    # at the default hardware point the harvest covers consumption at
    # traffic 0.8 but not at 0.2; traces start at half charge
    report = run_battery_experiment(SMALL)
    final = {}
    for row in report.battery_soc:
        final[row["zeta"]] = row["soc_mah"]  # last row per zeta wins
    half = SMALL.capacity_mah / 2
    assert final[0.2] < half
    assert final[0.8] > half


def test_emit_csv_deterministic(tmp_path):
    report = run_sumrate_experiment(SMALL)
    out_a = emit_csv(report, tmp_path / "a")
    out_b = emit_csv(report, tmp_path / "b")
    for pa, pb in zip(out_a, out_b):
        assert pa.read_bytes() == pb.read_bytes()


def test_rerun_identical_and_worker_count_invariant(tmp_path):
    r1 = run_sumrate_experiment(SMALL)
    r2 = run_sumrate_experiment(SMALL)
    r3 = run_sumrate_experiment(SMALL, workers=2)
    assert r1.sumrate_drops == r2.sumrate_drops == r3.sumrate_drops


def test_cli_run_and_config_error(tmp_path):
    cfg = tmp_path / "sc.json"
    from hris_sim.scenario import save_scenario
    save_scenario(SMALL, cfg)
    rc = cli_main(["run", "--config", str(cfg), "--experiment", "sumrate",
                   "--out", str(tmp_path / "out")])
    assert rc == 0
    assert (tmp_path / "out" / "sumrate_drops.csv").exists()
    assert (tmp_path / "out" / "scenario.json").exists()
    rc = cli_main(["run", "--config", str(tmp_path / "nope.json"),
                   "--experiment", "sumrate", "--out", str(tmp_path / "o2")])
    assert rc == 2


def test_cli_seed_and_drop_overrides(tmp_path):
    cfg = tmp_path / "sc.json"
    from hris_sim.scenario import save_scenario
    save_scenario(SMALL, cfg)
    out = tmp_path / "out"
    rc = cli_main(["run", "--config", str(cfg), "--experiment", "sumrate",
                   "--out", str(out), "--seed", "9", "--drops", "2"])
    assert rc == 0
    lines = (out / "sumrate_drops.csv").read_text().splitlines()
    assert len(lines) == 1 + len(SMALL.k_sweep) * 2 * 3
    assert all(line.split(",")[2] == "9" for line in lines[1:])


def test_cli_init_config_roundtrip(tmp_path):
    path = tmp_path / "default.json"
    assert cli_main(["init-config", "--out", str(path)]) == 0
    from hris_sim.scenario import load_scenario
    assert load_scenario(path) == Scenario()
