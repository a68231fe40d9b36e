"""Scheme comparison on the downlink sum-rate, in the two regimes the
repository ships configurations for:

* the default layout, where the direct links are strong and a handful of
  users (fewer than BS antennas) benefit from the aimed reflection;
* the coverage layout (street-level massive-MIMO BS, elevated surface,
  dense blockers), where most direct links are blocked and the weighted
  oracle's pruning of unreachable users shows at every K.

Run:  python demos/03_sumrate_comparison.py
"""

from dataclasses import replace

from hris_sim import Scenario, load_scenario, run_sumrate_experiment
from hris_sim.scenario import default_scenario_path

COVERAGE = default_scenario_path().with_name("coverage.json")


def show(scenario, title):
    report = run_sumrate_experiment(scenario)
    print(f"\n=== {title}")
    print(f"{'scheme':20s}" + "".join(f"  K={k:<4d}" for k in scenario.k_sweep))
    rows = {}
    for r in report.sumrate_summary:
        rows.setdefault(r["scheme"], {})[r["k_users"]] = r["mean_sum_rate_bps_hz"]
    for scheme in scenario.schemes:
        cells = "".join(f"  {rows[scheme][k]:6.2f}" for k in scenario.k_sweep)
        print(f"{scheme:20s}{cells}")


small_k = Scenario(k_sweep=(1, 2, 3), n_drops=60)
show(small_k, "default layout, mean sum-rate (bits/s/Hz), 60 drops")

coverage = replace(load_scenario(COVERAGE), k_sweep=(10, 25, 50, 75),
                   n_drops=40,
                   schemes=("idle", "oracle-equal-gain", "oracle-weighted",
                            "probe-q2"))
show(coverage, "coverage layout, mean sum-rate (bits/s/Hz), 40 drops")

print("\nIn the default layout the aimed reflection lifts small user groups; "
      "in the coverage layout the gain-weighted oracle stays ahead of the "
      "equal-gain one at every K.")
