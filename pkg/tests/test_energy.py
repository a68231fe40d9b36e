import numpy as np
import pytest

from hris_sim.energy import (ConsumptionModel, FramePlan, HarvesterModel,
                             atom_consumption, config_consumption,
                             frame_energy, harvest, idle_harvest_fraction)
from hris_sim.hris import HrisConfig

DEFAULT_HARVESTER = HarvesterModel(a=0.01, b=6.642857142857143e-05,
                                   c=0.013285714285714286)


def quantized_config(indices, q_bits):
    step = 2 * np.pi / 2 ** q_bits
    phases = np.exp(1j * np.asarray(indices) * step)
    return HrisConfig(phases, "reflection", quantized=q_bits)


class TestHarvest:
    def test_zero_input_zero_output(self):
        assert harvest(DEFAULT_HARVESTER, 0.0) == 0.0

    def test_saturation_limit(self):
        sat = DEFAULT_HARVESTER.saturation
        big = harvest(DEFAULT_HARVESTER, 1e6 * DEFAULT_HARVESTER.c)
        assert big < sat
        assert np.isclose(big, sat, rtol=1e-3)

    def test_hand_evaluated_point(self):
        model = HarvesterModel(a=0.1, b=0.01, c=1.0)
        assert np.isclose(harvest(model, 1.0), 0.045)

    def test_negative_input_rejected(self):
        with pytest.raises(ValueError):
            harvest(DEFAULT_HARVESTER, -1e-6)

    def test_monotone_and_midpoint_concave(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            x, y = np.sort(rng.uniform(0.0, 0.5, 2))
            fx, fy = harvest(DEFAULT_HARVESTER, x), harvest(DEFAULT_HARVESTER, y)
            assert fy >= fx - 1e-15
            mid = harvest(DEFAULT_HARVESTER, (x + y) / 2)
            assert mid >= (fx + fy) / 2 - 1e-15

    def test_non_decreasing_validated(self):
        with pytest.raises(ValueError):
            HarvesterModel(a=0.001, b=0.01, c=1.0)


class TestAtomConsumption:
    def test_zero_index_draws_nothing(self):
        model = ConsumptionModel(1e-4, 2, 4.9e-3, 1.8e-3)
        assert atom_consumption(0, model) == 0.0

    def test_popcount_oracle_exhaustive_up_to_q8(self):
        for q in range(1, 9):
            model = ConsumptionModel(1e-4, q, 4.9e-3, 1.8e-3)
            for m in range(2 ** q):
                expected = 1e-4 * bin(m).count("1")
                assert np.isclose(atom_consumption(m, model), expected)

    def test_q2_examples(self):
        model = ConsumptionModel(1e-4, 2, 4.9e-3, 1.8e-3)
        assert np.isclose(atom_consumption(3, model), 2e-4)
        assert np.isclose(atom_consumption(2, model), 1e-4)

    def test_out_of_range_rejected(self):
        model = ConsumptionModel(1e-4, 2, 4.9e-3, 1.8e-3)
        with pytest.raises(ValueError):
            atom_consumption(4, model)
        with pytest.raises(ValueError):
            atom_consumption(-1, model)


class TestConfigConsumption:
    model = ConsumptionModel(1e-4, 2, 4.9e-3, 1.8e-3)

    def test_zero_phase_config_draws_nothing(self):
        assert config_consumption(quantized_config(np.zeros(32, int), 2),
                                  self.model) == 0.0

    def test_all_index_three_table_value(self):
        # 32 elements, two diodes each at 0.1 mW -> 6.4 mW
        cfg = quantized_config(np.full(32, 3), 2)
        assert np.isclose(config_consumption(cfg, self.model), 6.4e-3)

    def test_random_config_popcount_sum(self):
        rng = np.random.default_rng(1)
        idx = rng.integers(0, 4, size=32)
        cfg = quantized_config(idx, 2)
        expected = 1e-4 * sum(bin(int(m)).count("1") for m in idx)
        assert np.isclose(config_consumption(cfg, self.model), expected)

    def test_unquantized_rejected(self):
        cfg = HrisConfig(np.exp(1j * np.linspace(0, 1, 32)), "reflection")
        with pytest.raises(ValueError):
            config_consumption(cfg, self.model)


class TestFrameEnergy:
    plan = FramePlan(n_dl=8, n_ul=3, n_ce=1, period=0.01, traffic=0.5)
    consumption = ConsumptionModel(1e-4, 2, 4.9e-3, 1.8e-3)

    def test_idle_energy_is_controller_idle_only(self):
        e_h, e_c = frame_energy(self.plan, DEFAULT_HARVESTER, self.consumption,
                                1e-3, 1e-3, None, None, idle=True, nu=0.0126)
        assert np.isclose(e_c, 0.01 * 1.8e-3)

    def test_zero_traffic_harvests_nothing(self):
        plan = FramePlan(n_dl=8, n_ul=3, period=0.01, traffic=0.0)
        cfg = quantized_config(np.zeros(32, int), 2)
        e_h, _ = frame_energy(plan, DEFAULT_HARVESTER, self.consumption,
                              1e-3, 1e-3, cfg, cfg)
        assert e_h == 0.0

    def test_idle_fraction_hand_value(self):
        nu = idle_harvest_fraction(8, 4, 0.5)
        assert abs(nu - 0.125 / np.pi ** 2) < 1e-12

    def test_harvest_formula_matches_hand_expansion(self):
        cfg = quantized_config(np.zeros(32, int), 2)
        p_b, p_u = 2e-3, 5e-4
        e_h, e_c = frame_energy(self.plan, DEFAULT_HARVESTER, self.consumption,
                                p_b, p_u, cfg, cfg)
        expected = 0.01 * 0.5 * (8 * harvest(DEFAULT_HARVESTER, p_b)
                                 + 3 * harvest(DEFAULT_HARVESTER, p_u))
        assert np.isclose(e_h, expected)
        assert np.isclose(e_c, 0.01 * 4.9e-3)

    def test_linear_in_period_and_traffic(self):
        cfg = quantized_config(np.full(32, 1), 2)
        base_plan = FramePlan(n_dl=8, n_ul=3, period=0.01, traffic=0.25)
        e_h0, e_c0 = frame_energy(base_plan, DEFAULT_HARVESTER, self.consumption,
                                  1e-3, 1e-3, cfg, cfg)
        double_t = FramePlan(n_dl=8, n_ul=3, period=0.02, traffic=0.25)
        e_h1, e_c1 = frame_energy(double_t, DEFAULT_HARVESTER, self.consumption,
                                  1e-3, 1e-3, cfg, cfg)
        double_xi = FramePlan(n_dl=8, n_ul=3, period=0.01, traffic=0.5)
        e_h2, _ = frame_energy(double_xi, DEFAULT_HARVESTER, self.consumption,
                               1e-3, 1e-3, cfg, cfg)
        assert np.isclose(e_h1, 2 * e_h0) and np.isclose(e_c1, 2 * e_c0)
        assert np.isclose(e_h2, 2 * e_h0)

    def test_idle_consumes_less_than_active(self):
        cfg = quantized_config(np.full(32, 3), 2)
        _, e_active = frame_energy(self.plan, DEFAULT_HARVESTER, self.consumption,
                                   1e-3, 1e-3, cfg, cfg)
        _, e_idle = frame_energy(self.plan, DEFAULT_HARVESTER, self.consumption,
                                 1e-3, 1e-3, None, None, idle=True, nu=0.0126)
        assert e_idle < e_active

    def test_idle_scales_harvest_by_nu(self):
        cfg = quantized_config(np.zeros(32, int), 2)
        e_active, _ = frame_energy(self.plan, DEFAULT_HARVESTER, self.consumption,
                                   1e-3, 1e-3, cfg, cfg)
        nu = idle_harvest_fraction(8, 4)
        e_idle, _ = frame_energy(self.plan, DEFAULT_HARVESTER, self.consumption,
                                 1e-3, 1e-3, None, None, idle=True, nu=nu)
        assert np.isclose(e_idle, nu * e_active)

    def test_ce_slot_required(self):
        with pytest.raises(ValueError):
            FramePlan(n_dl=8, n_ul=3, n_ce=0)
