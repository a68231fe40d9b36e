import json

import pytest

from hris_sim.scenario import (Scenario, ScenarioError, default_scenario_path,
                               load_scenario, save_scenario, scenario_from_dict)


def test_default_file_reproduces_reference_parameters():
    sc = load_scenario(default_scenario_path())
    assert sc.p_dbm == 20.0
    assert sc.m_bs_antennas == 4
    assert (sc.nx, sc.nz) == (8, 4)
    assert sc.fc_ghz == 28.0
    assert sc.bs_position == (-25.0, 25.0, 6.0)
    assert sc.hris_position == (0.0, 0.0, 6.0)
    assert (sc.area_max[0] - sc.area_min[0],
            sc.area_max[1] - sc.area_min[1]) == (50.0, 50.0)
    assert sc.traffic == 0.5
    assert sc.blocker_density_per_m2 == 0.3
    assert sc.blocker_height_m == 1.8
    assert sc.blocker_diameter_m == 0.6
    assert (sc.n_dl_slots, sc.n_ul_slots) == (8, 3)
    assert sc.codebook_size == 32
    assert sc.q_bits == 2
    assert sc.eta == 0.8
    assert sc.period_s == 0.01
    assert sc.p_on_mw == 0.1
    assert (sc.chi_los, sc.chi_nlos) == (2.0, 4.0)
    assert sc.noise_dbm == -80.0
    assert (sc.d0_m, sc.gamma0) == (1.0, 1.0)
    assert sc.capacity_mah == 400.0
    assert sc.delta_mah == 20.0
    assert sc.guard_fraction == 0.1
    assert sc.controller_run_mw == 4.9
    assert sc.controller_idle_mw == 1.8


def test_defaults_match_packaged_file():
    assert load_scenario(default_scenario_path()) == Scenario()


def test_unit_conversions():
    sc = Scenario()
    assert abs(sc.p_watts - 0.1) < 1e-12
    assert abs(sc.noise_watts - 1e-11) < 1e-24
    assert sc.fc_hz == 28e9
    assert sc.n_hris_elements == 32


def test_roundtrip_stable(tmp_path):
    sc = Scenario(seed=17, k_users=12)
    path = save_scenario(sc, tmp_path / "sc.json")
    again = load_scenario(path)
    assert again == sc
    path2 = save_scenario(again, tmp_path / "sc2.json")
    assert path.read_bytes() == path2.read_bytes()


def test_unknown_key_named(tmp_path):
    data = Scenario().to_dict()
    data["mystery_knob"] = 3
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ScenarioError, match="mystery_knob"):
        load_scenario(path)


def test_missing_field_named(tmp_path):
    data = Scenario().to_dict()
    del data["nx"]
    path = tmp_path / "missing.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ScenarioError, match="nx"):
        load_scenario(path)


def test_parse_error_carries_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"p_dbm": 20.0,\n  "oops"\n}')
    with pytest.raises(ScenarioError, match="line"):
        load_scenario(path)


def test_validation_errors():
    with pytest.raises(ScenarioError):
        Scenario(eta=1.5)
    with pytest.raises(ScenarioError):
        Scenario(guard_fraction=1.0)
    with pytest.raises(ScenarioError):
        Scenario(chi_los=4.0, chi_nlos=2.0)
    with pytest.raises(ScenarioError):
        Scenario(n_sweep=(30,))  # not divisible by nx
    with pytest.raises(ScenarioError):
        Scenario(blockage_mode="psychic")
    with pytest.raises(ScenarioError):
        scenario_from_dict({})
