"""Unit tests for array geometry, channels and scenario sampling."""

import numpy as np
import pytest

from jcjbeam.channel import (
    ArrayGeometry,
    ScenarioConfig,
    Terminal,
    channel_vector,
    dbm_to_mw,
    mw_to_dbm,
    path_gain,
    sample_scenario,
    steering,
)

GEOM = ArrayGeometry(n_tx=16, carrier_freq_hz=6.0e9)


def test_dbm_round_trip():
    for dbm in (-101.0, -81.0, 0.0, 13.0):
        assert np.isclose(mw_to_dbm(dbm_to_mw(dbm)), dbm)


def test_steering_unit_modulus_and_phase():
    v = steering(GEOM, 30.0)
    assert np.allclose(np.abs(v), 1.0)
    # half-wavelength spacing: element k is exp(-j pi k sin(theta))
    expect = np.exp(-1j * np.pi * np.arange(16) * np.sin(np.deg2rad(30.0)))
    assert np.allclose(v, expect)


def test_steering_broadside_is_ones():
    assert np.allclose(steering(GEOM, 0.0), 1.0)


def test_steering_rejects_bad_angle():
    with pytest.raises(ValueError):
        steering(GEOM, 91.0)


def test_path_gain_magnitude():
    g = path_gain(GEOM, 50.0, 0.3)
    lam = GEOM.wavelength_m
    assert np.isclose(abs(g), lam / (4.0 * np.pi * 50.0))
    assert np.isclose(np.angle(g), 0.3)


def test_channel_vector_composition():
    t = Terminal("UE", 75.0, -20.0, 1.0, 1e-10)
    h = channel_vector(GEOM, t)
    assert np.allclose(h, path_gain(GEOM, 75.0, 1.0) * steering(GEOM, -20.0))


def test_terminal_validation():
    with pytest.raises(ValueError):
        Terminal("BS", 10.0, 0.0, 0.0, 1e-10)
    with pytest.raises(ValueError):
        Terminal("UE", -1.0, 0.0, 0.0, 1e-10)
    with pytest.raises(ValueError):
        Terminal("UAV", 10.0, 0.0, 0.0, 1e-10)  # missing eaves power


def test_sample_scenario_deterministic():
    cfg = ScenarioConfig()
    a = sample_scenario(cfg, 11, 3)
    b = sample_scenario(cfg, 11, 3)
    assert np.array_equal(a.h_ue, b.h_ue)
    assert np.array_equal(a.h_uav, b.h_uav)


def test_sample_scenario_varies_with_realization():
    cfg = ScenarioConfig()
    a = sample_scenario(cfg, 11, 0)
    b = sample_scenario(cfg, 11, 1)
    assert not np.allclose(a.h_ue, b.h_ue)


def test_ue_separation_enforced():
    cfg = ScenarioConfig(n_ue=4, min_ue_separation_deg=5.0)
    for r in range(40):
        sc = sample_scenario(cfg, 2, r)
        aods = np.array([t.aod_deg for t in sc.ues])
        diffs = np.abs(aods[:, None] - aods[None, :])
        np.fill_diagonal(diffs, np.inf)
        assert diffs.min() >= 5.0


def test_sampled_parameters_in_bounds():
    cfg = ScenarioConfig()
    for r in range(30):
        sc = sample_scenario(cfg, 9, r)
        for t in sc.ues + sc.uavs:
            assert 50.0 <= t.range_m <= 100.0
            assert -60.0 <= t.aod_deg <= 60.0


def test_angle_distribution_roughly_uniform():
    # chi-square over 6 equal bins for unconstrained single-UE draws
    cfg = ScenarioConfig(n_ue=1, n_uav=0, min_ue_separation_deg=0.0)
    draws = np.array(
        [sample_scenario(cfg, 5, r).ues[0].aod_deg for r in range(600)]
    )
    counts, _ = np.histogram(draws, bins=6, range=(-60.0, 60.0))
    expected = 100.0
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    assert chi2 < 20.5  # 5 dof, p about 0.001


def test_scenario_shapes_and_stacked_channel():
    sc = sample_scenario(ScenarioConfig(), 1, 0)
    assert sc.h_ue.shape == (16, 2)
    assert sc.h_uav.shape == (16, 2)
    h = sc.stacked_channel()
    assert h.shape == (4, 16)
    assert np.allclose(h[0], sc.h_ue[:, 0].conj())
