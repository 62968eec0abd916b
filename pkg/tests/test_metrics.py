"""Unit tests for performance functionals, threshold math and CDF helpers."""

import math

import numpy as np
import pytest

from jcjbeam.metrics import (
    achievable_rate,
    empirical_cdf,
    erf,
    erfc,
    erfinv,
    percentile,
    q_function,
    q_inverse,
    realization_metrics,
    sinr_threshold_db,
    uav_sinr_db,
)

SIGMA = 10.0 ** (-10.1)  # -101 dBm in mW


def test_erf_against_stdlib():
    for x in np.linspace(-6.0, 6.0, 241):
        assert abs(erf(float(x)) - math.erf(float(x))) < 1e-10


def test_erfc_tail_accuracy():
    for x in (3.0, 4.0, 5.0, 6.0, 8.0):
        assert abs(erfc(x) - math.erfc(x)) < 1e-12 * math.erfc(x) + 1e-300


def test_erfinv_round_trip():
    for y in (-0.999, -0.5, -1e-8, 0.0, 0.3, 0.9, 0.999999):
        assert abs(erf(erfinv(y)) - y) < 1e-12 + 1e-7 * abs(y)
    with pytest.raises(ValueError):
        erfinv(1.0)


def test_q_function_values():
    assert q_function(0.0) == 0.5
    assert abs(q_function(1.0) - 0.15865525393145707) < 1e-12
    for p in (1e-6, 0.01, 0.4, 0.9):
        assert abs(q_function(q_inverse(p)) - p) < 1e-9 * p + 1e-14


def test_sinr_threshold_paper_value():
    assert abs(sinr_threshold_db(1e-5, 4) - 13.19) < 0.01


def test_sinr_threshold_modulation_shift():
    # (K-1)/3 scaling: K=16 sits 10 log10(5) dB above K=4
    d = sinr_threshold_db(1e-5, 16) - sinr_threshold_db(1e-5, 4)
    assert abs(d - 10.0 * math.log10(5.0)) < 1e-9


def test_sinr_threshold_round_trip():
    for ber in (1e-7, 1e-5, 1e-3):
        sinr = 10.0 ** (sinr_threshold_db(ber, 4) / 10.0)
        back = 4.0 * q_function(math.sqrt(3.0 * sinr / 3.0))
        assert abs(back - ber) / ber < 1e-7


def test_sinr_threshold_validation():
    with pytest.raises(ValueError):
        sinr_threshold_db(1.5, 4)
    with pytest.raises(ValueError):
        sinr_threshold_db(1e-5, 8)  # not a power of 4


def test_achievable_rate_hand_values():
    h = np.array([1.0 + 0j])
    # single stream at |h^H f|^2 = sigma^2
    f = np.array([[math.sqrt(SIGMA)]])
    assert np.isclose(achievable_rate(h, f, 0, SIGMA), 1.0)
    # two streams: signal 3 sigma^2, interference sigma^2
    f2 = np.array([[math.sqrt(3.0 * SIGMA), math.sqrt(SIGMA)]])
    assert np.isclose(achievable_rate(h, f2, 0, SIGMA), math.log2(1 + 1.5), rtol=1e-12)
    assert achievable_rate(h, np.zeros((1, 2)), 0, SIGMA) == 0.0


def test_uav_sinr_hand_values():
    h = np.array([1.0 + 0j])
    pe = 10.0 ** (-8.1)
    assert np.isclose(uav_sinr_db(h, np.zeros((1, 1)), pe, SIGMA), 20.0)
    f = np.array([[math.sqrt(SIGMA)]])
    assert np.isclose(uav_sinr_db(h, f, pe, SIGMA), 20.0 - 10.0 * math.log10(2.0))
    f3 = np.array([[math.sqrt(4.0119 * SIGMA)]])
    assert np.isclose(uav_sinr_db(h, f3, pe, SIGMA), 13.0, atol=1e-3)


def test_rate_phase_invariance():
    rng = np.random.default_rng(1)
    h = rng.normal(size=4) + 1j * rng.normal(size=4)
    f = 1e-4 * (rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2)))
    g = f * np.exp(1j * np.array([0.3, -1.2]))
    assert np.isclose(
        achievable_rate(h, f, 0, SIGMA), achievable_rate(h, g, 0, SIGMA)
    )
    pe = 1e-8
    assert np.isclose(uav_sinr_db(h, f, pe, SIGMA), uav_sinr_db(h, g, pe, SIGMA))


def test_realization_metrics_identities():
    from jcjbeam.channel import ScenarioConfig, sample_scenario

    sc = sample_scenario(ScenarioConfig(), 2, 0)
    f = 1e-4 * np.ones((16, 4), dtype=complex)
    power = float(np.sum(np.abs(f) ** 2))
    res = realization_metrics(sc, f, sdr_power_mw=power)
    assert res.power_error_mw == 0.0
    assert res.normalized_power_error == 0.0
    res2 = realization_metrics(sc, f, sdr_power_mw=0.5 * power)
    assert np.isclose(res2.normalized_power_error, 0.5)
    assert np.isclose(
        res2.normalized_power_error, res2.power_error_mw / res2.jcj_power_mw,
        rtol=1e-12,
    )


def test_empirical_cdf_example():
    cdf = empirical_cdf([3.0, 1.0, 2.0])
    assert np.allclose(cdf.values, [1.0, 2.0, 3.0])
    assert np.allclose(cdf.probabilities, [1 / 3, 2 / 3, 1.0])
    assert cdf.probabilities[-1] == 1.0
    with pytest.raises(ValueError):
        empirical_cdf([])


def test_percentile_nearest_rank():
    values = list(range(1, 11))
    assert percentile(values, 0.8) == 8.0
    assert percentile(values, 1.0) == 10.0
    assert percentile([5.0, 5.0, 5.0], 0.5) == 5.0
    with pytest.raises(ValueError):
        percentile(values, 0.0)
