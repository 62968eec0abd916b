"""Unit tests for the eta sweep, extraction and candidate selection."""

import numpy as np
import pytest

from jcjbeam.channel import ScenarioConfig, sample_scenario
from jcjbeam.errors import SolverStatusError
from jcjbeam.jcj import (
    DEFAULT_PHI,
    EtaSweep,
    extract_candidate,
    run_jamming_only,
    run_jcj,
    score_candidate,
)
from jcjbeam.metrics import achievable_rate, uav_sinr_db
from jcjbeam.problem import build_problem
from jcjbeam.sdp import SdpSolution, SdpStatus, lower_bound_power


def _fake_solution(x):
    return SdpSolution(
        x=np.asarray(x, dtype=complex),
        status=SdpStatus.OPTIMAL,
        primal_obj=float(np.trace(x).real),
        dual_obj=float(np.trace(x).real),
        residuals={},
        iterations=1,
    )


def test_eta_sweep_validation():
    assert EtaSweep().phi == DEFAULT_PHI
    with pytest.raises(ValueError):
        EtaSweep(())
    with pytest.raises(ValueError):
        EtaSweep((0.0, 0.5))
    with pytest.raises(ValueError):
        EtaSweep((0.5, 0.2))


def test_extract_exact_rank_one():
    rng = np.random.default_rng(0)
    f = rng.normal(size=8) + 1j * rng.normal(size=8)
    cand = extract_candidate(
        _fake_solution(np.outer(f, f.conj())), n_tx=4, n_ue=2, n_uav=1
    )
    # recovered up to global phase; compare outer products
    assert np.allclose(
        np.outer(cand.f_hat, cand.f_hat.conj()), np.outer(f, f.conj()), atol=1e-9
    )
    assert np.isclose(cand.rank1_ratio, 1.0, atol=1e-9)
    assert cand.f_mat.shape == (4, 3)
    assert np.allclose(cand.f_mat[:, 2], 0.0)  # jamming column zero-padded
    assert np.allclose(cand.f_mat[:, 0], cand.f_hat[:4])
    assert np.allclose(cand.f_mat[:, 1], cand.f_hat[4:])


def test_extract_dominant_eigenpair():
    cand = extract_candidate(
        _fake_solution(np.diag([2.0, 1.0])), n_tx=1, n_ue=2, n_uav=0
    )
    assert np.allclose(np.abs(cand.f_hat), [np.sqrt(2.0), 0.0])
    assert np.isclose(cand.rank1_ratio, 2.0 / 3.0)


def test_extract_requires_optimal_status():
    sol = _fake_solution(np.eye(2))
    sol.status = SdpStatus.MAX_ITER
    with pytest.raises(SolverStatusError):
        extract_candidate(sol, n_tx=1, n_ue=2, n_uav=0)


def test_score_zero_candidate_and_phase_invariance():
    sc = sample_scenario(ScenarioConfig(n_tx=4), 1, 0)
    prob = build_problem(sc)
    cand = extract_candidate(
        _fake_solution(1e-30 * np.eye(prob.dim)), n_tx=4, n_ue=2, n_uav=2
    )
    # near-zero candidate misses every threshold entirely (relative error 1)
    assert np.isclose(score_candidate(cand, prob), 1.0, atol=1e-6)
    rng = np.random.default_rng(2)
    f = rng.normal(size=prob.dim) + 1j * rng.normal(size=prob.dim)
    c1 = extract_candidate(_fake_solution(np.outer(f, f.conj())), 4, 2, 2)
    g = f * np.exp(1j * 0.7)
    c2 = extract_candidate(_fake_solution(np.outer(g, g.conj())), 4, 2, 2)
    assert np.isclose(score_candidate(c1, prob), score_candidate(c2, prob), rtol=1e-9)


def test_absolute_error_flag():
    sc = sample_scenario(ScenarioConfig(n_tx=4), 1, 0)
    prob = build_problem(sc)
    cand = extract_candidate(
        _fake_solution(1e-30 * np.eye(prob.dim)), n_tx=4, n_ue=2, n_uav=2
    )
    gammas = [abs(g) for _, g in list(prob.a1) + list(prob.a2)]
    assert np.isclose(
        score_candidate(cand, prob, relative=False), max(gammas), rtol=1e-6
    )


def test_single_user_recovers_matched_filter():
    sc = sample_scenario(ScenarioConfig(n_ue=1, n_uav=0), 5, 1)
    h = sc.h_ue[:, 0]
    closed = sc.ues[0].noise_power_mw * (2.0 ** sc.r_th[0] - 1.0) / float(
        np.vdot(h, h).real
    )
    bf = run_jcj(sc)
    assert abs(bf.power_mw - closed) / closed < 0.01
    assert bf.chosen_eta is None  # plain relaxation already rank 1


def test_run_jcj_output_contract():
    sc = sample_scenario(ScenarioConfig(), 4, 1)
    bf = run_jcj(sc)
    assert bf.f.shape == (16, 4)
    assert np.allclose(bf.f[:, 2:], 0.0)  # reduction zeroes jamming columns
    assert np.isclose(bf.power_mw, np.sum(np.abs(bf.f) ** 2), rtol=1e-9)
    bound = lower_bound_power(sc)
    # slack covers the interior-point bound's own gap tolerance
    assert bf.power_mw >= bound - 1e-7 * (1.0 + bound)
    attempted = [e for e, _, _ in bf.per_eta_errors]
    assert attempted == [None] + list(DEFAULT_PHI)
    # feasibility of the delivered beamformer
    for n in range(sc.n_ue):
        rate = achievable_rate(sc.h_ue[:, n], bf.f, n, sc.ues[n].noise_power_mw)
        assert rate >= sc.r_th[n] - 0.05
    for m in range(sc.n_uav):
        g = uav_sinr_db(
            sc.h_uav[:, m], bf.f, sc.uavs[m].eaves_power_mw,
            sc.uavs[m].noise_power_mw,
        )
        assert g <= sc.gamma_th_db[m] + 0.1


def test_run_jcj_requires_ue():
    sc = sample_scenario(ScenarioConfig(n_ue=0, n_uav=1, min_ue_separation_deg=0), 1, 0)
    with pytest.raises(ValueError):
        run_jcj(sc)


def test_jamming_only_single_uav_closed_form():
    sc = sample_scenario(ScenarioConfig(n_ue=0, n_uav=1), 8, 0)
    bf = run_jamming_only(sc)
    h = sc.h_uav[:, 0]
    uav = sc.uavs[0]
    gamma2 = uav.eaves_power_mw * 10.0 ** (-sc.gamma_th_db[0] / 10.0) - uav.noise_power_mw
    assert np.isclose(bf.power_mw, gamma2 / float(np.vdot(h, h).real), rtol=1e-6)
    assert bf.f.shape == (16, 1)


def test_jamming_only_empty_scenario():
    sc = sample_scenario(ScenarioConfig(n_ue=0, n_uav=0), 8, 0)
    bf = run_jamming_only(sc)
    assert bf.power_mw == 0.0


def test_jamming_only_rejects_ues():
    sc = sample_scenario(ScenarioConfig(), 8, 0)
    with pytest.raises(ValueError):
        run_jamming_only(sc)
