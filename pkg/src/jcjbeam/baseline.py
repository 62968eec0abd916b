"""Channel-inversion baseline with per-stream power loading.

F = H^+ Lambda decouples the streams exactly: each UE sees only its own
beam at the power needed for the rate threshold, each UAV receives
exactly the jamming power that pins its SINR to the ceiling.  The price
is the pseudo-inverse's power penalty on ill-conditioned channels and a
hard failure once the stream count exceeds the antenna count.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .channel import Scenario
from .errors import DimensionExceededError, RankDeficientError
from .hermitian import eig_hermitian, hermitize

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class CiBeamformer:
    """Channel-inversion design: beamformer, loading diagonal, total power."""

    f: np.ndarray  # n_tx x n_s
    loading: np.ndarray  # n_s real, sqrt(mW)
    power_mw: float


def pseudo_inverse(h: np.ndarray) -> np.ndarray:
    """Minimum-norm right inverse of a full-row-rank wide matrix.

    Computed as H^H (H H^H)^{-1} with the Gram inverse taken through the
    in-repo eigendecomposition.  Raises DimensionExceededError when there
    are more rows than columns and RankDeficientError when the smallest
    singular value falls at or below 1e-10 times the largest.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {h.shape}")
    rows, cols = h.shape
    if rows > cols:
        raise DimensionExceededError(
            f"{rows} streams exceed {cols} transmit antennas; no right inverse"
        )
    gram = hermitize(h @ h.conj().T)
    eig = eig_hermitian(gram)
    sing = np.sqrt(np.clip(eig.values, 0.0, None))
    if sing[0] == 0.0 or sing[-1] <= RANK_RTOL * sing[0]:
        raise RankDeficientError(
            f"singular values span [{sing[-1]:.3e}, {sing[0]:.3e}]; "
            "channel rows are numerically dependent"
        )
    inv_gram = (eig.vectors / eig.values) @ eig.vectors.conj().T
    return h.conj().T @ inv_gram


def ci_loading(scenario: Scenario) -> np.ndarray:
    """Per-stream amplitude loading (sqrt mW) meeting both thresholds.

    UE n gets sqrt(sigma^2 (2^R_th - 1)); UAV m gets the amplitude whose
    received power pins the SINR to the ceiling.  A UAV whose radicand is
    negative needs no jamming and gets loading 0 with a warning.
    """
    lam = np.zeros(scenario.n_s)
    for n, ue in enumerate(scenario.ues):
        lam[n] = np.sqrt(ue.noise_power_mw * (2.0 ** scenario.r_th[n] - 1.0))
    for m, uav in enumerate(scenario.uavs):
        radicand = (
            uav.eaves_power_mw * 10.0 ** (-scenario.gamma_th_db[m] / 10.0)
            - uav.noise_power_mw
        )
        if radicand < 0.0:
            warnings.warn(
                f"UAV {m}: noise alone keeps the SINR below the ceiling; loading 0",
                stacklevel=2,
            )
            radicand = 0.0
        lam[scenario.n_ue + m] = np.sqrt(radicand)
    return lam


def run_ci(scenario: Scenario) -> CiBeamformer:
    """Channel-inversion beamformer for one scenario."""
    h = scenario.stacked_channel()
    h_pinv = pseudo_inverse(h)
    lam = ci_loading(scenario)
    f = h_pinv * lam
    return CiBeamformer(f=f, loading=lam, power_mw=float(np.sum(np.abs(f) ** 2)))
