"""Performance functionals, BER threshold math, and CDF aggregation.

Rates and SINRs are evaluated directly from a beamformer matrix and a
channel vector, with dB conversions kept at the reporting boundary.  The
error-function machinery is self-contained (series plus continued
fraction) so the BER-to-SINR threshold derivation has no external
dependency to drift against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import Scenario, mw_to_dbm

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def erf(x: float) -> float:
    """Error function via a cancellation-free series and, in the tail, a
    Lentz continued fraction for the complement; absolute error below
    1e-14 on [-6, 6]."""
    x = float(x)
    if x < 0.0:
        return -erf(-x)
    if x == 0.0:
        return 0.0
    if x > 6.0:
        return 1.0
    if x <= 3.0:
        # erf(x) = (2/sqrt(pi)) e^{-x^2} sum_n x^{2n+1} 2^n / (1*3*...*(2n+1))
        term = x
        total = x
        for n in range(1, 200):
            term *= 2.0 * x * x / (2.0 * n + 1.0)
            total += term
            if term < 1e-17 * total:
                break
        return _TWO_OVER_SQRT_PI * math.exp(-x * x) * total
    return 1.0 - erfc(x)


def erfc(x: float) -> float:
    """Complementary error function, accurate in the tail (x >= 3)."""
    x = float(x)
    if x < 3.0:
        return 1.0 - erf(x)
    # Continued fraction sqrt(pi) e^{x^2} erfc(x)
    #   = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + 2/(x + ...)))))
    # evaluated by the modified Lentz algorithm.
    tiny = 1e-300
    c = 1.0 / tiny
    d = 1.0 / x
    h = d
    for i in range(1, 300):
        a = i / 2.0
        d = x + a * d
        if d == 0.0:
            d = tiny
        c = x + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x * x) / math.sqrt(math.pi) * h


def erfinv(y: float) -> float:
    """Inverse error function by bisection refined with Newton steps."""
    y = float(y)
    if not -1.0 < y < 1.0:
        raise ValueError(f"erfinv needs |y| < 1, got {y}")
    if y < 0.0:
        return -erfinv(-y)
    if y == 0.0:
        return 0.0
    lo, hi = 0.0, 7.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if erf(mid) < y:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(4):
        # d/dx erf = 2/sqrt(pi) e^{-x^2}
        x -= (erf(x) - y) / (_TWO_OVER_SQRT_PI * math.exp(-x * x))
    return x


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * erfc(x / math.sqrt(2.0)) if x >= 6.0 else 0.5 - 0.5 * erf(
        x / math.sqrt(2.0)
    )


def q_inverse(p: float) -> float:
    """Inverse of the Gaussian tail probability on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"q_inverse needs p in (0, 1), got {p}")
    return math.sqrt(2.0) * erfinv(1.0 - 2.0 * p)


def sinr_threshold_db(ber: float, modulation_order: int) -> float:
    """Minimum SINR (dB) for a square-QAM symbol error target.

    Inverts ber = 4 Q(sqrt(3 sinr / (K - 1))); rejects targets at or
    above the 4 Q(0) = 2 saturation where the formula has no solution.
    """
    if not 0.0 < ber < 1.0:
        raise ValueError(f"ber must lie in (0, 1), got {ber}")
    k = int(modulation_order)
    if k < 4 or 4 ** int(round(math.log(k, 4))) != k:
        raise ValueError(f"modulation order must be a power of 4 and >= 4, got {k}")
    p = ber / 4.0
    if p >= 0.5:
        raise ValueError(f"ber {ber} is beyond the Q-function saturation point")
    t = q_inverse(p)
    return 10.0 * math.log10(t * t * (k - 1) / 3.0)


def achievable_rate(
    h: np.ndarray,
    f_mat: np.ndarray,
    ue_index: int,
    noise_mw: float,
) -> float:
    """Rate of one UE under a beamformer: log2(1 + signal / (noise + leak))."""
    received = h.conj() @ f_mat
    powers = np.abs(received) ** 2
    signal = powers[ue_index]
    interference = float(np.sum(powers)) - signal
    return float(np.log2(1.0 + signal / (noise_mw + interference)))


def uav_sinr_db(
    h: np.ndarray,
    f_mat: np.ndarray,
    eaves_power_mw: float,
    noise_mw: float,
) -> float:
    """Eavesdropping SINR of one UAV in dB: controller power over jamming
    plus noise."""
    if eaves_power_mw <= 0.0:
        raise ValueError("eavesdropper power must be positive")
    jam = float(np.sum(np.abs(h.conj() @ f_mat) ** 2))
    return 10.0 * math.log10(eaves_power_mw / (jam + noise_mw))


def rate_error(scenario: Scenario, f_mat: np.ndarray) -> float:
    """max_n |achieved rate - threshold| in bit/(s*Hz)."""
    worst = 0.0
    for n, ue in enumerate(scenario.ues):
        r = achievable_rate(scenario.h_ue[:, n], f_mat, n, ue.noise_power_mw)
        worst = max(worst, abs(r - scenario.r_th[n]))
    return worst


def sinr_error_db(scenario: Scenario, f_mat: np.ndarray) -> float:
    """max_m |achieved UAV SINR - ceiling| in dB."""
    worst = 0.0
    for m, uav in enumerate(scenario.uavs):
        g = uav_sinr_db(
            scenario.h_uav[:, m], f_mat, uav.eaves_power_mw, uav.noise_power_mw
        )
        worst = max(worst, abs(g - scenario.gamma_th_db[m]))
    return worst


@dataclass
class RealizationResult:
    """All per-realization metrics; mW internally, dBm via properties."""

    jcj_power_mw: float
    sdr_power_mw: float
    rate_error: float
    sinr_error_db: float
    power_error_mw: float
    normalized_power_error: float
    ci_power_mw: float | None = None
    ci_rate_error: float | None = None
    ci_sinr_error_db: float | None = None
    statuses: dict = field(default_factory=dict)

    @property
    def jcj_power_dbm(self) -> float:
        return mw_to_dbm(self.jcj_power_mw)

    @property
    def ci_power_dbm(self) -> float | None:
        return None if self.ci_power_mw is None else mw_to_dbm(self.ci_power_mw)

    @property
    def power_gain_db(self) -> float | None:
        """CI power minus JCJ power in dB (positive favours the joint scheme)."""
        if self.ci_power_mw is None:
            return None
        return self.ci_power_dbm - self.jcj_power_dbm


def realization_metrics(
    scenario: Scenario,
    jcj_f: np.ndarray,
    sdr_power_mw: float,
    ci_f: np.ndarray | None = None,
    statuses: dict | None = None,
) -> RealizationResult:
    """Bundle the error metrics of one realization.

    ``jcj_f`` / ``ci_f`` are beamformer matrices; the power error compares
    the joint scheme's power against the relaxation optimum."""
    jcj_power = float(np.sum(np.abs(jcj_f) ** 2))
    perr = abs(sdr_power_mw - jcj_power)
    res = RealizationResult(
        jcj_power_mw=jcj_power,
        sdr_power_mw=sdr_power_mw,
        rate_error=rate_error(scenario, jcj_f),
        sinr_error_db=sinr_error_db(scenario, jcj_f),
        power_error_mw=perr,
        normalized_power_error=perr / jcj_power,
        statuses=dict(statuses or {}),
    )
    if ci_f is not None:
        res.ci_power_mw = float(np.sum(np.abs(ci_f) ** 2))
        res.ci_rate_error = rate_error(scenario, ci_f)
        res.ci_sinr_error_db = sinr_error_db(scenario, ci_f)
    return res


@dataclass(frozen=True)
class CdfSeries:
    """Sorted sample values with cumulative probabilities k/N."""

    values: np.ndarray
    probabilities: np.ndarray


def empirical_cdf(values) -> CdfSeries:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empirical_cdf needs at least one value")
    order = np.sort(values)
    probs = np.arange(1, values.size + 1) / values.size
    return CdfSeries(values=order, probabilities=probs)


def percentile(values, q: float) -> float:
    """Nearest-rank percentile: smallest sample with CDF >= q."""
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    ordered = np.sort(np.asarray(values, dtype=float))
    if ordered.size == 0:
        raise ValueError("percentile needs at least one value")
    rank = max(1, math.ceil(q * ordered.size))
    return float(ordered[rank - 1])
