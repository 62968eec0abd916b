"""Array geometry, channel synthesis and random scenario sampling.

The propagation model is a single-path line-of-sight link from a uniform
linear array: h(r, theta) = alpha(r) * b(theta) with unit-modulus steering
entries and a 1/r large-scale gain carrying a uniformly random phase.
Powers are milliwatts everywhere inside the library; dBm appears only at
configuration and reporting boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SeparationError

SPEED_OF_LIGHT = 299_792_458.0  # m/s

UE = "UE"
UAV = "UAV"


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    if mw <= 0.0:
        return -np.inf
    return 10.0 * np.log10(mw)


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array at half-wavelength spacing."""

    n_tx: int
    carrier_freq_hz: float
    tx_gain: float = 1.0
    rx_gain: float = 1.0

    def __post_init__(self):
        if self.n_tx < 1:
            raise ValueError(f"n_tx must be >= 1, got {self.n_tx}")
        if self.carrier_freq_hz <= 0:
            raise ValueError("carrier frequency must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq_hz

    @property
    def spacing_m(self) -> float:
        return 0.5 * self.wavelength_m


@dataclass(frozen=True)
class Terminal:
    """One single-antenna terminal: a served UE or an unauthorized UAV."""

    kind: str
    range_m: float
    aod_deg: float
    phase_rad: float
    noise_power_mw: float
    eaves_power_mw: float | None = None  # controller power seen by a UAV

    def __post_init__(self):
        if self.kind not in (UE, UAV):
            raise ValueError(f"kind must be {UE!r} or {UAV!r}")
        if self.range_m <= 0:
            raise ValueError("range must be positive")
        if not -90.0 <= self.aod_deg <= 90.0:
            raise ValueError(f"AoD {self.aod_deg} outside [-90, 90] degrees")
        if not 0.0 <= self.phase_rad < 2.0 * np.pi:
            raise ValueError("phase must lie in [0, 2*pi)")
        if self.kind == UAV and self.eaves_power_mw is None:
            raise ValueError("UAV terminals need an eavesdropper power")


def steering(geometry: ArrayGeometry, aod_deg: float) -> np.ndarray:
    """Steering vector of the ULA for a departure angle in degrees.

    Element k is exp(-j * 2*pi * k * d/lambda * sin(theta)); with d =
    lambda/2 that is exp(-j * pi * k * sin(theta)).
    """
    if not -90.0 <= aod_deg <= 90.0:
        raise ValueError(f"AoD {aod_deg} outside [-90, 90] degrees")
    k = np.arange(geometry.n_tx)
    phase = -2.0 * np.pi * (geometry.spacing_m / geometry.wavelength_m) * k
    return np.exp(1j * phase * np.sin(np.deg2rad(aod_deg)))


def path_gain(geometry: ArrayGeometry, range_m: float, phase_rad: float) -> complex:
    """Large-scale fading coefficient e^{j xi} sqrt(Gtx Grx lambda^2) / (4 pi r)."""
    if range_m <= 0:
        raise ValueError("range must be positive")
    lam = geometry.wavelength_m
    mag = np.sqrt(geometry.tx_gain * geometry.rx_gain * lam**2) / (4.0 * np.pi * range_m)
    return complex(mag * np.exp(1j * phase_rad))


def channel_vector(geometry: ArrayGeometry, terminal: Terminal) -> np.ndarray:
    return path_gain(geometry, terminal.range_m, terminal.phase_rad) * steering(
        geometry, terminal.aod_deg
    )


@dataclass(frozen=True)
class Scenario:
    """A sampled drop: terminals, channels and per-terminal thresholds.

    ``h_ue`` / ``h_uav`` hold channel columns (n_tx x count).  ``r_th`` is
    the per-UE rate threshold in bit/(s*Hz), ``gamma_th_db`` the per-UAV
    SINR ceiling in dB.
    """

    geometry: ArrayGeometry
    ues: tuple
    uavs: tuple
    h_ue: np.ndarray
    h_uav: np.ndarray
    r_th: tuple
    gamma_th_db: tuple

    @property
    def n_ue(self) -> int:
        return len(self.ues)

    @property
    def n_uav(self) -> int:
        return len(self.uavs)

    @property
    def n_s(self) -> int:
        return self.n_ue + self.n_uav

    @property
    def n_tx(self) -> int:
        return self.geometry.n_tx

    def stacked_channel(self) -> np.ndarray:
        """H = [H_ue H_uav]^H: rows are conjugated channels, N_s x N_tx."""
        cols = np.hstack([self.h_ue, self.h_uav])
        return cols.conj().T


def make_scenario(geometry, ues, uavs, r_th, gamma_th_db) -> Scenario:
    """Assemble channels from terminal geometry and wrap into a Scenario."""
    h_ue = np.column_stack([channel_vector(geometry, t) for t in ues]) if ues else np.zeros(
        (geometry.n_tx, 0), dtype=complex
    )
    h_uav = np.column_stack([channel_vector(geometry, t) for t in uavs]) if uavs else np.zeros(
        (geometry.n_tx, 0), dtype=complex
    )
    r_th = tuple(float(x) for x in np.broadcast_to(r_th, (len(ues),)))
    gamma_th_db = tuple(float(x) for x in np.broadcast_to(gamma_th_db, (len(uavs),)))
    return Scenario(
        geometry=geometry,
        ues=tuple(ues),
        uavs=tuple(uavs),
        h_ue=h_ue,
        h_uav=h_uav,
        r_th=r_th,
        gamma_th_db=gamma_th_db,
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Sampling distribution parameters for random drops (Table-style defaults:
    6 GHz carrier, 20 MHz band, -101 dBm noise, -81 dBm controller power)."""

    n_tx: int = 16
    n_ue: int = 2
    n_uav: int = 2
    carrier_freq_hz: float = 6.0e9
    bandwidth_hz: float = 20.0e6
    r_th: float = 7.0
    gamma_th_db: float = 13.0
    noise_power_dbm: float = -101.0
    eaves_power_dbm: float = -81.0
    range_bounds_m: tuple = (50.0, 100.0)
    aod_bounds_deg: tuple = (-60.0, 60.0)
    min_ue_separation_deg: float = 5.0
    min_ue_uav_separation_deg: float = 0.0
    tx_gain: float = 1.0
    rx_gain: float = 1.0

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(
            n_tx=self.n_tx,
            carrier_freq_hz=self.carrier_freq_hz,
            tx_gain=self.tx_gain,
            rx_gain=self.rx_gain,
        )


_MAX_ATTEMPTS = 10_000


def _sample_separated(rng, count, bounds, min_gap, fixed=()):
    """Draw ``count`` angles, rejecting sets closer than ``min_gap`` to each
    other or to the ``fixed`` angles. Raises after the attempt cap."""
    lo, hi = bounds
    fixed = np.asarray(fixed, dtype=float)
    for _ in range(_MAX_ATTEMPTS):
        draw = rng.uniform(lo, hi, size=count)
        ok = True
        if count > 1 and min_gap > 0:
            diffs = np.abs(draw[:, None] - draw[None, :])
            np.fill_diagonal(diffs, np.inf)
            ok = diffs.min() >= min_gap
        if ok and fixed.size and min_gap > 0:
            ok = np.abs(draw[:, None] - fixed[None, :]).min() >= min_gap
        if ok:
            return draw
    raise SeparationError(
        f"could not draw {count} angles with separation {min_gap} deg "
        f"within {_MAX_ATTEMPTS} attempts"
    )


def scenario_rng(master_seed: int, realization: int = 0) -> np.random.Generator:
    """Counter-style generator keyed by (master seed, realization index), so
    parallel realizations reproduce serial runs."""
    return np.random.Generator(np.random.Philox(key=np.uint64([master_seed, realization])))


def sample_scenario(
    config: ScenarioConfig,
    master_seed: int,
    realization: int = 0,
) -> Scenario:
    """Draw one random scenario; deterministic given (config, seed, index)."""
    rng = scenario_rng(master_seed, realization)
    geom = config.geometry()
    noise_mw = dbm_to_mw(config.noise_power_dbm)
    eaves_mw = dbm_to_mw(config.eaves_power_dbm)

    ue_aod = _sample_separated(
        rng, config.n_ue, config.aod_bounds_deg, config.min_ue_separation_deg
    )
    uav_aod = _sample_separated(
        rng,
        config.n_uav,
        config.aod_bounds_deg,
        config.min_ue_uav_separation_deg,
        fixed=ue_aod,
    )
    lo, hi = config.range_bounds_m
    ue_range = rng.uniform(lo, hi, size=config.n_ue)
    uav_range = rng.uniform(lo, hi, size=config.n_uav)
    ue_phase = rng.uniform(0.0, 2.0 * np.pi, size=config.n_ue)
    uav_phase = rng.uniform(0.0, 2.0 * np.pi, size=config.n_uav)

    ues = [
        Terminal(UE, ue_range[i], ue_aod[i], ue_phase[i], noise_mw)
        for i in range(config.n_ue)
    ]
    uavs = [
        Terminal(UAV, uav_range[i], uav_aod[i], uav_phase[i], noise_mw, eaves_mw)
        for i in range(config.n_uav)
    ]
    return make_scenario(geom, ues, uavs, config.r_th, config.gamma_th_db)
