"""Monte-Carlo orchestration, persistence and figure emission.

A run is a grid of (sweep value, realization index) cells.  Each cell is
a pure function of the configuration and its indices: the scenario
generator is keyed per realization, so serial and parallel executions
produce identical tables, and reruns are byte-identical.  Outputs are a
versioned results CSV, per-metric CDF CSVs, SVG CDF plots, and a flat
manifest carrying the configuration hash.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .baseline import run_ci
from .channel import ScenarioConfig, mw_to_dbm, sample_scenario
from .errors import ConfigError, JcjBeamError
from .jcj import DEFAULT_PHI, EtaSweep, run_jamming_only, run_jcj
from .metrics import empirical_cdf, realization_metrics
from .sdp import lower_bound_power

RESULTS_VERSION = "jcjbeam results v1"
CDF_VERSION = "jcjbeam cdf v1"

SWEEP_AXES = ("n_tx", "n_ue", "n_uav", "r_th", "gamma_th_db")
SCHEMES = ("jcj", "ci")

_CDF_METRICS = (
    "power_error_mw",
    "normalized_power_error",
    "rate_error",
    "sinr_error_db",
    "power_gain_db",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte-Carlo run.

    Scalar channel parameters mirror the scenario sampler; ``sweep_axis``
    (one of n_tx, n_ue, n_uav, r_th, gamma_th_db) replaces that field per
    sweep value.  ``sweep_values=()`` means a single cell at defaults.
    """

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
    phi: tuple = DEFAULT_PHI
    realizations: int = 200
    master_seed: int = 0
    schemes: tuple = SCHEMES
    sweep_axis: str | None = None
    sweep_values: tuple = ()
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(v) for v in self.phi))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        object.__setattr__(self, "range_bounds_m", tuple(self.range_bounds_m))
        object.__setattr__(self, "aod_bounds_deg", tuple(self.aod_bounds_deg))
        if self.realizations < 1:
            raise ConfigError(f"realizations must be >= 1, got {self.realizations}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.sweep_axis is not None:
            if self.sweep_axis not in SWEEP_AXES:
                raise ConfigError(
                    f"sweep_axis {self.sweep_axis!r} not in {SWEEP_AXES}"
                )
            if not self.sweep_values:
                raise ConfigError("sweep_values must be nonempty when sweeping")
        unknown = set(self.schemes) - set(SCHEMES)
        if not self.schemes or unknown:
            raise ConfigError(
                f"schemes must be a nonempty subset of {SCHEMES}, got {self.schemes}"
            )
        try:
            EtaSweep(self.phi)
        except ValueError as exc:
            raise ConfigError(f"phi: {exc}") from exc

    def sweep_points(self) -> tuple:
        """The swept values, or (None,) for a plain run at defaults."""
        return self.sweep_values if self.sweep_axis else (None,)

    def scenario_config(self, sweep_value=None) -> ScenarioConfig:
        fields = dict(
            n_tx=self.n_tx,
            n_ue=self.n_ue,
            n_uav=self.n_uav,
            carrier_freq_hz=self.carrier_freq_hz,
            bandwidth_hz=self.bandwidth_hz,
            r_th=self.r_th,
            gamma_th_db=self.gamma_th_db,
            noise_power_dbm=self.noise_power_dbm,
            eaves_power_dbm=self.eaves_power_dbm,
            range_bounds_m=self.range_bounds_m,
            aod_bounds_deg=self.aod_bounds_deg,
            min_ue_separation_deg=self.min_ue_separation_deg,
        )
        if self.sweep_axis is not None and sweep_value is not None:
            caster = int if self.sweep_axis.startswith("n_") else float
            fields[self.sweep_axis] = caster(sweep_value)
        return ScenarioConfig(**fields)

    def config_hash(self) -> str:
        """sha256 over the sorted field=value lines; stable across runs."""
        lines = sorted(
            f"{k}={v!r}" for k, v in dataclasses.asdict(self).items()
        )
        return hashlib.sha256("\n".join(lines).encode()).hexdigest()


def load_config(path: str, **overrides) -> ExperimentConfig:
    """Read a TOML config file; keyword overrides win over file values.

    Unknown keys are rejected with their names so typos surface early.
    """
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    data.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_mapping(data)


def config_from_mapping(data: dict) -> ExperimentConfig:
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return ExperimentConfig(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class ResultRow:
    """One (sweep value, realization) cell; nan marks absent metrics."""

    sweep_value: float | None
    realization: int
    jcj_status: str = ""
    ci_status: str = ""
    chosen_eta: float = math.nan
    jcj_power_mw: float = math.nan
    sdr_power_mw: float = math.nan
    power_error_mw: float = math.nan
    normalized_power_error: float = math.nan
    rate_error: float = math.nan
    sinr_error_db: float = math.nan
    ci_power_mw: float = math.nan
    ci_rate_error: float = math.nan
    ci_sinr_error_db: float = math.nan
    power_gain_db: float = math.nan
    note: str = ""
    jcj_f: np.ndarray | None = None
    ci_f: np.ndarray | None = None

    @property
    def jcj_power_dbm(self) -> float:
        return mw_to_dbm(self.jcj_power_mw) if self.jcj_power_mw > 0 else math.nan

    @property
    def sdr_power_dbm(self) -> float:
        return mw_to_dbm(self.sdr_power_mw) if self.sdr_power_mw > 0 else math.nan

    @property
    def ci_power_dbm(self) -> float:
        return mw_to_dbm(self.ci_power_mw) if self.ci_power_mw > 0 else math.nan

    @property
    def jcj_ok(self) -> bool:
        return self.jcj_status == "ok"

    @property
    def ci_ok(self) -> bool:
        return self.ci_status == "ok"


@dataclass
class ResultTable:
    config: ExperimentConfig
    rows: list

    def column(self, name: str, require_jcj: bool = True) -> np.ndarray:
        """Values of one metric over rows where the producing scheme ran."""
        out = []
        for row in self.rows:
            v = getattr(row, name)
            needs_ci = name.startswith("ci_") or name == "power_gain_db"
            if needs_ci and not row.ci_ok:
                continue
            if require_jcj and not needs_ci and not row.jcj_ok:
                continue
            if not math.isnan(v):
                out.append(v)
        return np.array(out)

    @property
    def all_failed(self) -> bool:
        return all(not row.jcj_ok and not row.ci_ok for row in self.rows)


def _run_cell(config: ExperimentConfig, sweep_value, realization: int) -> ResultRow:
    """Run every requested scheme on one sampled realization."""
    row = ResultRow(sweep_value=sweep_value, realization=realization)
    sc_cfg = config.scenario_config(sweep_value)
    try:
        scenario = sample_scenario(sc_cfg, config.master_seed, realization)
    except JcjBeamError as exc:
        row.jcj_status = row.ci_status = type(exc).__name__
        row.note = str(exc)
        return row

    ci_f = None
    if "ci" in config.schemes:
        try:
            ci = run_ci(scenario)
            ci_f = ci.f
            row.ci_status = "ok"
        except JcjBeamError as exc:
            row.ci_status = type(exc).__name__

    if "jcj" in config.schemes:
        try:
            if scenario.n_ue == 0:
                bf = run_jamming_only(scenario)
                sdr_power = bf.power_mw
            else:
                bf = run_jcj(scenario, sweep=EtaSweep(config.phi))
                try:
                    sdr_power = lower_bound_power(scenario)
                except JcjBeamError:
                    # The reference relaxation can fail where the
                    # inequality fallback still delivered a design;
                    # power-error metrics stay blank for the row.
                    sdr_power = float("nan")
            res = realization_metrics(scenario, bf.f, sdr_power, ci_f=ci_f)
            row.jcj_status = "ok"
            row.chosen_eta = bf.chosen_eta if bf.chosen_eta is not None else 0.0
            row.jcj_power_mw = res.jcj_power_mw
            row.sdr_power_mw = res.sdr_power_mw
            row.power_error_mw = res.power_error_mw
            row.normalized_power_error = res.normalized_power_error
            row.rate_error = res.rate_error
            row.sinr_error_db = res.sinr_error_db
            row.jcj_f = bf.f
        except JcjBeamError as exc:
            row.jcj_status = type(exc).__name__
            row.note = str(exc)[:200]

    if ci_f is not None:
        row.ci_f = ci_f
        row.ci_power_mw = float(np.sum(np.abs(ci_f) ** 2))
        from .metrics import rate_error, sinr_error_db

        row.ci_rate_error = rate_error(scenario, ci_f)
        row.ci_sinr_error_db = sinr_error_db(scenario, ci_f)
        if row.jcj_ok:
            row.power_gain_db = row.ci_power_dbm - row.jcj_power_dbm
    return row


def _cell_args(config: ExperimentConfig):
    for value in config.sweep_points():
        for r in range(config.realizations):
            yield (config, value, r)


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """Execute the full grid; per-cell failures are recorded, never raised.

    With ``workers > 1`` cells run in a process pool; assembly restores
    grid order, so the table is identical to a serial run.
    """
    args = list(_cell_args(config))
    if config.workers == 1:
        rows = [_run_cell(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_cell, *zip(*args), chunksize=1))
    return ResultTable(config=config, rows=rows)


def spot_check(table: ResultTable, atol: float = 1e-9) -> bool:
    """Recompute stored rate/SINR errors from the retained beamformers."""
    from .metrics import rate_error, sinr_error_db

    for row in table.rows:
        if row.jcj_f is None:
            continue
        scenario = sample_scenario(
            table.config.scenario_config(row.sweep_value),
            table.config.master_seed,
            row.realization,
        )
        if abs(rate_error(scenario, row.jcj_f) - row.rate_error) > atol:
            return False
        if abs(sinr_error_db(scenario, row.jcj_f) - row.sinr_error_db) > atol:
            return False
    return True


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    v = float(value)
    return "" if math.isnan(v) else repr(v)


_RESULT_COLUMNS = (
    "sweep_axis",
    "sweep_value",
    "realization",
    "jcj_status",
    "ci_status",
    "chosen_eta",
    "jcj_power_mw",
    "jcj_power_dbm",
    "sdr_power_mw",
    "sdr_power_dbm",
    "power_error_mw",
    "normalized_power_error",
    "rate_error",
    "sinr_error_db",
    "ci_power_mw",
    "ci_power_dbm",
    "ci_rate_error",
    "ci_sinr_error_db",
    "power_gain_db",
    "note",
)


def write_results_csv(table: ResultTable, path: str) -> None:
    lines = [f"# {RESULTS_VERSION}", ",".join(_RESULT_COLUMNS)]
    axis = table.config.sweep_axis or ""
    for row in table.rows:
        cells = [
            axis,
            _fmt(row.sweep_value),
            str(row.realization),
            row.jcj_status,
            row.ci_status,
            _fmt(row.chosen_eta),
            _fmt(row.jcj_power_mw),
            _fmt(row.jcj_power_dbm),
            _fmt(row.sdr_power_mw),
            _fmt(row.sdr_power_dbm),
            _fmt(row.power_error_mw),
            _fmt(row.normalized_power_error),
            _fmt(row.rate_error),
            _fmt(row.sinr_error_db),
            _fmt(row.ci_power_mw),
            _fmt(row.ci_power_dbm),
            _fmt(row.ci_rate_error),
            _fmt(row.ci_sinr_error_db),
            _fmt(row.power_gain_db),
            row.note.replace(",", ";").replace("\n", " "),
        ]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_cdf_csv(values: np.ndarray, path: str) -> None:
    cdf = empirical_cdf(values)
    lines = [f"# {CDF_VERSION}", "value,probability"]
    lines += [
        f"{_fmt(v)},{_fmt(p)}" for v, p in zip(cdf.values, cdf.probabilities)
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _plot_cdf(values: np.ndarray, metric: str, path: str) -> None:
    import matplotlib

    matplotlib.use("svg", force=True)
    matplotlib.rcParams["svg.hashsalt"] = "jcjbeam"
    import matplotlib.pyplot as plt

    cdf = empirical_cdf(values)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.step(cdf.values, cdf.probabilities, where="post")
    ax.set_xlabel(metric.replace("_", " "))
    ax.set_ylabel("CDF")
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def write_manifest(table: ResultTable, path: str) -> None:
    cfg = table.config
    lines = [
        f"config_hash={cfg.config_hash()}",
        f"master_seed={cfg.master_seed}",
        f"realizations={cfg.realizations}",
        f"sweep_axis={cfg.sweep_axis or ''}",
        f"sweep_values={','.join(_fmt(v) for v in cfg.sweep_values)}",
        f"schemes={','.join(cfg.schemes)}",
        f"rows={len(table.rows)}",
        f"results_version={RESULTS_VERSION}",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_outputs(table: ResultTable, output_dir: str | None = None) -> dict:
    """Write all run artifacts; returns {name: path} of what was written."""
    if not table.rows:
        raise ValueError("emit_outputs needs a nonempty table")
    out = output_dir or table.config.output_dir
    os.makedirs(out, exist_ok=True)
    written = {}

    path = os.path.join(out, "results.csv")
    write_results_csv(table, path)
    written["results"] = path

    for metric in _CDF_METRICS:
        values = table.column(metric)
        if values.size == 0:
            continue
        cdf_path = os.path.join(out, f"cdf_{metric}.csv")
        write_cdf_csv(values, cdf_path)
        written[f"cdf_{metric}"] = cdf_path
        svg_path = os.path.join(out, f"cdf_{metric}.svg")
        _plot_cdf(values, metric, svg_path)
        written[f"plot_{metric}"] = svg_path

    manifest = os.path.join(out, "manifest.txt")
    write_manifest(table, manifest)
    written["manifest"] = manifest
    return written
