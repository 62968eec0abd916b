"""Unit tests for the Monte-Carlo harness and artifact emission."""

import math
import os

import numpy as np
import pytest

from jcjbeam.errors import ConfigError
from jcjbeam.experiment import (
    ExperimentConfig,
    config_from_mapping,
    emit_outputs,
    load_config,
    run_experiment,
    spot_check,
    write_results_csv,
)

TINY = dict(n_tx=4, n_ue=1, n_uav=1, phi=(0.1, 0.3), realizations=2, master_seed=7)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(realizations=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(sweep_axis="bandwidth_hz", sweep_values=(1.0,))
    with pytest.raises(ConfigError):
        ExperimentConfig(sweep_axis="n_tx")  # no values
    with pytest.raises(ConfigError):
        ExperimentConfig(schemes=("jcj", "zf"))
    with pytest.raises(ConfigError):
        ExperimentConfig(phi=(0.5, 0.2))
    with pytest.raises(ConfigError):
        config_from_mapping({"n_tx": 8, "antennas": 8})


def test_load_config_and_override(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text("n_tx = 8\nrealizations = 5\nmaster_seed = 3\n")
    cfg = load_config(str(path))
    assert cfg.n_tx == 8 and cfg.realizations == 5 and cfg.master_seed == 3
    cfg2 = load_config(str(path), realizations=9)
    assert cfg2.realizations == 9  # flag overrides file
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.toml"))
    bad = tmp_path / "bad.toml"
    bad.write_text("n_tx = [unclosed")
    with pytest.raises(ConfigError):
        load_config(str(bad))


def test_config_hash_changes_iff_config_changes():
    a = ExperimentConfig(**TINY)
    b = ExperimentConfig(**TINY)
    c = ExperimentConfig(**{**TINY, "master_seed": 8})
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()


def test_run_shape_and_population():
    table = run_experiment(ExperimentConfig(**TINY))
    assert len(table.rows) == 2
    for row in table.rows:
        assert row.jcj_status and row.ci_status
        if row.jcj_ok:
            assert row.jcj_power_mw > 0 and not math.isnan(row.sdr_power_mw)
        if row.ci_ok and row.jcj_ok:
            assert not math.isnan(row.power_gain_db)


def test_sweep_row_count():
    cfg = ExperimentConfig(
        **{**TINY, "sweep_axis": "n_tx", "sweep_values": (4, 8)}
    )
    table = run_experiment(cfg)
    assert len(table.rows) == 4
    assert [r.sweep_value for r in table.rows] == [4, 4, 8, 8]


def test_parallel_matches_serial(tmp_path):
    serial = run_experiment(ExperimentConfig(**TINY, workers=1))
    parallel = run_experiment(ExperimentConfig(**TINY, workers=2))
    p1 = tmp_path / "serial.csv"
    p2 = tmp_path / "parallel.csv"
    write_results_csv(serial, str(p1))
    write_results_csv(parallel, str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_rerun_byte_identical(tmp_path):
    cfg = ExperimentConfig(**TINY)
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    emit_outputs(run_experiment(cfg), str(out1))
    emit_outputs(run_experiment(cfg), str(out2))
    for name in sorted(os.listdir(out1)):
        if name.endswith(".csv") or name.endswith(".txt"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_spot_check_consistency():
    table = run_experiment(ExperimentConfig(**TINY))
    assert spot_check(table)


def test_emit_outputs_artifacts(tmp_path):
    table = run_experiment(ExperimentConfig(**TINY))
    written = emit_outputs(table, str(tmp_path / "out"))
    results = written["results"]
    with open(results, encoding="utf-8") as fh:
        first = fh.readline().strip()
        header = fh.readline().strip()
    assert first == "# jcjbeam results v1"
    assert header.startswith("sweep_axis,sweep_value,realization")
    cdf_path = written["cdf_rate_error"]
    with open(cdf_path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    assert lines[1] == "value,probability"
    assert lines[-1].endswith(",1.0")
    values = [float(ln.split(",")[0]) for ln in lines[2:]]
    assert values == sorted(values)
    svg = written["plot_rate_error"]
    with open(svg, encoding="utf-8") as fh:
        assert "<svg" in fh.read(400)
    with open(written["manifest"], encoding="utf-8") as fh:
        manifest = dict(ln.strip().split("=", 1) for ln in fh)
    assert manifest["config_hash"] == table.config.config_hash()
    assert manifest["rows"] == "2"


def test_power_gain_column_definition():
    table = run_experiment(ExperimentConfig(**TINY))
    for row in table.rows:
        if row.jcj_ok and row.ci_ok:
            assert np.isclose(
                row.power_gain_db, row.ci_power_dbm - row.jcj_power_dbm
            )
