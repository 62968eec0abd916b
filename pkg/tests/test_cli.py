"""Unit tests for the command-line interface and its exit codes."""

import os

from jcjbeam.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    _parse_sweep,
    main,
)

TINY_ARGS = [
    "--realizations", "2", "--seed", "7",
]


def _tiny_config(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(
        "n_tx = 4\nn_ue = 1\nn_uav = 1\nphi = [0.1, 0.3]\n"
    )
    return str(path)


def test_parse_sweep():
    axis, values = _parse_sweep("n_tx=8,16")
    assert axis == "n_tx" and values == (8.0, 16.0)


def test_run_success(tmp_path):
    out = str(tmp_path / "out")
    code = main(
        ["run", "--config", _tiny_config(tmp_path), "--out", out] + TINY_ARGS
    )
    assert code == EXIT_OK
    assert os.path.exists(os.path.join(out, "results.csv"))
    assert os.path.exists(os.path.join(out, "manifest.txt"))


def test_run_missing_config_is_config_error(tmp_path):
    code = main(["run", "--config", str(tmp_path / "nope.toml")])
    assert code == EXIT_CONFIG


def test_bad_sweep_is_config_error(tmp_path):
    code = main(
        ["run", "--config", _tiny_config(tmp_path), "--sweep", "bandwidth=1"]
    )
    assert code == EXIT_CONFIG


def test_unknown_flag_is_config_error():
    assert main(["run", "--frobnicate"]) == EXIT_CONFIG


def test_solve_prints_diagnostics(tmp_path, capsys):
    code = main(
        ["solve", "--config", _tiny_config(tmp_path), "--seed", "7", "--verbose"]
    )
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "chosen eta" in out and "transmit power" in out
    assert "per-eta scores" in out


def test_check_subcommand(capsys):
    code = main(["check", "--vectors", "50"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "pass" in out


def test_oracle_subcommand(capsys):
    code = main(["oracle", "--count", "2", "--seed", "11"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "sandwich" in out
