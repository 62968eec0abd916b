"""Command-line front end.

Subcommands: ``run`` executes a Monte-Carlo experiment and writes the
artifact set, ``solve`` reports one scenario's beamformer in detail,
``check`` replays the structural property suites, ``oracle`` compares
the pipeline against the brute-force reference on tiny instances.
Exit codes: 0 success, 1 configuration error, 2 runtime failure,
3 every cell of a batch infeasible.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .channel import ScenarioConfig, mw_to_dbm, sample_scenario
from .errors import AllEtaInfeasibleError, ConfigError, JcjBeamError
from .experiment import (
    ExperimentConfig,
    config_from_mapping,
    emit_outputs,
    load_config,
    run_experiment,
)
from .hermitian import hermitize
from .jcj import run_jcj
from .metrics import rate_error, sinr_error_db
from .oracle import oracle_solve
from .problem import circshift_identity
from .sdp import lower_bound_power

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_ALL_INFEASIBLE = 3


def _parse_sweep(text: str):
    """'axis=v1,v2,...' -> (axis, values)."""
    if "=" not in text:
        raise ConfigError(f"sweep must look like axis=v1,v2,... got {text!r}")
    axis, _, tail = text.partition("=")
    values = tuple(float(v) for v in tail.split(",") if v)
    if not values:
        raise ConfigError(f"sweep {text!r} lists no values")
    return axis.strip(), values


def _build_config(args) -> ExperimentConfig:
    overrides = {}
    if getattr(args, "out", None):
        overrides["output_dir"] = args.out
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "realizations", None) is not None:
        overrides["realizations"] = args.realizations
    if getattr(args, "scheme", None):
        overrides["schemes"] = tuple(args.scheme)
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    if getattr(args, "sweep", None):
        axis, values = _parse_sweep(args.sweep)
        overrides["sweep_axis"] = axis
        overrides["sweep_values"] = values
    if args.config:
        return load_config(args.config, **overrides)
    return config_from_mapping(overrides)


def _cmd_run(args) -> int:
    config = _build_config(args)
    table = run_experiment(config)
    written = emit_outputs(table)
    ok = sum(1 for r in table.rows if r.jcj_ok or r.ci_ok)
    print(f"{len(table.rows)} cells, {ok} with at least one scheme succeeding")
    for name, path in sorted(written.items()):
        print(f"  {name}: {path}")
    if table.all_failed:
        print("every cell failed; no scheme produced a beamformer", file=sys.stderr)
        return EXIT_ALL_INFEASIBLE
    return EXIT_OK


def _cmd_solve(args) -> int:
    config = _build_config(args)
    sc_cfg = config.scenario_config()
    scenario = sample_scenario(sc_cfg, config.master_seed, args.realization)
    print(f"scenario: seed={config.master_seed} realization={args.realization}")
    for t in scenario.ues + scenario.uavs:
        print(f"  {t.kind}: r={t.range_m:.1f} m, aod={t.aod_deg:+.1f} deg")
    try:
        bf = run_jcj(scenario)
    except AllEtaInfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_ALL_INFEASIBLE
    bound = lower_bound_power(scenario)
    print(f"chosen eta: {bf.chosen_eta}")
    print(f"transmit power: {bf.power_mw:.6e} mW ({mw_to_dbm(bf.power_mw):.2f} dBm)")
    print(f"relaxation bound: {bound:.6e} mW ({mw_to_dbm(bound):.2f} dBm)")
    print(f"rate error: {rate_error(scenario, bf.f):.3e} bit/(s*Hz)")
    print(f"sinr error: {sinr_error_db(scenario, bf.f):.3e} dB")
    if args.verbose:
        print("per-eta scores:")
        for eta, err, status in bf.per_eta_errors:
            tag = "relaxation" if eta is None else f"eta={eta}"
            print(f"  {tag}: error={err if err is None else f'{err:.3e}'} [{status}]")
        print("beamformer columns (antenna x stream):")
        with np.printoptions(precision=4, suppress=False):
            print(bf.f)
    return EXIT_OK


def _cmd_check(args) -> int:
    rng = np.random.Generator(np.random.Philox(key=np.uint64([7, 7])))
    failures = 0

    worst = 0.0
    for _ in range(args.vectors):
        dim = int(rng.integers(2, 65))
        a = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        outer = np.outer(a, a.conj())
        trace = float(np.trace(outer).real)
        for k in range(1, dim):
            shifted = float(np.trace(outer @ circshift_identity(dim, k)).real)
            worst = max(worst, shifted - trace)
            if shifted - trace > 1e-9 * float(np.vdot(a, a).real):
                failures += 1
    print(f"cyclic-diagonal dominance: worst excess {worst:.3e} "
          f"({'pass' if failures == 0 else f'{failures} failures'})")

    sym_bad = 0
    for _ in range(200):
        dim = int(rng.integers(2, 17))
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a = hermitize(m)
        for k in range(1, dim):
            lhs = float(np.trace(a @ circshift_identity(dim, k)).real)
            rhs = float(np.trace(a @ circshift_identity(dim, dim - k)).real)
            if abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs)):
                sym_bad += 1
    print(f"conjugate-diagonal symmetry: {'pass' if sym_bad == 0 else f'{sym_bad} failures'}")

    if failures or sym_bad:
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_oracle(args) -> int:
    cfg = ScenarioConfig(n_tx=4, n_ue=1, n_uav=1)
    sandwich_ok = 0
    produced = 0
    for r in range(args.count):
        scenario = sample_scenario(cfg, args.seed, r)
        bound = lower_bound_power(scenario)
        ref = oracle_solve(scenario, seed=args.seed)
        try:
            bf = run_jcj(scenario)
        except AllEtaInfeasibleError:
            print(f"  r{r}: pipeline infeasible (oracle "
                  f"{'feasible' if ref.feasible_found else 'infeasible too'})")
            continue
        produced += 1
        ok = (
            ref.feasible_found
            and bound <= ref.best_power_mw + 1e-6
            and ref.best_power_mw <= bf.power_mw + 1e-6
        )
        sandwich_ok += ok
        print(f"  r{r}: bound={bound:.4e} oracle={ref.best_power_mw:.4e} "
              f"jcj={bf.power_mw:.4e} {'ok' if ok else 'VIOLATION'}")
    print(f"sandwich held on {sandwich_ok}/{args.count} instances "
          f"({produced} produced a beamformer)")
    if produced == 0:
        return EXIT_ALL_INFEASIBLE
    return EXIT_OK if sandwich_ok == produced else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcjbeam",
        description="Joint communication-and-jamming beamforming toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--realizations", type=int, help="realizations per sweep value")
        p.add_argument("--scheme", action="append", choices=["jcj", "ci"],
                       help="scheme to run (repeatable)")
        p.add_argument("--sweep", help="sweep spec, e.g. n_tx=8,16,32")
        p.add_argument("--workers", type=int, help="parallel worker processes")
        p.add_argument("--verbose", action="store_true")

    run_p = sub.add_parser("run", help="run a Monte-Carlo experiment")
    common(run_p)
    run_p.set_defaults(func=_cmd_run)

    solve_p = sub.add_parser("solve", help="solve and print one scenario")
    common(solve_p)
    solve_p.add_argument("--realization", type=int, default=0)
    solve_p.set_defaults(func=_cmd_solve)

    check_p = sub.add_parser("check", help="structural property suites")
    check_p.add_argument("--vectors", type=int, default=2000)
    check_p.add_argument("--verbose", action="store_true")
    check_p.set_defaults(func=_cmd_check)

    oracle_p = sub.add_parser("oracle", help="tiny-instance oracle comparison")
    oracle_p.add_argument("--count", type=int, default=5)
    oracle_p.add_argument("--seed", type=int, default=0)
    oracle_p.add_argument("--verbose", action="store_true")
    oracle_p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except JcjBeamError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
