"""Command-line entry point: run, check, diagnose.

Exit codes: 0 success, 2 configuration error, 3 a solver stall was reported
(the run still completes and is written), 4 contract violation or diagnostic
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import RunConfig, parse_config
from .driver import (LoadProgram, Trajectory, energy_balance_report, run,
                     run_stability_diagnostics)
from .errors import ConfigError, ContractViolationError
from .mesh import build_structured_mesh, classify_boundary
from .runio import load_states, read_ledger, read_manifest, write_run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STALL = 3
EXIT_CONTRACT = 4

_CONFIG_FLAGS = (
    "preset", "seed", "n_steps", "t_final", "elastic_tol", "sweep_rtol",
    "max_sweeps", "nx", "ny", "alpha", "delta1", "delta2", "epsilon", "beta",
    "alpha_i", "alpha_s", "wave_knots", "out_dir", "emit_snapshots",
    "run_diagnostics",
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a key = value config file")
    for key in _CONFIG_FLAGS:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)


def _collect_overrides(args: argparse.Namespace) -> dict[str, str]:
    return {key: getattr(args, key) for key in _CONFIG_FLAGS
            if getattr(args, key, None) is not None}


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return parse_config(args.config, _collect_overrides(args))


def _summarize(cfg: RunConfig) -> str:
    return (f"preset={cfg.preset} mesh={cfg.nx}x{cfg.ny} N={cfg.n_steps} "
            f"T={cfg.t_final} seed={cfg.seed} alpha_i={cfg.alpha_i} "
            f"alpha_s={cfg.alpha_s} beta={cfg.beta}")


def _run_command(args: argparse.Namespace) -> int:
    try:
        cfg = _config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    mesh = build_structured_mesh(cfg.nx, cfg.ny)
    params = cfg.material_params()
    program = cfg.load_program()
    print(f"running {_summarize(cfg)}")
    try:
        traj = run(cfg.preset, mesh, params, program, cfg.seed,
                   elastic_tol=cfg.elastic_tol, sweep_rtol=cfg.sweep_rtol,
                   max_sweeps=cfg.max_sweeps)
    except ContractViolationError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT

    out_dir = cfg.out_dir or f"runs/{cfg.preset}-seed{cfg.seed}"
    write_run(traj, cfg, out_dir)
    print(f"wrote {out_dir} ({len(traj.states)} snapshots)")

    code = EXIT_OK
    stalled = [row.k for row in traj.ledger if row.status != "ok"]
    if stalled:
        print(f"warning: non-ok solver status at steps {stalled}", file=sys.stderr)
        code = EXIT_STALL

    if cfg.run_diagnostics:
        diag_code = _print_diagnostics(traj)
        code = max(code, diag_code)
    return code


def _print_diagnostics(traj: Trajectory) -> int:
    balance = energy_balance_report(traj)
    bad_balance = [row.k for row in balance if not row.upper_ok]
    print("energy balance: " + ("all upper estimates hold" if not bad_balance
                                else f"violated at steps {bad_balance}"))
    for row in balance:
        print(f"  k={row.k:3d} upper_gap={row.upper_gap:+.3e} "
              f"work_est={row.work_est:+.6e} residual={row.residual:+.3e}")
    reports = run_stability_diagnostics(traj)
    n_viol = sum(len(r.violations) for r in reports)
    print(f"stability: {sum(r.n_checked for r in reports)} competitors checked, "
          f"{n_viol} violations")
    for r in reports:
        if r.violations:
            worst = min(m for _, m in r.violations)
            print(f"  k={r.k}: {len(r.violations)} violations, worst margin {worst:.3e}")
    return EXIT_CONTRACT if (bad_balance or n_viol) else EXIT_OK


def _check_command(args: argparse.Namespace) -> int:
    try:
        cfg = _config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"config ok: {_summarize(cfg)}")
    return EXIT_OK


def _diagnose_command(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    try:
        cfg, meta = read_manifest(run_dir)
        ledger = read_ledger(run_dir / "ledger.csv")
        states = load_states(run_dir, cfg.n_steps)
    except (OSError, ValueError, ConfigError) as exc:
        print(f"cannot load run directory: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    mesh = build_structured_mesh(cfg.nx, cfg.ny)
    node_sets = classify_boundary(mesh, cfg.preset)
    traj = Trajectory(preset=cfg.preset, seed=cfg.seed, mesh=mesh,
                      params=cfg.material_params(), program=cfg.load_program(),
                      node_sets=node_sets, states=states, ledger=ledger)
    print(f"replaying {run_dir} ({len(states)} snapshots, "
          f"backend of record: {meta.get('kernel_backend', '?')})")
    return _print_diagnostics(traj)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sma2d",
        description="Quasistatic two-variant martensite evolution on a triangulated rectangle")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a full simulation and write a run directory")
    _add_config_flags(run_p)
    run_p.set_defaults(func=_run_command)

    check_p = sub.add_parser("check", help="validate a configuration and exit")
    _add_config_flags(check_p)
    check_p.set_defaults(func=_check_command)

    diag_p = sub.add_parser("diagnose", help="replay a run directory through the diagnostics")
    diag_p.add_argument("run_dir")
    diag_p.set_defaults(func=_diagnose_command)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
