"""Command-line interface.

Subcommands: run | reversibility | temporal | cfl-sweep.  Each takes
--config PATH or --preset NAME (exactly one; the study subcommands have a
default preset), plus --out DIR and --threads N.  ECSLDG_THREADS
overrides --threads.  Exit codes: 0 success, 2 configuration error,
3 solver failure.
"""
from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, RunConfig, load_config, preset
from .field import SolverError
from .kernels import active_backend
from .studies import run_cfl_sweep, run_reversibility_study, run_single, run_temporal_study

_DEFAULT_PRESET = {
    "reversibility": "weak_landau_spatial",
    "temporal": "weak_landau_temporal_64",
    "cfl-sweep": "two_stream_i_sweep",
}

_EXPECTED_STUDY = {
    "run": "single",
    "reversibility": "reversibility",
    "temporal": "temporal_convergence",
    "cfl-sweep": "cfl_sweep",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecsldg",
        description="Energy-conserving semi-Lagrangian DG solver for the "
                    "1D1V Vlasov-Ampere system",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("run", "single simulation: series CSV plus optional snapshots"),
        ("reversibility", "spatial-convergence table via v-reflection"),
        ("temporal", "temporal-convergence table against a small-step reference"),
        ("cfl-sweep", "conservation drifts over a range of CFL numbers"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument("--preset", help="named configuration")
        p.add_argument("--out", default=".", help="output directory (default: cwd)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for study members")
    return parser


def _resolve_config(args) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("config/preset: give exactly one, not both")
    if args.config:
        return load_config(args.config)
    name = args.preset or _DEFAULT_PRESET.get(args.command)
    if name is None:
        raise ConfigError("config/preset: the run subcommand needs one of them")
    return preset(name)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    threads = int(os.environ.get("ECSLDG_THREADS", args.threads))
    try:
        cfg = _resolve_config(args)
        expected = _EXPECTED_STUDY[args.command]
        if cfg.study != expected:
            raise ConfigError(
                f"study: subcommand {args.command!r} needs study={expected}, "
                f"config says {cfg.study!r}"
            )
        os.makedirs(args.out, exist_ok=True)
        print(f"ecsldg: {args.command} ({cfg.scenario}), kernel backend: "
              f"{active_backend()}, threads: {threads}")
        if args.command == "run":
            result = run_single(cfg, args.out)
            last = result.records[-1]
            print(f"completed {len(result.records) - 1} steps to t = {last.t:g}; "
                  f"energy drift {result.max_drift('e_total'):.3e}, "
                  f"mass drift {result.max_drift('mass'):.3e}")
        elif args.command == "reversibility":
            table = run_reversibility_study(cfg, args.out, threads=threads)
            for k, block in table.items():
                orders = ", ".join(f"{o:.2f}" for o in block["l1_order"])
                print(f"degree {k}: L1 orders {orders}")
        elif args.command == "temporal":
            table = run_temporal_study(cfg, args.out, threads=threads)
            for scheme, data in table.items():
                print(f"{scheme}: observed temporal order {data['slope']:.2f}")
        else:
            table = run_cfl_sweep(cfg, args.out, threads=threads)
            for cfl, row in table.items():
                print(f"CFL {cfl:g}: energy drift {row['e_total_drift']:.3e}, "
                      f"mass drift {row['mass_drift']:.3e}, "
                      f"|dP| {row['momentum_drift']:.3e}")
    except ConfigError as exc:
        print(f"ecsldg: configuration error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"ecsldg: solver error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
