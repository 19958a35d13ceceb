"""Command line entry point.

Exit codes: 0 success, 2 configuration (or output path) error,
3 numerical-invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from .. import __version__
from ..errors import ConfigError, InvariantViolation, SizeGuardError, SublatticeViolation
from .config import load_config, make_config
from .emit import emit
from .runner import run_experiment

SUBCOMMANDS = {
    "spectrum-scatter": "spectrum_scatter",
    "mu-sweep": "mu_sweep",
    "interaction-sweep": "interaction_sweep",
    "crosscheck": "crosscheck",
}

EXIT_CONFIG = 2
EXIT_INVARIANT = 3


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="number of modes")
    p.add_argument("--seed", type=int)
    p.add_argument("--boundary", choices=["open", "periodic"])
    p.add_argument("--topology", choices=["chain_nn", "dense"])
    p.add_argument("--grid", help="a:b:step (inclusive) or comma list")
    p.add_argument("--alpha", help="Renyi index, 'inf' allowed")
    p.add_argument("--subset", help="'B' or 1-based comma list of modes")
    p.add_argument("--out", dest="out_path")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--plot", action="store_true", default=None)
    p.add_argument("--workers", type=int)
    p.add_argument("--config", help="JSON ExperimentConfig; explicit flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sublattice-ent", description=__doc__.splitlines()[0])
    parser.add_argument("--config", dest="top_config", help="run the JSON ExperimentConfig in this file")
    sub = parser.add_subparsers(dest="command")
    for name in SUBCOMMANDS:
        _add_experiment_flags(sub.add_parser(name))
    sub.add_parser("info", help="print version and conventions")
    return parser


def _info() -> dict:
    return {
        "library": "sublattice_entanglement",
        "version": __version__,
        "rng": "numpy.random.Generator(PCG64(seed)); per-point streams default_rng([seed, index])",
        "entropy_unit": "log 2",
        "fock_basis": "mode 1 is the most significant bit; basis = f_1^dag^b1 ... f_N^dag^bN |0>",
        "majorana": "w_{2j-1} = f_j^dag + f_j, w_{2j} = -i (f_j^dag - f_j)",
        "indices": "1-based in CLI and JSON, 0-based in the Python API",
        "kinds": sorted(SUBCOMMANDS),
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "info":
        print(json.dumps(_info(), indent=2))
        return 0
    try:
        if args.command is None:
            if not args.top_config:
                build_parser().print_usage(sys.stderr)
                return EXIT_CONFIG
            cfg = load_config(args.top_config)
        else:
            overrides = {
                k: getattr(args, k)
                for k in ("n", "seed", "boundary", "topology", "grid", "alpha", "subset", "out_path", "format", "plot", "workers")
            }
            config_path = args.config or args.top_config
            kind = SUBCOMMANDS[args.command]
            if config_path:
                cfg = load_config(config_path, kind=kind, **overrides)
            else:
                cfg = make_config(kind, **overrides)
        table = run_experiment(cfg)
        paths = emit(table, cfg)
    except (ConfigError, SizeGuardError, SublatticeViolation) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
