"""Command-line entry point: ``cohforce run | list-scenarios | validate``."""
from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .config import ConfigError, config_from_mapping, dump_config, load_config
from .grid import PropagationError
from .scenarios import SCENARIOS, ScenarioError, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

log = logging.getLogger("cohforce")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cohforce", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and export CSV + manifest")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="YAML config file")
    src.add_argument("--scenario", choices=list(SCENARIOS), help="catalogue scenario with defaults")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--threads", type=int, default=1, help="concurrent state runs (default 1)")
    run.add_argument("--overwrite", action="store_true", help="replace existing results in --out")

    sub.add_parser("list-scenarios", help="print the scenario catalogue")

    val = sub.add_parser("validate", help="parse a config and print it fully resolved")
    val.add_argument("config", help="YAML config file")
    return p


def _load(args):
    if args.config:
        return load_config(args.config)
    return config_from_mapping({"scenario": args.scenario})


def _cmd_run(args) -> int:
    from .export import export_result

    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    cfg = _load(args)
    log.info("running %s (%d steps)", cfg.scenario, cfg.n_steps)
    try:
        result = run_scenario(cfg, threads=args.threads)
    except (PropagationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    manifest = export_result(result, args.out, overwrite=args.overwrite)
    print(f"wrote {len(manifest.files)} files to {args.out}")
    return EXIT_OK


def _cmd_list(_args) -> int:
    for name, cfg in SCENARIOS.items():
        kinds = ", ".join(f"{v}={s.kind}" for v, s in cfg.potentials)
        print(f"{name:16s} states={','.join(cfg.states):14s} centers={list(cfg.centers)} "
              f"duration={cfg.duration:g} potentials: {kinds}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = load_config(args.config)
    sys.stdout.write(dump_config(cfg))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "list-scenarios": _cmd_list, "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except (ConfigError, ScenarioError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileExistsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
