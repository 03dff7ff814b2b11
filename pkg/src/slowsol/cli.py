"""Command-line front end.

One scenario per invocation.  Configuration is the scenario default,
overlaid with an optional JSON document (``--config``) and then with
individual ``--set key.path=value`` overrides.  Artifacts and a summary
JSON land in ``--out``; the exit status is 0 iff every scenario-level
threshold passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import SlowsolError
from .io import write_json
from .scenarios import (
    RUNNERS,
    SCENARIOS,
    apply_overrides,
    default_config,
    merge_config,
    _jsonable,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slowsol",
        description="slow-light soliton simulations and checks",
    )
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", type=Path, default=None,
                       help="JSON config overlaying the scenario defaults")
        p.add_argument("--out", type=Path, default=Path("out"),
                       help="output directory (default: ./out)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap for the compiled kernels; the "
                            "current kernels are serial and deterministic, "
                            "so this only caps the runtime's thread pool")
        p.add_argument("--format", choices=("csv", "json", "bin"),
                       default="csv", help="artifact format")
        p.add_argument("--set", dest="overrides", action="append",
                       metavar="KEY=VALUE", default=[],
                       help="override one config entry (JSON-parsed value); "
                            "repeatable")
    return parser


def load_config(scenario: str, config_path, overrides) -> dict:
    config = default_config(scenario)
    if config_path is not None:
        with open(config_path) as fh:
            config = merge_config(config, json.load(fh))
    return apply_overrides(config, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads >= 1:
        os.environ.setdefault("NUMBA_NUM_THREADS", str(args.threads))
    try:
        config = load_config(args.scenario, args.config, args.overrides)
        summary = RUNNERS[args.scenario](config, out_dir=args.out,
                                         fmt=args.format)
    except (SlowsolError, ValueError) as exc:
        print(json.dumps({"scenario": args.scenario, "error": str(exc)}),
              file=sys.stderr)
        return 2
    payload = _jsonable(summary)
    args.out.mkdir(parents=True, exist_ok=True)
    write_json(args.out / f"{args.scenario.replace('-', '_')}_report.json",
               payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0 if summary["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
