#!/usr/bin/env python3
"""Emit the fixed-lab-time polarization strip of the reference soliton.

Writes the Stokes-vector strip CSV plus a summary JSON into --out.
Equivalent to ``slowsol figure1`` but convenient for parameter sweeps
from other scripts.
"""

import argparse
import json
from pathlib import Path

from slowsol.scenarios import apply_overrides, default_config, run_figure1


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out/figure1"))
    parser.add_argument("--set", dest="overrides", action="append",
                        metavar="KEY=VALUE", default=[])
    args = parser.parse_args()
    config = apply_overrides(default_config("figure1"), args.overrides)
    summary = run_figure1(config, out_dir=args.out)
    print(json.dumps({k: v["value"] for k, v in summary["checks"].items()},
                     indent=2))
    return 0 if summary["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
