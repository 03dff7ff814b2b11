#!/usr/bin/env python3
"""Sweep the tracked soliton velocity over background intensities.

For each (|Omega|, g) pair, integrate the full field/atom system,
track the twist center across the medium, and compare the fitted
velocity with the closed-form law v/c = |Omega|^2 / (2 g + |Omega|^2).
"""

import argparse
import json

from slowsol.scenarios import default_config, velocity_study


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--modulus", type=float, default=None,
                        help="spectral-parameter modulus in MHz")
    parser.add_argument("--sets", type=str, default=None,
                        help='JSON list of [omega_mhz, g_mhz2] pairs')
    args = parser.parse_args()
    config = default_config("oracle")
    if args.modulus is not None:
        config["velocity"]["modulus_mhz"] = args.modulus
    if args.sets is not None:
        config["velocity"]["parameter_sets"] = json.loads(args.sets)
    out = velocity_study(config)
    for row in out["rows"]:
        print(
            f"omega={row['omega_mhz']:.3g} MHz  g={row['g_mhz2']:.4g} MHz^2  "
            f"v/c={row['v_over_c']:.6g}  theory={row['v_over_c_theory']:.6g}  "
            f"rel_err={row['relative_error']:.3g}"
        )
    print(f"worst relative error: {out['velocity_error']:.3g}")
    print(f"linearity deviation:  {out['linearity_error']:.3g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
