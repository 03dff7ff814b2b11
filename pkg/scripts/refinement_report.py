#!/usr/bin/env python3
"""Grid-refinement report for the direct integrator.

Prints the field error against the closed form under background-ratio
halving and grid halving, and the conservation-law residual decay
under zeta refinement.
"""

import argparse
import json

from slowsol.scenarios import (
    conservation_study,
    default_config,
    error_scaling_study,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--skip-conservation", action="store_true",
                        help="only run the (faster) error-scaling part")
    args = parser.parse_args()
    config = default_config("oracle")

    scaling = error_scaling_study(config)
    print("error scaling vs closed form:")
    print(json.dumps(scaling, indent=2))

    if not args.skip_conservation:
        cons = conservation_study(config)
        print("conservation residual under zeta refinement:")
        for row in cons["refinement_levels"]:
            print(f"  n_zeta={row['n_zeta']:6d}  "
                  f"relative_residual={row['relative_residual']:.3e}")
        print(f"  per-halving rates: "
              f"{', '.join(f'{r:.2f}' for r in cons['refinement_rates'])}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
