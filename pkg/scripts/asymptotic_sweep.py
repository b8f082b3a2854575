"""High-velocity sweep: every limit quantity on a log theta grid.

    python scripts/asymptotic_sweep.py --stop 1e5 --count 6

Prints one line per quantity with the final value, its target, the relative
error, the fitted decay exponent and the monotonicity flag.
"""

import argparse

import numpy as np

from hessgas.asymptotics import limit_suite
from hessgas.model import GasParameters


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--mass", type=float, default=1.0)
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--start", type=float, default=1.0)
    ap.add_argument("--stop", type=float, default=1e5)
    ap.add_argument("--count", type=int, default=6)
    args = ap.parse_args()

    gp = GasParameters(args.mass, args.radius)
    grid = np.geomspace(args.start, args.stop, args.count)
    suite = limit_suite(gp, grid, args.beta)
    print(f"{'quantity':<18} {'value':>14} {'limit':>14} {'rel error':>10} {'slope':>7}  monotone")
    for name, r in suite.items():
        print(
            f"{name:<18} {r.values[-1]:>14.8g} {r.limit:>14.8g} {r.final_error:>10.2e} "
            f"{r.decay_exponent:>7.3f}  {r.monotone}"
        )


if __name__ == "__main__":
    main()
