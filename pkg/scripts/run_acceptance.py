"""Run the eight acceptance experiments and write a report bundle.

    python scripts/run_acceptance.py --out results/ --seed 0
"""

import argparse
import sys

from morrey.cli import main


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="reduced grids")
    return ap.parse_args()


if __name__ == "__main__":
    args = parse_args()
    argv = ["report", "--out", args.out, "--seed", str(args.seed)]
    if args.quick:
        argv.append("--quick")
    sys.exit(main(argv))
