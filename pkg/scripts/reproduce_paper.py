"""Run every golden check and write the report bundle.

    python3 scripts/reproduce_paper.py --out results/ --seed 0
"""

import argparse
import sys

from redmap import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    return cli.run(cli.RunConfig(command="reproduce-paper", seed=args.seed, out=args.out))


if __name__ == "__main__":
    sys.exit(main())
