"""Squarefree parts of 9z^2 - 4 over Markoff numbers z up to a bound.

    python3 scripts/markoff_uniqueness.py 1000000
"""

import argparse
import json

from plagrange.markoff import strong_uniqueness_check


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("bound", type=int, nargs="?", default=10**6)
    ap.add_argument("--timeout", type=float, default=5.0, help="seconds per factorization")
    args = ap.parse_args()
    rep = strong_uniqueness_check(args.bound, args.timeout)
    print(json.dumps(rep.to_json(), indent=2))
    raise SystemExit(0 if rep.ok else 1)


if __name__ == "__main__":
    main()
