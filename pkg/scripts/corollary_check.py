"""Compare the search with the Markoff congruence cases for every prime below N.

    python3 scripts/corollary_check.py 200

For primes where some congruence case applies, the search minimum must be
the smallest Markoff point among them.  Prints one line per prime.
"""

import argparse
import time

from plagrange.factor import is_prime
from plagrange.markoff import corollary_filter
from plagrange.search import NotTerminated, min_lagrange


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("limit", type=int, nargs="?", default=100)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    bad = 0
    for p in range(2, args.limit):
        if not is_prime(p):
            continue
        t0 = time.monotonic()
        r = min_lagrange(p, threads=args.threads)
        took = time.monotonic() - t0
        if isinstance(r, NotTerminated):
            print(f"{p:5d}  not terminated by k={r.k_max}")
            bad += 1
            continue
        pts = corollary_filter(p)
        expect = min((pt.value for pt in pts), default=None)
        mark = "-" if expect is None else ("ok" if expect == r.alpha else "MISMATCH")
        bad += mark == "MISMATCH"
        print(f"{p:5d}  {str(r.alpha):22s} {r.alpha.decimal_str(15):18s} {mark:8s} k={r.k_stop:3d} {took:7.2f}s", flush=True)
    print("all consistent" if not bad else f"{bad} problems")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
