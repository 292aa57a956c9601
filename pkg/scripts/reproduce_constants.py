"""Recompute the reference constants and print the comparison table.

Takes about 45 s. Exit status is 1 if any row misses its tolerance.
"""

import argparse
import sys
import time

from mlsep.figures import constants_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tol-scale", type=float, default=1.0)
    args = ap.parse_args()
    t0 = time.perf_counter()
    rows = constants_table(args.tol_scale)
    for r in rows:
        print(f"{r.name:34s} ref {r.reference:.10f}  got {r.computed:.12f}  diff {r.diff:.1e}  "
              f"{'ok' if r.ok else 'MISS'}")
    print(f"{time.perf_counter() - t0:.1f} s")
    return 0 if all(r.ok for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
