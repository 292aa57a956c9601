"""Evaluate every registered problem pair and print the envelope verdicts."""

import argparse

from mlsep import registry


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=sorted(registry.REGISTRY))
    ap.add_argument("--n-steps", type=int, default=1024)
    args = ap.parse_args()
    bad = 0
    for name in args.names:
        rep = registry.evaluate_pair(registry.get(name), args.n_steps)
        print(rep.verdict())
        bad += not (rep.sandwich_ok and rep.dominance_ok)
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
