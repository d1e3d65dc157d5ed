"""Expected vs simulated detection probabilities for the four reference classifiers.

    python scripts/detection_grid.py --replicates 10000 --seed 20261016

Prints a 4 x 4 grid (separation at n = 1000, 2000; comparative separation at
n_p = 2000, 4000) and exits non-zero if any cell misses by more than --tol.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from compsep.data import REFERENCE_DISTRIBUTIONS
from compsep.power import comparative_power, separation_power
from compsep.sim import SimConfig, run_detection_study

COLUMNS = (("separation", 1000), ("separation", 2000), ("comparative", 2000), ("comparative", 4000))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replicates", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=20261016)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--tol", type=float, default=0.015)
    ap.add_argument("--json", help="also write the grid to this file")
    args = ap.parse_args(argv)

    header = "".join(f"{c[:4]} {s:>5}".rjust(16) for c, s in COLUMNS)
    print(f"{'':<10}{'':<11}{header}")
    rows, worst = [], 0.0
    t0 = time.perf_counter()
    for name, d in REFERENCE_DISTRIBUTIONS.items():
        expected, simulated = [], []
        for criterion, size in COLUMNS:
            fn = separation_power if criterion == "separation" else comparative_power
            expected.append(fn(d, size, args.alpha).power)
            kw = {"n": size} if criterion == "separation" else {"n_p": size}
            cfg = SimConfig(d, replicates=args.replicates, alpha=args.alpha, seed=args.seed,
                            workers=args.workers, **kw)
            simulated.append(run_detection_study(cfg, criterion).detection_frequency)
        worst = max(worst, *(abs(e - s) for e, s in zip(expected, simulated)))
        print(f"{name:<10}{'expected':<11}" + "".join(f"{v:16.4f}" for v in expected))
        print(f"{'':<10}{'simulated':<11}" + "".join(f"{v:16.4f}" for v in simulated))
        rows.append({"distribution": name, "expected": expected, "simulated": simulated})
    print(f"\nlargest |expected - simulated| = {worst:.4f} (tolerance {args.tol}); "
          f"{time.perf_counter() - t0:.1f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"replicates": args.replicates, "seed": args.seed, "alpha": args.alpha,
                       "columns": COLUMNS, "rows": rows}, fh, indent=2)
    return 0 if worst <= args.tol else 1


if __name__ == "__main__":
    sys.exit(main())
