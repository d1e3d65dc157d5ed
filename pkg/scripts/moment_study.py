"""Sampling mean and variance of every rate estimator against the normal model.

    python scripts/moment_study.py --distribution f_theta0 --replicates 10000

For each size the variance should roughly halve when the size doubles.
"""
from __future__ import annotations

import argparse

from compsep.data import REFERENCE_DISTRIBUTIONS
from compsep.sim import PAIR_METRICS, POINT_METRICS, SimConfig, expected_moments, run_detection_study


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--distribution", default="f_theta0", choices=sorted(REFERENCE_DISTRIBUTIONS))
    ap.add_argument("--n", type=int, nargs="+", default=[1000, 2000])
    ap.add_argument("--replicates", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    d = REFERENCE_DISTRIBUTIONS[args.distribution]
    print(f"{'metric':<10}{'size':>6}{'mean':>10}{'expected':>10}{'variance':>12}{'expected':>12}{'ratio':>8}")
    for n in args.n:
        for criterion, size, names in (("separation", n, POINT_METRICS), ("comparative", 2 * n, PAIR_METRICS)):
            kw = {"n": size} if criterion == "separation" else {"n_p": size}
            res = run_detection_study(SimConfig(d, replicates=args.replicates, seed=args.seed, **kw), criterion)
            for metric in names:
                mean, var = res.estimator_moments[metric]
                mu, ev = expected_moments(d, metric, size)
                print(f"{metric:<10}{size:>6}{mean:>10.5f}{mu:>10.5f}{var:>12.6f}{ev:>12.6f}{var / ev:>8.3f}")


if __name__ == "__main__":
    main()
