"""Regenerate the committed test fixtures and distribution files.

    python scripts/make_fixtures.py

Outputs are deterministic; rerunning must not change any committed file.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from compsep.data import (
    REFERENCE_DISTRIBUTIONS,
    PairSet,
    PointSet,
    dump_distribution,
    dump_pair_set,
    dump_point_set,
)
from compsep.sim import sample_pair_set, sample_point_set

ROOT = Path(__file__).resolve().parents[1]
FIX = ROOT / "tests" / "fixtures"
DIST = ROOT / "data" / "distributions"
PRED = FIX / "predictions"


def latent_score_predictions(n: int, seed: int, base_rate, group_share, shift, noise, cut) -> PointSet:
    """Predictions of a thresholded noisy score.

    ``base_rate[a]`` is P(Y=1 | A=a); ``shift[a]`` moves group a's scores, which
    is how group-dependent error rates (bias) enter.
    """
    rng = np.random.default_rng(seed)
    a = (rng.random(n) < group_share).astype(int)
    y = (rng.random(n) < np.take(base_rate, a)).astype(int)
    score = y + np.take(shift, a) + noise * rng.standard_normal(n)
    c = (score > cut).astype(int)
    return PointSet(y, c, a)


def main():
    FIX.mkdir(parents=True, exist_ok=True)
    DIST.mkdir(parents=True, exist_ok=True)
    PRED.mkdir(parents=True, exist_ok=True)

    for name, d in REFERENCE_DISTRIBUTIONS.items():
        (DIST / f"{name}.json").write_text(dump_distribution(d))

    # perfect predictor, 40 points per (y, a) stratum
    y = np.repeat([1, 1, 0, 0], 40)
    a = np.tile(np.repeat([1, 0], 40), 2)
    (FIX / "perfect_points.csv").write_text(dump_point_set(PointSet(y, y, a)))

    rng = np.random.default_rng(20260301)
    s = sample_point_set(REFERENCE_DISTRIBUTIONS["f_theta3"], 2000, rng)
    (FIX / "f_theta3_n2000.csv").write_text(dump_point_set(s))

    rng = np.random.default_rng(20260302)
    sp = sample_pair_set(REFERENCE_DISTRIBUTIONS["f_theta1"], 4000, rng)
    (FIX / "f_theta1_pairs_np4000.csv").write_text(dump_pair_set(sp))

    # every bucket and orientation, always judged correctly
    rows = [(ai, aj, yij, yij) for ai in (0, 1) for aj in (0, 1) for yij in (-1, 1)] * 10
    cols = list(zip(*rows))
    (FIX / "perfect_pairs.csv").write_text(dump_pair_set(PairSet(*cols)))

    # regression-style labels (story-point scale) with a noisy predictor
    rng = np.random.default_rng(20260303)
    n = 284
    a = (rng.random(n) < 127 / 284).astype(int)
    y = rng.choice([1, 2, 3, 5, 8, 13, 20], size=n, p=[0.1, 0.2, 0.25, 0.2, 0.15, 0.07, 0.03])
    c = np.round(y * 0.6 + 1.5 + rng.normal(0, 2.0, n), 2)
    (FIX / "continuous_points.csv").write_text(dump_point_set(PointSet(y.astype(float), c, a, "continuous")))

    (FIX / "empty.csv").write_text("")

    # prediction files shaped like audited real datasets: a large and a small
    # test split, each before and after bias mitigation
    specs = {
        "large_unmitigated": dict(n=3607, seed=11, base_rate=(0.45, 0.55), group_share=0.8,
                                  shift=(0.0, 0.35), noise=0.45, cut=0.5),
        "large_mitigated": dict(n=3607, seed=12, base_rate=(0.45, 0.55), group_share=0.8,
                                shift=(0.0, 0.0), noise=0.45, cut=0.5),
        "small_unmitigated": dict(n=500, seed=13, base_rate=(0.6, 0.75), group_share=0.7,
                                  shift=(0.0, 0.25), noise=0.5, cut=0.5),
        "small_mitigated": dict(n=500, seed=14, base_rate=(0.6, 0.75), group_share=0.7,
                                shift=(0.0, 0.0), noise=0.5, cut=0.5),
    }
    for name, kw in specs.items():
        (PRED / f"{name}.csv").write_text(dump_point_set(latent_score_predictions(**kw)))


if __name__ == "__main__":
    main()
