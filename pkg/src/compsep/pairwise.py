"""Comparative true positive rates on pairwise (comparative judgment) data.

A judged pair is stored with some orientation ``(i, j)``. Stating it the other
way round flips ``a_ij`` to ``a_ji`` and negates both ``y_ij`` and ``c_ij``, and
the conditional probabilities are unchanged by that. The estimator therefore
pools each pair into the bucket of its ``y_ij = +1`` orientation: a pair with
``y_ij = -1`` and groups ``(a_i, a_j)`` counts towards bucket ``(a_j, a_i)`` and
is a hit when ``c_ij = -1``.

Prediction ties (``c_ij = 0``) are never hits. They do count in the
denominator, since a tie is not a prediction of +1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .data import GROUP_PAIRS, GroupPair, JointDistribution, PairSet, PointSet


@dataclass(frozen=True)
class ComparativeRates:
    """TPR per populated group-pair bucket, with the bucket support.

    For analytic rates ``support`` holds the probability that one sampled pair
    lands in the bucket, so the expected bucket count is ``support * n_p``.
    """

    tpr: dict[GroupPair, float]
    support: dict[GroupPair, float]
    hits: dict[GroupPair, float] = field(default_factory=dict)

    def __getitem__(self, gp: GroupPair) -> float:
        return self.tpr[gp]


def pair_tallies(sp: PairSet) -> tuple[np.ndarray, np.ndarray]:
    """Pooled hit and support counts per bucket, bucket index ``2*a_i + a_j``."""
    positive = sp.y_ij == 1
    first = np.where(positive, sp.a_i, sp.a_j)
    second = np.where(positive, sp.a_j, sp.a_i)
    bucket = 2 * first + second
    support = np.bincount(bucket, minlength=4)
    hits = np.bincount(bucket, weights=(sp.c_ij == sp.y_ij), minlength=4)
    return hits.astype(np.int64), support


def estimate_comparative_rates(sp: PairSet) -> ComparativeRates:
    hits, support = pair_tallies(sp)
    tpr, sup, hit = {}, {}, {}
    for gp in GROUP_PAIRS:
        k = 2 * gp[0] + gp[1]
        if support[k] > 0:
            tpr[gp] = hits[k] / support[k]
            sup[gp] = int(support[k])
            hit[gp] = int(hits[k])
    return ComparativeRates(tpr, sup, hit)


def analytic_comparative_rates(d: JointDistribution) -> ComparativeRates:
    """Exact bucket TPRs when both items of a pair are independent draws from ``d``."""
    tpr, sup = {}, {}
    for ai, aj in GROUP_PAIRS:
        pos_i = d.marginal(1, ai)
        neg_j = d.marginal(0, aj)
        tpr[(ai, aj)] = d.cell(1, 1, ai) * d.cell(0, 0, aj) / (pos_i * neg_j)
        # either orientation of the draw lands in this bucket
        sup[(ai, aj)] = 2.0 * pos_i * neg_j
    return ComparativeRates(tpr, sup)


def _orient(s: PointSet, i: np.ndarray, j: np.ndarray) -> PairSet:
    y_ij = np.sign(s.y[i] - s.y[j]).astype(np.int64)
    c_ij = np.sign(s.c[i] - s.c[j]).astype(np.int64)
    keep = y_ij != 0
    return PairSet(
        s.a[i][keep], s.a[j][keep], y_ij[keep], c_ij[keep], discarded_ties=int((~keep).sum())
    )


def build_pairs(
    s: PointSet,
    n_p: int | None = None,
    rng_seed: int | np.random.Generator | None = None,
    sampling: Literal["independent", "all"] = "independent",
) -> PairSet:
    """Build comparative judgments from a pointwise set.

    ``independent`` draws ``n_p`` ordered index pairs uniformly with replacement,
    redrawing any ``i == j``. ``all`` enumerates every unordered pair ``i < j``
    once and ignores ``n_p``; those pairs share items, so they are not
    independent. Pairs with tied ground truth are dropped and counted.
    """
    n = len(s)
    if n < 2:
        raise ValueError("need at least 2 points to build pairs")
    if sampling == "all":
        i, j = np.triu_indices(n, k=1)
        return _orient(s, i, j)
    if sampling != "independent":
        raise ValueError(f"unknown sampling {sampling!r}")
    if n_p is None or n_p < 1:
        raise ValueError("n_p must be at least 1")
    rng = np.random.default_rng(rng_seed)
    i = rng.integers(n, size=n_p)
    j = rng.integers(n, size=n_p)
    clash = i == j
    while clash.any():
        j[clash] = rng.integers(n, size=int(clash.sum()))
        clash = i == j
    return _orient(s, i, j)
