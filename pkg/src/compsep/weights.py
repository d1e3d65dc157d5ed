"""Per-(group, label) training weights for the Reweighing and FairBalance preprocessors.

Reweighing here is ``|A=a| * |Y=y| / |A=a, Y=y|`` without dividing by the
dataset size. A global rescaling of all weights leaves the weighted empirical
distribution unchanged, so only relative weights matter.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .data import PointSet

Scheme = Literal["none", "reweighing", "fairbalance"]
SCHEMES: tuple[str, ...] = ("none", "reweighing", "fairbalance")


class EmptyCellError(ValueError):
    def __init__(self, a: int, y: int):
        self.a, self.y = a, y
        super().__init__(f"no training points with (A={a}, Y={y})")


@dataclass(frozen=True)
class WeightTable:
    scheme: str
    w: dict[tuple[int, int], float]  # keyed by (a, y)

    def lookup(self, y, a) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64)
        a = np.asarray(a, dtype=np.int64)
        out = np.empty(y.shape, dtype=np.float64)
        for (ga, gy), wt in self.w.items():
            out[(a == ga) & (y == gy)] = wt
        return out


def weight_table(y, a, scheme: Scheme) -> WeightTable:
    """Weights from binary labels ``y`` and groups ``a``."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    y = np.asarray(y, dtype=np.int64)
    a = np.asarray(a, dtype=np.int64)
    if y.shape != a.shape or y.size == 0:
        raise ValueError("y and a must be non-empty and of equal length")
    if not (np.isin(y, (0, 1)).all() and np.isin(a, (0, 1)).all()):
        raise ValueError("weights need binary labels and groups")
    joint = {(ga, gy): int(((a == ga) & (y == gy)).sum()) for ga in (0, 1) for gy in (0, 1)}
    if scheme == "none":
        return WeightTable(scheme, {k: 1.0 for k, n in joint.items() if n > 0})
    for (ga, gy), n in joint.items():
        if n == 0:
            raise EmptyCellError(ga, gy)
    group = {ga: joint[ga, 0] + joint[ga, 1] for ga in (0, 1)}
    label = {gy: joint[0, gy] + joint[1, gy] for gy in (0, 1)}
    if scheme == "reweighing":
        w = {(ga, gy): group[ga] * label[gy] / n for (ga, gy), n in joint.items()}
    else:
        w = {(ga, gy): group[ga] / n for (ga, gy), n in joint.items()}
    return WeightTable(scheme, w)


def compute_weights(s: PointSet, scheme: Scheme) -> WeightTable:
    """Weights from the ground-truth labels of ``s``; predictions are ignored."""
    if s.mode != "binary":
        raise ValueError("weights are defined for binary labels only")
    return weight_table(s.y, s.a, scheme)
