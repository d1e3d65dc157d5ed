"""Group-conditional TPR/FPR, EOD and AOD on pointwise data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import JointDistribution, PointSet


class DegenerateStratumError(ValueError):
    """A (Y=y, A=a) stratum has no support, so its conditional rate is undefined."""

    def __init__(self, y: int, a: int):
        self.y, self.a = y, a
        super().__init__(f"degenerate stratum: no data with (Y={y}, A={a})")


@dataclass(frozen=True)
class GroupRates:
    """Per-group TPR/FPR plus the stratum sizes they were estimated from.

    The ``n_*`` fields are counts for empirical rates and probabilities
    P(Y=y, A=a) for analytic rates.
    """

    tpr_a1: float
    tpr_a0: float
    fpr_a1: float
    fpr_a0: float
    n_t1: float
    n_t0: float
    n_f1: float
    n_f0: float

    def tpr(self, a: int) -> float:
        return self.tpr_a1 if a == 1 else self.tpr_a0

    def fpr(self, a: int) -> float:
        return self.fpr_a1 if a == 1 else self.fpr_a0

    def tnr(self, a: int) -> float:
        return 1.0 - self.fpr(a)


def group_rates_from_cells(cells) -> GroupRates:
    """Rates from an 8-vector of (c, y, a) cell masses, counts or probabilities alike."""
    cells = np.asarray(cells, dtype=np.float64)
    positive = cells[4:]  # C = 1, indexed by 2*y + a
    stratum = cells[:4] + cells[4:]
    for y in (1, 0):
        for a in (1, 0):
            if stratum[2 * y + a] <= 0:
                raise DegenerateStratumError(y, a)
    rate = positive / stratum
    return GroupRates(
        tpr_a1=float(rate[3]),
        tpr_a0=float(rate[2]),
        fpr_a1=float(rate[1]),
        fpr_a0=float(rate[0]),
        n_t1=float(stratum[3]),
        n_t0=float(stratum[2]),
        n_f1=float(stratum[1]),
        n_f0=float(stratum[0]),
    )


def estimate_group_rates(s: PointSet) -> GroupRates:
    if len(s) == 0:
        raise ValueError("empty point set")
    return group_rates_from_cells(s.cell_counts())


def analytic_group_rates(d: JointDistribution) -> GroupRates:
    return group_rates_from_cells(d.p)


def eod_aod(r: GroupRates) -> tuple[float, float]:
    """Equal opportunity difference and average odds difference (group 1 minus group 0)."""
    eod = r.tpr_a1 - r.tpr_a0
    aod = 0.5 * (eod + r.fpr_a1 - r.fpr_a0)
    return eod, aod
