"""Normal kernel, two-proportion z-tests and the composed fairness verdicts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .data import GroupPair, PairSet, PointSet
from .pairwise import estimate_comparative_rates
from .pointwise import GroupRates, estimate_group_rates

# Below this many supporting samples the normal approximation is suspect.
MIN_STRATUM = 30

_SQRT2 = math.sqrt(2.0)


def normal_cdf(x: float) -> float:
    """Standard normal CDF.

    Uses ``erf`` near zero and ``erfc`` in the tails so both halves keep full
    relative precision (absolute error well below 1e-15).
    """
    t = x / _SQRT2
    if abs(t) < 1 / _SQRT2:
        return 0.5 + 0.5 * math.erf(t)
    tail = 0.5 * math.erfc(abs(t))
    return 1.0 - tail if x > 0 else tail


def normal_sf(x: float) -> float:
    """1 - normal_cdf(x), without cancellation in the upper tail."""
    return normal_cdf(-x)


def normal_ppf(q: float, tol: float = 1e-12) -> float:
    """Inverse of :func:`normal_cdf` by bisection."""
    if not 0.0 < q < 1.0:
        if q == 0.0:
            return -math.inf
        if q == 1.0:
            return math.inf
        raise ValueError("q must lie in [0, 1]")
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=64)
def critical_value(alpha: float = 0.05) -> float:
    """Two-tailed critical value, e.g. about 1.959964 for alpha = 0.05."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return normal_ppf(1.0 - alpha / 2.0)


@dataclass(frozen=True)
class HypothesisResult:
    name: str
    z: float
    p_value: float
    rejected: bool
    alpha: float
    rate_left: float
    rate_right: float
    s2_left: float
    s2_right: float
    n_left: float
    n_right: float


@dataclass(frozen=True)
class TestVerdict:
    results: tuple[HypothesisResult, HypothesisResult]
    violated: bool
    alpha: float
    criterion: str = ""
    small_sample_warnings: list[str] = field(default_factory=list)

    __test__ = False

    def __getitem__(self, name: str) -> HypothesisResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def two_proportion_z(
    p_left: float,
    n_left: float,
    p_right: float,
    n_right: float,
    alpha: float = 0.05,
    name: str = "",
) -> HypothesisResult:
    """Two-tailed z-test of equal proportions with unpooled variances.

    A stratum whose rate is exactly 0 or 1 contributes zero variance. When both
    terms vanish, equal rates give z = 0 (accepted) and unequal rates give an
    infinite z (rejected, p = 0).
    """
    if n_left < 1 or n_right < 1:
        raise ValueError("each side needs at least one sample")
    for p in (p_left, p_right):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"rate {p!r} outside [0, 1]")
    s2_left = p_left * (1.0 - p_left) / n_left
    s2_right = p_right * (1.0 - p_right) / n_right
    diff = p_left - p_right
    se = math.sqrt(s2_left + s2_right)
    if se > 0:
        z = diff / se
    else:
        z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
    p_value = 2.0 * normal_sf(abs(z))
    return HypothesisResult(
        name=name,
        z=z,
        p_value=p_value,
        rejected=p_value < alpha,
        alpha=alpha,
        rate_left=p_left,
        rate_right=p_right,
        s2_left=s2_left,
        s2_right=s2_right,
        n_left=n_left,
        n_right=n_right,
    )


def separation_verdict(r: GroupRates, alpha: float = 0.05) -> TestVerdict:
    """H0_t (equal TPR) and H0_f (equal FPR); separation is violated if either is rejected."""
    ht = two_proportion_z(r.tpr_a1, r.n_t1, r.tpr_a0, r.n_t0, alpha, "H0_t")
    hf = two_proportion_z(r.fpr_a1, r.n_f1, r.fpr_a0, r.n_f0, alpha, "H0_f")
    warnings = [
        f"{label} has only {n:g} samples (< {MIN_STRATUM})"
        for label, n in (
            ("(Y=1, A=1)", r.n_t1),
            ("(Y=1, A=0)", r.n_t0),
            ("(Y=0, A=1)", r.n_f1),
            ("(Y=0, A=0)", r.n_f0),
        )
        if n < MIN_STRATUM
    ]
    return TestVerdict((ht, hf), ht.rejected or hf.rejected, alpha, "separation", warnings)


def test_separation(s: PointSet, alpha: float = 0.05) -> TestVerdict:
    return separation_verdict(estimate_group_rates(s), alpha)


test_separation.__test__ = False


class EmptyBucketError(ValueError):
    def __init__(self, gp: GroupPair):
        self.group_pair = gp
        super().__init__(f"no usable pairs in group-pair bucket {gp}")


def test_comparative_separation(sp: PairSet, alpha: float = 0.05) -> TestVerdict:
    """H0_c: TPR(1,0) = TPR(0,1) and H0_w: TPR(1,1) = TPR(0,0) on pooled pair buckets."""
    rates = estimate_comparative_rates(sp)
    for gp in ((1, 0), (0, 1), (1, 1), (0, 0)):
        if gp not in rates.tpr:
            raise EmptyBucketError(gp)
    tpr, sup = rates.tpr, rates.support
    hc = two_proportion_z(tpr[1, 0], sup[1, 0], tpr[0, 1], sup[0, 1], alpha, "H0_c")
    hw = two_proportion_z(tpr[1, 1], sup[1, 1], tpr[0, 0], sup[0, 0], alpha, "H0_w")
    warnings = [
        f"bucket {gp} has only {sup[gp]} pairs (< {MIN_STRATUM})"
        for gp in ((1, 0), (0, 1), (1, 1), (0, 0))
        if sup[gp] < MIN_STRATUM
    ]
    return TestVerdict(
        (hc, hw), hc.rejected or hw.rejected, alpha, "comparative separation", warnings
    )


test_comparative_separation.__test__ = False
