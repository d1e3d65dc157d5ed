"""Analytic Type II error and power of the separation and comparative-separation tests.

The difference of two estimated proportions is modelled as N(mu, sigma) with
``sigma = sqrt(p_w (1 - p_w) / n_w + p_v (1 - p_v) / n_v)``; a hypothesis is
accepted when the difference falls inside ``+-z_crit * sigma``. Stratum and
bucket sizes are expected counts and stay fractional.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .data import JointDistribution
from .pairwise import analytic_comparative_rates
from .pointwise import analytic_group_rates
from .stats import critical_value, normal_cdf

# Effect sizes below this are treated as exactly zero (floating noise in
# tables such as f_theta0, whose rates agree only up to rounding).
ZERO_EFFECT = 1e-12
MAX_BUDGET = 10**7


class BudgetError(RuntimeError):
    pass


def beta_accept(mu: float, sigma: float, alpha: float = 0.05) -> float:
    """Probability that a two-tailed z-test at ``alpha`` accepts H0 when the true gap is ``mu``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    zc = critical_value(alpha)
    shift = mu / sigma
    return normal_cdf(zc - shift) - normal_cdf(-zc - shift)


def _effect(mu: float) -> float:
    return 0.0 if abs(mu) <= ZERO_EFFECT else mu


def _beta(mu: float, p_w: float, n_w: float, p_v: float, n_v: float, alpha: float) -> float:
    mu = _effect(mu)
    sigma = math.sqrt(p_w * (1 - p_w) / n_w + p_v * (1 - p_v) / n_v)
    if sigma == 0:
        # both rates are 0 or 1: the test statistic is deterministic
        return 1.0 if mu == 0 else 0.0
    return beta_accept(mu, sigma, alpha)


@dataclass(frozen=True)
class PowerReport:
    criterion: str
    beta_per_hypothesis: dict[str, float]
    beta_composed: float
    power: float
    effects: dict[str, float]
    effective_counts: dict[str, float] = field(default_factory=dict)
    alpha: float = 0.05


def separation_power(d: JointDistribution, n: float, alpha: float = 0.05) -> PowerReport:
    if n < 1:
        raise ValueError("n must be at least 1")
    r = analytic_group_rates(d)
    counts = {
        "n_t1": r.n_t1 * n,
        "n_t0": r.n_t0 * n,
        "n_f1": r.n_f1 * n,
        "n_f0": r.n_f0 * n,
    }
    mu_t = _effect(r.tpr_a1 - r.tpr_a0)
    mu_f = _effect(r.fpr_a1 - r.fpr_a0)
    beta_t = _beta(mu_t, r.tpr_a1, counts["n_t1"], r.tpr_a0, counts["n_t0"], alpha)
    beta_f = _beta(mu_f, r.fpr_a1, counts["n_f1"], r.fpr_a0, counts["n_f0"], alpha)
    beta_r = beta_t * beta_f
    return PowerReport(
        "separation",
        {"H0_t": beta_t, "H0_f": beta_f},
        beta_r,
        1.0 - beta_r,
        {"H0_t": mu_t, "H0_f": mu_f},
        counts,
        alpha,
    )


def comparative_power(d: JointDistribution, n_p: float, alpha: float = 0.05) -> PowerReport:
    if n_p < 1:
        raise ValueError("n_p must be at least 1")
    cr = analytic_comparative_rates(d)
    t, share = cr.tpr, cr.support
    counts = {f"n_{a}{b}": share[a, b] * n_p for a, b in ((1, 0), (0, 1), (1, 1), (0, 0))}
    mu_c = _effect(t[1, 0] - t[0, 1])
    mu_w = _effect(t[1, 1] - t[0, 0])
    beta_c = _beta(mu_c, t[1, 0], counts["n_10"], t[0, 1], counts["n_01"], alpha)
    beta_w = _beta(mu_w, t[1, 1], counts["n_11"], t[0, 0], counts["n_00"], alpha)
    beta_p = beta_c * beta_w
    return PowerReport(
        "comparative separation",
        {"H0_c": beta_c, "H0_w": beta_w},
        beta_p,
        1.0 - beta_p,
        {"H0_c": mu_c, "H0_w": mu_w},
        counts,
        alpha,
    )


@dataclass(frozen=True)
class BudgetResult:
    n: int
    n_p: int
    ratio: float
    separation_power: float
    comparative_power: float
    satisfying: bool
    notice: str = ""


def matched_pair_budget(
    d: JointDistribution, n: int, alpha: float = 0.05, cap: int = MAX_BUDGET
) -> BudgetResult:
    """Smallest pair count whose comparative power reaches the separation power at ``n``.

    Power is monotone in the sample size whenever some effect is non-zero, so
    the search doubles until the target is passed and then bisects.
    """
    target = separation_power(d, n, alpha)
    effects = comparative_power(d, 1, alpha).effects
    if all(v == 0.0 for v in effects.values()):
        return BudgetResult(
            n, 1, 1 / n, target.power, comparative_power(d, 1, alpha).power, True,
            "distribution satisfies separation; power equals the Type I rate at any size",
        )

    def reaches(k: int) -> bool:
        return comparative_power(d, k, alpha).power >= target.power

    hi = 1
    while not reaches(hi):
        if hi >= cap:
            raise BudgetError(f"power {target.power:.4f} not reachable with n_p <= {cap}")
        hi = min(2 * hi, cap)
    lo = hi // 2  # fails, or 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if reaches(mid):
            hi = mid
        else:
            lo = mid
    return BudgetResult(
        n, hi, hi / n, target.power, comparative_power(d, hi, alpha).power, False
    )
