"""Monte Carlo detection and moment studies on a known joint distribution.

Every replicate gets its own generator spawned from ``SeedSequence(seed)``,
so results do not depend on how replicates are spread over workers.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .data import CELLS, JointDistribution, PairSet, PointSet
from .pairwise import analytic_comparative_rates
from .pointwise import DegenerateStratumError, analytic_group_rates, estimate_group_rates
from .stats import EmptyBucketError, separation_verdict, test_comparative_separation

log = logging.getLogger(__name__)

Criterion = Literal["separation", "comparative"]

POINT_METRICS = ("tpr_a1", "tpr_a0", "fpr_a1", "fpr_a0")
PAIR_METRICS = ("tpr(1,0)", "tpr(0,1)", "tpr(1,1)", "tpr(0,0)")
MAX_ERROR_FRACTION = 0.01

_C = np.array([k[0] for k in CELLS])
_Y = np.array([k[1] for k in CELLS])
_A = np.array([k[2] for k in CELLS])


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    distribution: JointDistribution
    n: int | None = None
    n_p: int | None = None
    replicates: int = 10_000
    alpha: float = 0.05
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.n is None and self.n_p is None:
            raise ValueError("set n (separation) or n_p (comparative)")
        for v in (self.n, self.n_p):
            if v is not None and v < 1:
                raise ValueError("sample sizes must be at least 1")


@dataclass(frozen=True)
class SimResult:
    criterion: str
    detection_frequency: float
    estimator_moments: dict[str, tuple[float, float]]
    replicate_count: int
    errored: int
    seed: int
    size: int
    alpha: float
    distribution: str = ""
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "distribution": self.distribution,
            "size": self.size,
            "alpha": self.alpha,
            "seed": self.seed,
            "replicate_count": self.replicate_count,
            "errored": self.errored,
            "detection_frequency": self.detection_frequency,
            "estimator_moments": {
                k: {"mean": m, "variance": v} for k, (m, v) in self.estimator_moments.items()
            },
            "warnings": list(self.warnings),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _draw_cells(d: JointDistribution, size: int, rng: np.random.Generator) -> np.ndarray:
    # inverse-CDF lookup; the last edge is pinned to 1 to absorb the <= 1e-9 sum slack
    edges = np.cumsum(d.p)
    edges[-1] = 1.0
    return np.searchsorted(edges, rng.random(size), side="right").clip(max=7)


def sample_point_set(d: JointDistribution, n: int, rng: np.random.Generator) -> PointSet:
    """``n`` i.i.d. draws from the 8-cell table."""
    if n < 1:
        raise ValueError("n must be at least 1")
    k = _draw_cells(d, n, rng)
    return PointSet(_Y[k], _C[k], _A[k])


def sample_pair_set(d: JointDistribution, n_p: int, rng: np.random.Generator) -> PairSet:
    """``n_p`` pairs of two independent points each; truth ties are dropped and counted."""
    if n_p < 1:
        raise ValueError("n_p must be at least 1")
    k = _draw_cells(d, 2 * n_p, rng)
    ki, kj = k[:n_p], k[n_p:]
    y_ij = _Y[ki] - _Y[kj]
    c_ij = _C[ki] - _C[kj]
    keep = y_ij != 0
    return PairSet(_A[ki][keep], _A[kj][keep], y_ij[keep], c_ij[keep], int((~keep).sum()))


def _replicate(cfg: SimConfig, criterion: Criterion, seq: np.random.SeedSequence):
    rng = np.random.Generator(np.random.PCG64(seq))
    d = cfg.distribution
    try:
        if criterion == "separation":
            r = estimate_group_rates(sample_point_set(d, cfg.n, rng))
            verdict = separation_verdict(r, cfg.alpha)
            values = (r.tpr_a1, r.tpr_a0, r.fpr_a1, r.fpr_a0)
        else:
            sp = sample_pair_set(d, cfg.n_p, rng)
            verdict = test_comparative_separation(sp, cfg.alpha)
            hc, hw = verdict.results
            values = (hc.rate_left, hc.rate_right, hw.rate_left, hw.rate_right)
    except (DegenerateStratumError, EmptyBucketError):
        return None
    return verdict.violated, values


def _run(cfg: SimConfig, criterion: Criterion) -> SimResult:
    if criterion not in ("separation", "comparative"):
        raise ValueError(f"unknown criterion {criterion!r}")
    size = cfg.n if criterion == "separation" else cfg.n_p
    if size is None:
        raise ValueError(f"{criterion} study needs {'n' if criterion == 'separation' else 'n_p'}")
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.replicates)

    def chunk(part):
        return [_replicate(cfg, criterion, s) for s in part]

    if cfg.workers > 1:
        parts = np.array_split(np.arange(cfg.replicates), cfg.workers)
        with ThreadPoolExecutor(cfg.workers) as pool:
            outs = list(pool.map(lambda ix: chunk([seqs[i] for i in ix]), parts))
        outcomes = [o for part in outs for o in part]
    else:
        outcomes = chunk(seqs)

    ok = [o for o in outcomes if o is not None]
    errored = len(outcomes) - len(ok)
    warnings = []
    if errored:
        if errored > MAX_ERROR_FRACTION * cfg.replicates:
            raise SimulationError(
                f"{errored} of {cfg.replicates} replicates had an empty stratum or bucket; "
                f"sample size {size} is too small for this distribution"
            )
        msg = f"{errored} degenerate replicates excluded"
        log.warning(msg)
        warnings.append(msg)
    names = POINT_METRICS if criterion == "separation" else PAIR_METRICS
    values = np.array([v for _, v in ok], dtype=np.float64).reshape(len(ok), 4)
    ddof = 1 if len(ok) > 1 else 0
    moments = {
        name: (float(values[:, k].mean()), float(values[:, k].var(ddof=ddof)))
        for k, name in enumerate(names)
    }
    freq = sum(v for v, _ in ok) / len(ok)
    return SimResult(
        criterion, freq, moments, len(ok), errored, cfg.seed, size, cfg.alpha,
        cfg.distribution.name, warnings,
    )


def run_detection_study(cfg: SimConfig, criterion: Criterion) -> SimResult:
    """Fraction of replicates in which the criterion is tested as violated."""
    return _run(cfg, criterion)


def run_moment_study(cfg: SimConfig, metric: str) -> SimResult:
    """Mean and variance of one estimator across replicates."""
    if metric in POINT_METRICS:
        res = _run(cfg, "separation")
    elif metric in PAIR_METRICS:
        res = _run(cfg, "comparative")
    else:
        raise ValueError(f"unknown metric {metric!r}; choose from {POINT_METRICS + PAIR_METRICS}")
    return SimResult(
        res.criterion, res.detection_frequency, {metric: res.estimator_moments[metric]},
        res.replicate_count, res.errored, res.seed, res.size, res.alpha,
        res.distribution, res.warnings,
    )


def expected_moments(d: JointDistribution, metric: str, size: int) -> tuple[float, float]:
    """Normal-approximation mean and variance ``mu (1 - mu) / E[support]`` of an estimator."""
    if metric in POINT_METRICS:
        r = analytic_group_rates(d)
        a = 1 if metric.endswith("a1") else 0
        mu = r.tpr(a) if metric.startswith("tpr") else r.fpr(a)
        share = {"tpr_a1": r.n_t1, "tpr_a0": r.n_t0, "fpr_a1": r.n_f1, "fpr_a0": r.n_f0}[metric]
    elif metric in PAIR_METRICS:
        gp = (int(metric[4]), int(metric[6]))
        cr = analytic_comparative_rates(d)
        mu, share = cr.tpr[gp], cr.support[gp]
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return mu, mu * (1 - mu) / (share * size)


def binomial_se(p: float, r: int) -> float:
    return math.sqrt(p * (1 - p) / r)
