import functools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from compsep.data import REFERENCE_DISTRIBUTIONS, JointDistribution

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance_lines: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): one exit criterion, reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _acceptance_lines.append(f"[{status}] {marker.args[0]}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def ref():
    return REFERENCE_DISTRIBUTIONS


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@st.composite
def distributions(draw, min_cell=1e-3):
    """Random valid joint distributions with every cell at least ``min_cell`` before normalizing."""
    raw = draw(
        st.lists(st.floats(min_value=min_cell, max_value=1.0), min_size=8, max_size=8)
    )
    p = np.array(raw)
    return JointDistribution(p / p.sum())


def from_rates(tpr, fpr, strata) -> JointDistribution:
    """Distribution with the given per-group TPR/FPR and (y, a) stratum masses.

    ``tpr``/``fpr`` are indexed by group, ``strata[(y, a)]`` must sum to 1.
    """
    cells = {}
    for a in (0, 1):
        cells[(1, 1, a)] = tpr[a] * strata[(1, a)]
        cells[(0, 1, a)] = (1 - tpr[a]) * strata[(1, a)]
        cells[(1, 0, a)] = fpr[a] * strata[(0, a)]
        cells[(0, 0, a)] = (1 - fpr[a]) * strata[(0, a)]
    return JointDistribution.from_cells(cells)


EXACT = 1e-12


def separation_holds(d: JointDistribution) -> bool:
    from compsep.pointwise import analytic_group_rates

    g = analytic_group_rates(d)
    return abs(g.tpr_a1 - g.tpr_a0) <= EXACT and abs(g.fpr_a1 - g.fpr_a0) <= EXACT


def comparative_separation_holds(d: JointDistribution) -> bool:
    from compsep.pairwise import analytic_comparative_rates

    t = list(analytic_comparative_rates(d).tpr.values())
    return max(t) - min(t) <= EXACT


rate = st.floats(min_value=0.01, max_value=0.99)
mass = st.floats(min_value=0.01, max_value=1.0)


@st.composite
def strata(draw):
    raw = [draw(mass) for _ in range(4)]
    total = sum(raw)
    return {k: v / total for k, v in zip(((1, 0), (1, 1), (0, 0), (0, 1)), raw)}


@st.composite
def satisfying(draw):
    """Distributions with identical group rates and arbitrary stratum masses."""
    t, f = draw(rate), draw(rate)
    return from_rates((t, t), (f, f), draw(strata()))


@st.composite
def violating(draw):
    """Distributions where at least one of TPR, FPR differs across groups by >= 0.005."""
    tpr, fpr = [draw(rate), draw(rate)], [draw(rate), draw(rate)]
    which = draw(st.sampled_from(("tpr", "fpr", "both")))
    gap = draw(st.floats(0.005, 0.5)) * draw(st.sampled_from((-1, 1)))
    for name, r in (("tpr", tpr), ("fpr", fpr)):
        if which in (name, "both"):
            r[1] = min(max(r[0] + gap, 0.001), 0.999)
            if abs(r[1] - r[0]) < 0.005:
                r[1] = r[0] - gap
    return from_rates(tuple(tpr), tuple(fpr), draw(strata()))


# detection probabilities for (separation n=1000, n=2000, comparative n_p=2000, n_p=4000)
EXPECTED_DETECTION = {
    "f_theta0": (0.0975, 0.0975, 0.0975, 0.0975),
    "f_theta1": (0.4743, 0.7464, 0.5032, 0.7692),
    "f_theta2": (0.7800, 0.9682, 0.7274, 0.9484),
    "f_theta3": (0.7890, 0.9712, 0.8232, 0.9813),
}
DETECTION_SIZES = (("separation", 1000), ("separation", 2000), ("comparative", 2000), ("comparative", 4000))


STUDY_SEED = 20261016


@functools.lru_cache(maxsize=None)
def cached_study(name: str, criterion: str, size: int, replicates: int = 10_000, alpha: float = 0.05):
    """Monte Carlo detection study on a reference distribution, shared across test modules."""
    from compsep.sim import SimConfig, run_detection_study

    key = "n" if criterion == "separation" else "n_p"
    cfg = SimConfig(REFERENCE_DISTRIBUTIONS[name], replicates=replicates, alpha=alpha,
                    seed=STUDY_SEED, **{key: size})
    return run_detection_study(cfg, criterion)
