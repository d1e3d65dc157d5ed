"""Separation and comparative-separation fairness evaluation."""

__version__ = "0.1.0"

from .data import (  # noqa: E402
    GROUP_PAIRS,
    REFERENCE_DISTRIBUTIONS,
    JointDistribution,
    JudgedPair,
    LabeledPoint,
    PairSet,
    PointSet,
    load_distribution,
    load_pair_set,
    load_point_set,
)
from .pairwise import analytic_comparative_rates, build_pairs, estimate_comparative_rates  # noqa: E402
from .pointwise import analytic_group_rates, eod_aod, estimate_group_rates  # noqa: E402
from .power import comparative_power, matched_pair_budget, separation_power  # noqa: E402
from .stats import test_comparative_separation, test_separation, two_proportion_z  # noqa: E402
