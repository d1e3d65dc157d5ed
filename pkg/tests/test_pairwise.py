import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compsep.data import CELLS, GROUP_PAIRS, JudgedPair, PairSet, PointSet, reverse_pair
from compsep.pairwise import (
    analytic_comparative_rates,
    build_pairs,
    estimate_comparative_rates,
)
from compsep.pointwise import analytic_group_rates
from compsep.sim import sample_pair_set, sample_point_set

from conftest import (
    comparative_separation_holds,
    distributions,
    from_rates,
    satisfying,
    separation_holds,
    violating,
)

pair_rows = st.lists(
    st.tuples(st.integers(0, 1), st.integers(0, 1), st.sampled_from((-1, 1)), st.sampled_from((-1, 0, 1))),
    min_size=1,
    max_size=200,
)


def literal_rates(sp: PairSet):
    """TP, TN, P, N counted one by one, straight from their definitions."""
    out = {}
    pairs = sp.pairs
    for gp in GROUP_PAIRS:
        rev = reverse_pair(gp)
        tp = sum(1 for p in pairs if p.c_ij == 1 and p.y_ij == 1 and (p.a_i, p.a_j) == gp)
        tn = sum(1 for p in pairs if p.c_ij == -1 and p.y_ij == -1 and (p.a_i, p.a_j) == rev)
        pos = sum(1 for p in pairs if p.y_ij == 1 and (p.a_i, p.a_j) == gp)
        neg = sum(1 for p in pairs if p.y_ij == -1 and (p.a_i, p.a_j) == rev)
        if pos + neg:
            out[gp] = ((tp + tn) / (pos + neg), pos + neg)
    return out


def enumerated_comparative_tpr(d):
    """P(C_ij = 1 | Y_ij = 1, A_ij = a_ij) by summing over all 64 ordered cell pairs."""
    num = {gp: 0.0 for gp in GROUP_PAIRS}
    den = {gp: 0.0 for gp in GROUP_PAIRS}
    for (ci, yi, ai), (cj, yj, aj) in itertools.product(CELLS, repeat=2):
        if np.sign(yi - yj) != 1:
            continue
        w = d.cell(ci, yi, ai) * d.cell(cj, yj, aj)
        den[ai, aj] += w
        if np.sign(ci - cj) == 1:
            num[ai, aj] += w
    return {gp: num[gp] / den[gp] for gp in GROUP_PAIRS}


class TestEstimateComparativeRates:
    def test_hand_example(self):
        sp = PairSet.from_pairs(
            [JudgedPair(1, 0, 1, 1), JudgedPair(0, 1, -1, -1), JudgedPair(1, 0, 1, -1)]
        )
        r = estimate_comparative_rates(sp)
        assert r.tpr[(1, 0)] == pytest.approx(2 / 3)
        assert r.support[(1, 0)] == 3
        assert set(r.tpr) == {(1, 0)}

    def test_perfect_comparative_predictor(self):
        rows = [(ai, aj, y, y) for ai in (0, 1) for aj in (0, 1) for y in (-1, 1)]
        r = estimate_comparative_rates(PairSet(*zip(*rows)))
        assert all(v == 1 for v in r.tpr.values())
        assert len(r.tpr) == 4

    def test_prediction_ties_only_in_denominator(self):
        sp = PairSet.from_pairs([JudgedPair(1, 1, 1, 0), JudgedPair(1, 1, 1, 1)])
        r = estimate_comparative_rates(sp)
        assert r.tpr[(1, 1)] == 0.5 and r.support[(1, 1)] == 2

    @given(pair_rows)
    def test_matches_literal_counts(self, rows):
        sp = PairSet(*map(list, zip(*rows)))
        r = estimate_comparative_rates(sp)
        expected = literal_rates(sp)
        assert set(r.tpr) == set(expected)
        for gp, (rate, support) in expected.items():
            assert r.tpr[gp] == pytest.approx(rate, abs=1e-15)
            assert r.support[gp] == support
        assert sum(r.support.values()) == len(sp)

    @given(pair_rows)
    def test_orientation_flip_invariance(self, rows):
        sp = PairSet(*map(list, zip(*rows)))
        assert estimate_comparative_rates(sp) == estimate_comparative_rates(sp.reversed())


class TestAnalyticComparativeRates:
    def test_theta0(self, ref):
        assert analytic_comparative_rates(ref["f_theta0"]).tpr[(1, 0)] == pytest.approx(0.48, abs=1e-12)

    def test_theta1_cross_gap(self, ref):
        t = analytic_comparative_rates(ref["f_theta1"]).tpr
        assert round(t[1, 0] - t[0, 1], 3) == -0.064

    def test_theta2_within_gap(self, ref):
        t = analytic_comparative_rates(ref["f_theta2"]).tpr
        assert round(t[1, 1] - t[0, 0], 3) == 0.112

    def test_support_is_pair_category_probability(self, ref):
        d = ref["f_theta0"]
        s = analytic_comparative_rates(d).support
        assert s[(1, 0)] == pytest.approx(2 * 0.275 * 0.275)
        # P(Y_i != Y_j) = 2 P(Y=1) P(Y=0)
        p1 = d.marginal(1, 0) + d.marginal(1, 1)
        assert sum(s.values()) == pytest.approx(2 * p1 * (1 - p1))

    @settings(max_examples=1000)
    @given(distributions())
    def test_product_identity(self, d):
        g = analytic_group_rates(d)
        t = analytic_comparative_rates(d).tpr
        for ai, aj in GROUP_PAIRS:
            assert t[ai, aj] == pytest.approx(g.tpr(ai) * g.tnr(aj), rel=1e-12, abs=1e-15)

    @settings(max_examples=200)
    @given(distributions())
    def test_matches_enumeration(self, d):
        t = analytic_comparative_rates(d).tpr
        e = enumerated_comparative_tpr(d)
        for gp in GROUP_PAIRS:
            assert t[gp] == pytest.approx(e[gp], rel=1e-12, abs=1e-15)


class TestBuildPairs:
    def test_two_points(self):
        s = PointSet([1, 0], [1, 0], [1, 0])
        sp = build_pairs(s, 1, rng_seed=0)
        assert len(sp) == 1 and sp.discarded_ties == 0
        p = sp.pairs[0]
        assert p.c_ij == p.y_ij
        assert (p.a_i, p.a_j) == ((1, 0) if p.y_ij == 1 else (0, 1))

    def test_all_ties(self):
        s = PointSet([1] * 10, [0, 1] * 5, [0, 1] * 5)
        sp = build_pairs(s, 100, rng_seed=1)
        assert len(sp) == 0 and sp.discarded_ties == 100

    def test_usable_fraction_about_half(self, ref):
        s = sample_point_set(ref["f_theta0"], 10_000, np.random.default_rng(0))
        sp = build_pairs(s, 2_000, rng_seed=5)
        p1 = s.y.mean()
        expected = 2 * p1 * (1 - p1)
        assert len(sp) + sp.discarded_ties == 2_000
        assert abs(len(sp) / 2_000 - expected) < 3 * np.sqrt(0.25 / 2_000)
        assert abs(expected - 0.5) < 0.01

    def test_deterministic(self, ref):
        s = sample_point_set(ref["f_theta1"], 300, np.random.default_rng(0))
        a, b = build_pairs(s, 500, rng_seed=9), build_pairs(s, 500, rng_seed=9)
        assert a.pairs == b.pairs and a.discarded_ties == b.discarded_ties

    def test_never_pairs_item_with_itself(self):
        # distinct labels everywhere, so a self-pair would show up as a tie
        s = PointSet(np.arange(5.0), np.arange(5.0), [0, 1, 0, 1, 0], mode="continuous")
        sp = build_pairs(s, 1_000, rng_seed=2)
        assert sp.discarded_ties == 0 and len(sp) == 1_000

    def test_exhaustive(self):
        s = PointSet([1, 0, 1, 0], [1, 0, 0, 0], [1, 1, 0, 0])
        sp = build_pairs(s, sampling="all")
        # 6 unordered pairs, 2 of them tie on y
        assert len(sp) == 4 and sp.discarded_ties == 2

    def test_continuous_labels(self):
        s = PointSet([5.0, 2.0, 2.0], [4.5, 3.0, 1.0], [0, 1, 1], mode="continuous")
        sp = build_pairs(s, sampling="all")
        assert len(sp) == 2 and sp.discarded_ties == 1
        assert {(p.y_ij, p.c_ij) for p in sp} == {(1, 1)}

    def test_too_small(self):
        with pytest.raises(ValueError):
            build_pairs(PointSet([1], [1], [1]), 5, 0)


@settings(max_examples=10, deadline=None)
@given(distributions(min_cell=0.03), st.integers(0, 2**32 - 1))
def test_estimator_consistency(d, seed):
    """Large pair samples land within 4 sigma of the analytic bucket rates."""
    n_p = 200_000
    sp = sample_pair_set(d, n_p, np.random.default_rng(seed))
    est = estimate_comparative_rates(sp)
    truth = analytic_comparative_rates(d)
    for gp in GROUP_PAIRS:
        mu = truth.tpr[gp]
        sd = np.sqrt(mu * (1 - mu) / (truth.support[gp] * n_p))
        assert abs(est.tpr[gp] - mu) < 4 * sd + 1e-12


class TestBinaryEquivalence:
    """Separation holds exactly when the four comparative rates coincide."""

    @settings(max_examples=1000)
    @given(distributions())
    def test_random_distributions(self, d):
        assert separation_holds(d) == comparative_separation_holds(d)

    @settings(max_examples=300)
    @given(satisfying())
    def test_separation_implies_comparative(self, d):
        assert separation_holds(d)
        assert comparative_separation_holds(d)

    @settings(max_examples=300)
    @given(violating())
    def test_violation_implies_comparative_violation(self, d):
        assert not separation_holds(d)
        assert not comparative_separation_holds(d)

    def test_reference_distributions(self, ref):
        assert separation_holds(ref["f_theta0"]) and comparative_separation_holds(ref["f_theta0"])
        for name in ("f_theta1", "f_theta2", "f_theta3"):
            assert not separation_holds(ref[name])
            assert not comparative_separation_holds(ref[name])

    def test_zero_tpr_breaks_the_converse(self):
        # a predictor that never says 1 on a positive scores 0 on every pair bucket,
        # whatever its false positive rates, so the rates must stay inside (0, 1)
        d = from_rates((0.0, 0.0), (0.2, 0.4), {(1, 0): 0.25, (1, 1): 0.25, (0, 0): 0.25, (0, 1): 0.25})
        assert comparative_separation_holds(d)
        assert not separation_holds(d)
