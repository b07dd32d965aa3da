import json
import math
import unittest

import numpy as np

from src.models.bandit import (BanditArm, BetaPosterior, ValueRemainingReport,
                               empirical_quantile, record_outcome, sample_ctrs,
                               should_terminate, thompson_select, value_remaining)
from src.utils.config import ExperimentConfig
from src.utils.errors import InvalidArgumentError


def arm_with(arm_id, a, b):
    return BanditArm(id=arm_id, posterior=BetaPosterior(a, b))


class TestBetaPosterior(unittest.TestCase):

    def test_mean(self):
        """Test that the mean is a / (a + b)"""
        self.assertAlmostEqual(BetaPosterior(2, 6).mean(), 0.25)
        self.assertAlmostEqual(BetaPosterior(1, 1).mean(), 0.5)

    def test_rejects_non_positive_parameters(self):
        """Test that a and b must stay positive"""
        with self.assertRaises(InvalidArgumentError):
            BetaPosterior(0, 1)
        with self.assertRaises(InvalidArgumentError):
            BetaPosterior(1, -2)
        with self.assertRaises(InvalidArgumentError):
            BetaPosterior(float("nan"), 1)


class TestBanditArm(unittest.TestCase):

    def test_clicks_cannot_exceed_impressions(self):
        """Test the counter invariant"""
        with self.assertRaises(InvalidArgumentError):
            BanditArm(id="a", posterior=BetaPosterior(1, 1), impressions=2, clicks=3)

    def test_json_state(self):
        """Test that arm state serializes to the documented keys and back"""
        arm = BanditArm(id="arm1", posterior=BetaPosterior(11, 41), impressions=50, clicks=10)
        data = json.loads(json.dumps(arm.to_dict()))
        self.assertEqual(set(data), {"id", "a", "b", "impressions", "clicks"})
        self.assertEqual(BanditArm.from_dict(data), arm)

    def test_ctr(self):
        """Test the empirical click-through rate"""
        arm = BanditArm(id="a", posterior=BetaPosterior(3, 9), impressions=10, clicks=2)
        self.assertAlmostEqual(arm.ctr, 0.2)
        self.assertEqual(BanditArm.new("b").ctr, 0.0)


class TestRecordOutcome(unittest.TestCase):

    def test_click_increments_a(self):
        """Test Beta(1,1) with a click becomes Beta(2,1)"""
        arm = record_outcome(BanditArm.new("a"), True)
        self.assertEqual((arm.posterior.a, arm.posterior.b), (2, 1))
        self.assertEqual((arm.impressions, arm.clicks), (1, 1))

    def test_miss_increments_b(self):
        """Test Beta(5,7) without a click becomes Beta(5,8)"""
        arm = record_outcome(arm_with("a", 5, 7), False)
        self.assertEqual((arm.posterior.a, arm.posterior.b), (5, 8))

    def test_order_independence(self):
        """Test 10 clicks and 40 misses give Beta(11,41) in any order"""
        rng = np.random.default_rng(3)
        outcomes = [True] * 10 + [False] * 40
        for _ in range(5):
            rng.shuffle(outcomes)
            arm = BanditArm.new("a")
            for clicked in outcomes:
                arm = record_outcome(arm, clicked)
            self.assertEqual((arm.posterior.a, arm.posterior.b), (11, 41))
            self.assertEqual((arm.impressions, arm.clicks), (50, 10))

    def test_conjugacy_identity(self):
        """Test posterior minus prior equals clicks and misses exactly"""
        rng = np.random.default_rng(11)
        for _ in range(200):
            prior_a, prior_b = rng.uniform(0.5, 5, size=2)
            arm = BanditArm.new("a", prior_a, prior_b)
            for clicked in rng.random(rng.integers(0, 60)) < rng.random():
                arm = record_outcome(arm, bool(clicked))
            self.assertAlmostEqual(arm.posterior.a, prior_a + arm.clicks, places=9)
            self.assertAlmostEqual(arm.posterior.b, prior_b + (arm.impressions - arm.clicks), places=9)


class TestThompsonSelect(unittest.TestCase):

    def test_empty_arms(self):
        """Test that selecting from no arms is an invalid argument"""
        with self.assertRaises(InvalidArgumentError):
            thompson_select([], np.random.default_rng(0))

    def test_single_arm(self):
        """Test that a single arm is always selected"""
        rng = np.random.default_rng(0)
        for _ in range(20):
            self.assertEqual(thompson_select([arm_with("a", 3, 9)], rng), 0)

    def test_extreme_posteriors(self):
        """Test that a near-certain better arm is chosen almost always"""
        arms = [arm_with("a", 1_000_000, 1), arm_with("b", 1, 1_000_000)]
        rng = np.random.default_rng(5)
        picks = [thompson_select(arms, rng) for _ in range(1000)]
        self.assertGreaterEqual(picks.count(0), 999)

    def test_symmetry(self):
        """Test that identical arms are selected about equally often"""
        arms = [BanditArm.new("a"), BanditArm.new("b")]
        rng = np.random.default_rng(2024)
        picks = np.array([thompson_select(arms, rng) for _ in range(10_000)])
        self.assertAlmostEqual(np.mean(picks == 0), 0.5, delta=0.03)

    def test_symmetry_three_arms(self):
        """Test uniform selection over three identical arms"""
        arms = [arm_with(str(i), 20, 30) for i in range(3)]
        rng = np.random.default_rng(7)
        counts = np.bincount([thompson_select(arms, rng) for _ in range(10_000)], minlength=3)
        for count in counts:
            self.assertAlmostEqual(count / 10_000, 1 / 3, delta=0.03)

    def test_monotone_dominance(self):
        """Test that a stochastically dominating arm is selected at least as often"""
        arms = [arm_with("weak", 5, 11), arm_with("strong", 6, 10)]
        rng = np.random.default_rng(13)
        counts = np.bincount([thompson_select(arms, rng) for _ in range(10_000)], minlength=2)
        self.assertGreaterEqual(counts[1], counts[0])

    def test_sample_shape(self):
        """Test that joint draws have one column per arm and lie in (0, 1)"""
        arms = [arm_with("a", 2, 3), arm_with("b", 0.5, 0.5), arm_with("c", 40, 2)]
        draws = sample_ctrs(arms, np.random.default_rng(1), size=500)
        self.assertEqual(draws.shape, (500, 3))
        self.assertTrue(np.all((draws >= 0) & (draws <= 1)))


class TestValueRemaining(unittest.TestCase):

    def test_needs_two_arms(self):
        """Test that a single arm is rejected"""
        with self.assertRaises(InvalidArgumentError):
            value_remaining([BanditArm.new("a")], 0.05, 1000, np.random.default_rng(0))

    def test_extreme_posteriors(self):
        """Test that a clearly better arm leaves near-zero value remaining"""
        arms = [arm_with("a", 10**7, 1), arm_with("b", 1, 10**7)]
        report = value_remaining(arms, 0.05, 100_000, np.random.default_rng(9))
        self.assertEqual(report.winner_index, 0)
        self.assertLess(report.quantile_value_remaining, 1e-3)

    def test_identical_arms_split_wins(self):
        """Test that identical posteriors share the wins"""
        arms = [arm_with("a", 50, 50), arm_with("b", 50, 50)]
        report = value_remaining(arms, 0.05, 100_000, np.random.default_rng(4))
        for fraction in report.win_fractions:
            self.assertAlmostEqual(fraction, 0.5, delta=0.02)

    def test_report_invariants(self):
        """Test win fractions sum to one and the winner has the largest fraction"""
        arms = [arm_with("a", 29, 1131), arm_with("b", 9, 369), arm_with("c", 3, 80)]
        report = value_remaining(arms, 0.05, 20_000, np.random.default_rng(8))
        self.assertAlmostEqual(sum(report.win_fractions), 1.0, delta=1e-9)
        self.assertEqual(report.win_fractions[report.winner_index], max(report.win_fractions))
        self.assertGreaterEqual(report.quantile_value_remaining, 0.0)
        self.assertFalse(report.terminated)

    def test_determinism(self):
        """Test identical inputs and seed give identical reports"""
        arms = [arm_with("a", 12, 300), arm_with("b", 15, 310)]
        first = value_remaining(arms, 0.05, 10_000, np.random.default_rng(77))
        second = value_remaining(arms, 0.05, 10_000, np.random.default_rng(77))
        self.assertEqual(first, second)

    def test_quantile_matches_full_sort(self):
        """Test the quantile against a naive full sort of the same draws"""
        arms = [arm_with("a", 29, 1131), arm_with("b", 9, 369)]
        for significance, n in ((0.05, 10_000), (0.1, 999), (0.01, 4321)):
            report = value_remaining(arms, significance, n, np.random.default_rng(21))
            thetas = sample_ctrs(arms, np.random.default_rng(21), size=n)
            winner = thetas[:, report.winner_index]
            relative = sorted((thetas.max(axis=1) - winner) / winner)
            expected = relative[math.ceil(round((1 - significance) * n, 9)) - 1]
            self.assertEqual(report.quantile_value_remaining, expected)

    def test_two_arm_state_matches_brute_force(self):
        """Test Beta(29,1131) against Beta(9,369) with an independent brute-force oracle"""
        arms = [arm_with("arm2", 29, 1131), arm_with("arm1", 9, 369)]
        report = value_remaining(arms, 0.05, 100_000, np.random.default_rng(1533))

        oracle_rng = np.random.RandomState(375)
        n = 1_000_000
        thetas = np.column_stack([oracle_rng.beta(29, 1131, n), oracle_rng.beta(9, 369, n)])
        winner = np.argmax(np.bincount(np.argmax(thetas, axis=1), minlength=2))
        relative = np.sort((thetas.max(axis=1) - thetas[:, winner]) / thetas[:, winner])
        oracle = relative[int(math.ceil(0.95 * n)) - 1]

        self.assertEqual(report.winner_index, winner)
        self.assertAlmostEqual(report.quantile_value_remaining, oracle, delta=0.01)


class TestEmpiricalQuantile(unittest.TestCase):

    def test_sorted_index(self):
        """Test the sorted-index convention"""
        values = np.arange(1, 101, dtype=float)[::-1]
        self.assertEqual(empirical_quantile(values, 0.95), 95.0)
        self.assertEqual(empirical_quantile(values, 0.5), 50.0)
        self.assertEqual(empirical_quantile(values, 0.001), 1.0)

    def test_empty(self):
        with self.assertRaises(InvalidArgumentError):
            empirical_quantile(np.array([]), 0.5)


class TestShouldTerminate(unittest.TestCase):

    def setUp(self):
        self.config = ExperimentConfig(burn_in=1500, value_remaining_threshold=0.01)

    def report(self, quantile):
        return ValueRemainingReport(winner_index=0, win_fractions=(0.9, 0.1),
                                    quantile_value_remaining=quantile)

    def test_burn_in_gates_termination(self):
        """Test that nothing stops before burn-in"""
        self.assertFalse(should_terminate(100, self.report(0.0), self.config))

    def test_terminates_below_threshold(self):
        """Test that both conditions met stops the run"""
        self.assertTrue(should_terminate(1500, self.report(0.005), self.config))

    def test_strict_threshold(self):
        """Test the strict inequality"""
        self.assertFalse(should_terminate(1500, self.report(0.011), self.config))
        self.assertFalse(should_terminate(1500, self.report(0.01), self.config))


if __name__ == "__main__":
    unittest.main()
