import unittest

import numpy as np

from src.models.ensemble.labels import LABELS, SentimentLabel
from src.models.evaluation.metrics import confusion_matrix, evaluate, harmonic_mean
from src.utils.errors import InvalidArgumentError

P, N, U = SentimentLabel.POSITIVE, SentimentLabel.NEGATIVE, SentimentLabel.NEUTRAL


class TestEvaluate(unittest.TestCase):

    def test_hand_computed_case(self):
        """Test the six-example confusion case against hand-computed values"""
        report = evaluate([P, P, N, N, U, U], [P, N, N, N, U, P])

        self.assertAlmostEqual(report.accuracy, 4 / 6, delta=1e-9)
        self.assertAlmostEqual(report.per_class[P].precision, 1 / 2, delta=1e-9)
        self.assertAlmostEqual(report.per_class[N].precision, 2 / 3, delta=1e-9)
        self.assertAlmostEqual(report.per_class[U].precision, 1.0, delta=1e-9)
        self.assertAlmostEqual(report.per_class[P].recall, 1 / 2, delta=1e-9)
        self.assertAlmostEqual(report.per_class[N].recall, 1.0, delta=1e-9)
        self.assertAlmostEqual(report.per_class[U].recall, 1 / 2, delta=1e-9)

        macro_precision = (1 / 2 + 2 / 3 + 1) / 3
        macro_recall = (1 / 2 + 1 + 1 / 2) / 3
        self.assertAlmostEqual(report.precision, macro_precision, delta=1e-9)
        self.assertAlmostEqual(report.recall, macro_recall, delta=1e-9)
        self.assertAlmostEqual(
            report.f1, 2 * macro_precision * macro_recall / (macro_precision + macro_recall), delta=1e-9
        )
        self.assertAlmostEqual(report.f1, 0.69333, delta=1e-5)

    def test_confusion_counts(self):
        matrix = confusion_matrix([P, P, N, N, U, U], [P, N, N, N, U, P])
        np.testing.assert_array_equal(matrix.counts, [[1, 1, 0], [0, 2, 0], [1, 0, 1]])
        self.assertEqual(matrix.total, 6)

    def test_perfect_classifier(self):
        truth = [P, N, U, U, N, P]
        report = evaluate(truth, truth)
        self.assertEqual((report.accuracy, report.precision, report.recall, report.f1), (1.0, 1.0, 1.0, 1.0))

    def test_total_misclassification(self):
        """Test that empty denominators score zero"""
        report = evaluate([P] * 5, [N] * 5)
        self.assertEqual((report.accuracy, report.precision, report.recall, report.f1), (0.0, 0.0, 0.0, 0.0))

    def test_label_permutation_invariance(self):
        """Test that relabelling classes consistently leaves the metrics unchanged"""
        rng = np.random.default_rng(6)
        truth = [LABELS[i] for i in rng.integers(0, 3, size=200)]
        predicted = [LABELS[i] for i in rng.integers(0, 3, size=200)]
        base = evaluate(truth, predicted)
        permutation = {P: U, N: P, U: N}
        permuted = evaluate([permutation[t] for t in truth], [permutation[p] for p in predicted])
        for name in ("accuracy", "precision", "recall", "f1", "mean_class_f1"):
            self.assertAlmostEqual(getattr(base, name), getattr(permuted, name), delta=1e-12)

    def test_bounds_and_support(self):
        """Test metric bounds and accuracy as support-weighted recall"""
        rng = np.random.default_rng(8)
        truth = [LABELS[i] for i in rng.integers(0, 3, size=150)]
        predicted = [LABELS[i] for i in rng.integers(0, 3, size=150)]
        report = evaluate(truth, predicted)
        for value in (report.accuracy, report.precision, report.recall, report.f1, report.mean_class_f1):
            self.assertGreaterEqual(value, 0.0)
            self.assertLessEqual(value, 1.0)
        weighted_recall = sum(s.recall * s.support for s in report.per_class.values()) / len(truth)
        self.assertAlmostEqual(report.accuracy, weighted_recall, delta=1e-12)
        self.assertAlmostEqual(report.weighted["recall"], report.accuracy, delta=1e-12)

    def test_to_dict(self):
        data = evaluate([P, N, U], [P, N, N]).to_dict()
        self.assertEqual(set(data["per_class"]), {"POSITIVE", "NEGATIVE", "NEUTRAL"})
        self.assertEqual(data["per_class"]["NEUTRAL"]["support"], 1)
        self.assertEqual(data["confusion"], [[1, 0, 0], [0, 1, 0], [0, 1, 0]])

    def test_invalid(self):
        with self.assertRaises(InvalidArgumentError):
            evaluate([P, N], [P])
        with self.assertRaises(InvalidArgumentError):
            evaluate([], [])

    def test_harmonic_mean(self):
        self.assertEqual(harmonic_mean(0.0, 0.0), 0.0)
        self.assertAlmostEqual(harmonic_mean(0.5, 1.0), 2 / 3)


if __name__ == "__main__":
    unittest.main()
