"""
Classification metrics for the three-class sentiment task.

Report-level precision and recall are macro averages; report-level F1 is the harmonic mean of
those two. The mean of the per-class F1 scores and support-weighted averages are reported too.
"""
from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np
from sklearn.metrics import confusion_matrix as sk_confusion_matrix
from sklearn.metrics import precision_recall_fscore_support

from src.models.ensemble.labels import LABELS, SentimentLabel
from src.utils.errors import InvalidArgumentError

_LABEL_VALUES = [label.value for label in LABELS]


def harmonic_mean(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


@dataclass(frozen=True)
class ConfusionMatrix:
    """3x3 counts, rows are true labels and columns predicted labels."""
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_list(self):
        return self.counts.tolist()


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    """
    Attributes:
        accuracy: trace over total
        precision: macro precision
        recall: macro recall
        f1: harmonic mean of macro precision and macro recall
        per_class: per label precision, recall, f1 and support
        mean_class_f1: unweighted mean of the per-class F1 scores
        weighted: support-weighted precision, recall and f1
        confusion: the underlying confusion matrix
    """
    accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: Dict[SentimentLabel, ClassScores]
    mean_class_f1: float
    weighted: Dict[str, float]
    confusion: ConfusionMatrix

    def to_dict(self) -> Dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_class": {
                label.name: {
                    "precision": scores.precision,
                    "recall": scores.recall,
                    "f1": scores.f1,
                    "support": scores.support,
                }
                for label, scores in self.per_class.items()
            },
            "mean_class_f1": self.mean_class_f1,
            "weighted": dict(self.weighted),
            "confusion": self.confusion.to_list(),
        }


def _validate(truth: Sequence[SentimentLabel], predicted: Sequence[SentimentLabel]) -> None:
    if len(truth) != len(predicted):
        raise InvalidArgumentError(
            f"truth and predicted differ in length ({len(truth)} vs {len(predicted)})"
        )
    if len(truth) == 0:
        raise InvalidArgumentError("cannot evaluate an empty prediction set")


def confusion_matrix(truth: Sequence[SentimentLabel], predicted: Sequence[SentimentLabel]) -> ConfusionMatrix:
    _validate(truth, predicted)
    counts = sk_confusion_matrix([t.value for t in truth], [p.value for p in predicted],
                                 labels=_LABEL_VALUES)
    return ConfusionMatrix(counts=counts)


def evaluate(truth: Sequence[SentimentLabel], predicted: Sequence[SentimentLabel]) -> EvalReport:
    """
    Accuracy, macro precision/recall, F1 and per-class scores.

    Empty precision or recall denominators score 0.

    Args:
        truth: True labels
        predicted: Predicted labels, same length

    Returns:
        EvalReport
    """
    matrix = confusion_matrix(truth, predicted)
    y_true = [t.value for t in truth]
    y_pred = [p.value for p in predicted]
    precision, recall, f1, support = precision_recall_fscore_support(
        y_true, y_pred, labels=_LABEL_VALUES, average=None, zero_division=0
    )

    macro_precision = float(np.mean(precision))
    macro_recall = float(np.mean(recall))
    w_precision, w_recall, w_f1, _ = precision_recall_fscore_support(
        y_true, y_pred, labels=_LABEL_VALUES, average="weighted", zero_division=0
    )

    return EvalReport(
        accuracy=float(np.trace(matrix.counts)) / matrix.total,
        precision=macro_precision,
        recall=macro_recall,
        f1=harmonic_mean(macro_precision, macro_recall),
        per_class={
            label: ClassScores(float(precision[i]), float(recall[i]), float(f1[i]), int(support[i]))
            for i, label in enumerate(LABELS)
        },
        mean_class_f1=float(np.mean(f1)),
        weighted={"precision": float(w_precision), "recall": float(w_recall), "f1": float(w_f1)},
        confusion=matrix,
    )
