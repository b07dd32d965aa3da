"""
Synthetic reviews and synthetic base classifiers for desk-scale testing.
"""
from typing import Dict, List, Mapping, Sequence, Union

import numpy as np

from src.data.dataset import LabeledExample
from src.models.ensemble.labels import LABELS, NUM_CLASSES, PredictionRecord, SentimentLabel
from src.utils.config import SyntheticModelConfig
from src.utils.errors import InvalidArgumentError
from src.utils.rng import spawn_streams

_RATINGS = {
    SentimentLabel.POSITIVE: (4, 5),
    SentimentLabel.NEGATIVE: (1, 2),
    SentimentLabel.NEUTRAL: (3,),
}


def _as_label(value: Union[str, SentimentLabel]) -> SentimentLabel:
    return value if isinstance(value, SentimentLabel) else SentimentLabel.parse(value)


def generate_synthetic_reviews(class_counts: Mapping[Union[str, SentimentLabel], int],
                               seed: int) -> List[LabeledExample]:
    """
    Placeholder reviews with exactly the requested label counts.

    Ratings are drawn consistent with the label; the list is shuffled and ids follow the
    shuffled order.

    Args:
        class_counts: Examples per label
        seed: Generation seed
    """
    counts = {_as_label(label): int(count) for label, count in class_counts.items()}
    if any(count < 0 for count in counts.values()):
        raise InvalidArgumentError("class counts must be non-negative")

    rng = np.random.default_rng(seed)
    drawn = []
    for label in LABELS:
        for _ in range(counts.get(label, 0)):
            drawn.append((label, int(rng.choice(_RATINGS[label]))))

    order = rng.permutation(len(drawn))
    return [
        LabeledExample(example_id=f"r{position:06d}", text=f"placeholder review {position}",
                       label=drawn[index][0], rating=drawn[index][1])
        for position, index in enumerate(order)
    ]


def _error_rows(spec: SyntheticModelConfig) -> np.ndarray:
    """Per true label, the distribution of the wrong label."""
    rows = np.zeros((NUM_CLASSES, NUM_CLASSES))
    for truth in LABELS:
        bias: Dict[str, float] = spec.confusion_bias.get(truth.name, {})
        for wrong in LABELS:
            if wrong is not truth:
                rows[truth.value, wrong.value] = bias.get(wrong.name, 1.0 if not bias else 0.0)
        if rows[truth.value].sum() == 0:
            rows[truth.value] = [0.0 if label is truth else 1.0 for label in LABELS]
        rows[truth.value] /= rows[truth.value].sum()
    return rows


def _error_cdf(spec: SyntheticModelConfig) -> np.ndarray:
    """
    Per true label, the cumulative distribution of the wrong label.

    Entries from the last wrong label with positive weight onwards are exactly 1.0, so a draw in
    [0, 1) always lands on a wrong label with positive weight.
    """
    rows = _error_rows(spec)
    cdf = np.cumsum(rows, axis=1)
    for truth in range(NUM_CLASSES):
        last = np.flatnonzero(rows[truth] > 0)[-1]
        cdf[truth, last:] = 1.0
    return cdf


def _draw_wrong(cdf: np.ndarray, truth: np.ndarray, draws: np.ndarray) -> np.ndarray:
    """Inverse-CDF lookup of the wrong label for each true label."""
    return (draws[:, None] >= cdf[truth]).sum(axis=1)


def generate_synthetic_predictions(examples: Sequence[LabeledExample],
                                   model_specs: Sequence[SyntheticModelConfig], seed: int,
                                   emit_probabilities: bool = False) -> List[PredictionRecord]:
    """
    Predictions of synthetic base models with independent errors.

    Each model is right with probability equal to its accuracy; otherwise it emits a wrong label
    drawn from its confusion bias. Every model has its own random stream.

    Args:
        examples: Examples to predict
        model_specs: Model ids, accuracies and confusion biases
        seed: Master seed
        emit_probabilities: Attach class probabilities with a random confidence on the predicted label

    Returns:
        Records grouped by model, in example order within a model
    """
    ids = [spec.id for spec in model_specs]
    if len(set(ids)) != len(ids):
        raise InvalidArgumentError(f"synthetic model ids must be unique, got {ids}")

    truth = np.array([example.label.value for example in examples], dtype=int)
    streams = spawn_streams(seed, ids)
    records: List[PredictionRecord] = []

    for spec in model_specs:
        rng = streams[spec.id]
        correct = rng.random(len(truth)) < spec.accuracy
        wrong = _draw_wrong(_error_cdf(spec), truth, rng.random(len(truth)))
        predicted = np.where(correct, truth, wrong)

        confidence = rng.uniform(0.4, 1.0, size=len(truth)) if emit_probabilities else None
        for i, example in enumerate(examples):
            probabilities = None
            if confidence is not None:
                rest = (1.0 - confidence[i]) / (NUM_CLASSES - 1)
                probabilities = tuple(float(confidence[i]) if c == predicted[i] else float(rest)
                                      for c in range(NUM_CLASSES))
            records.append(PredictionRecord(example_id=example.example_id, model_id=spec.id,
                                            label=LABELS[int(predicted[i])],
                                            probabilities=probabilities))
    return records
