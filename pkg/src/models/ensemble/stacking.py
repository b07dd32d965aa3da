"""
Stacking over the three base classifiers: feature encoding and the Stack1/Stack2 predictors.
"""
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.models.ensemble.labels import LABELS, NUM_CLASSES, PredictionRecord, SentimentLabel
from src.models.ensemble.meta_learner import MetaLearnerModel, predict_proba
from src.models.ensemble.voting import majority_vote
from src.utils.errors import DataIntegrityError, InvalidArgumentError

FEATURE_ENCODINGS = ("one_hot", "probabilities")


class StackMode(Enum):
    STACK1 = "stack1"
    STACK2 = "stack2"

    @classmethod
    def parse(cls, value: str) -> "StackMode":
        try:
            return cls(str(value).strip().lower())
        except ValueError as e:
            raise InvalidArgumentError(f"unknown stacking mode: {value!r}") from e


class PredictionSet:
    """Base-model predictions indexed by (example_id, model_id)."""

    def __init__(self, records: Iterable[PredictionRecord]):
        self._records: Dict[Tuple[str, str], PredictionRecord] = {}
        duplicates = []
        for record in records:
            key = (record.example_id, record.model_id)
            if key in self._records:
                duplicates.append(record.example_id)
            self._records[key] = record
        if duplicates:
            raise DataIntegrityError(
                f"duplicate (example_id, model_id) predictions for: {', '.join(duplicates[:10])}",
                duplicates,
            )

    def __len__(self):
        return len(self._records)

    def get(self, example_id: str, model_id: str) -> PredictionRecord:
        try:
            return self._records[(example_id, model_id)]
        except KeyError:
            raise DataIntegrityError(
                f"missing base prediction for example {example_id} from model {model_id}",
                [example_id],
            ) from None

    def labels_for(self, example_id: str, model_order: Sequence[str]) -> Tuple[SentimentLabel, ...]:
        return tuple(self.get(example_id, model_id).label for model_id in model_order)

    def missing(self, example_ids: Iterable[str], model_order: Sequence[str]) -> List[str]:
        """Example ids lacking a prediction from at least one model."""
        return [example_id for example_id in example_ids
                if any((example_id, model_id) not in self._records for model_id in model_order)]


def encode_features(preds: Sequence[SentimentLabel]) -> np.ndarray:
    """
    Concatenated one-hot blocks, one block of length 3 per model in model order.
    """
    if len(preds) != 3:
        raise InvalidArgumentError(f"encode_features needs exactly 3 predictions, got {len(preds)}")
    features = np.zeros(len(preds) * NUM_CLASSES)
    for position, label in enumerate(preds):
        features[position * NUM_CLASSES + label.value] = 1.0
    return features


def encode_probabilities(probabilities: Sequence[Sequence[float]]) -> np.ndarray:
    """Raw class probabilities of the three models, concatenated in model order."""
    if len(probabilities) != 3 or any(len(p) != NUM_CLASSES for p in probabilities):
        raise InvalidArgumentError("encode_probabilities needs 3 probability vectors of length 3")
    return np.concatenate([np.asarray(p, dtype=float) for p in probabilities])


def build_features(predictions: PredictionSet, example_ids: Sequence[str], model_order: Sequence[str],
                   encoding: str = "one_hot") -> np.ndarray:
    """
    Feature matrix for the meta-learner, one row per example id.
    """
    if encoding not in FEATURE_ENCODINGS:
        raise InvalidArgumentError(f"unknown feature encoding: {encoding!r}")
    rows = []
    for example_id in example_ids:
        if encoding == "one_hot":
            rows.append(encode_features(predictions.labels_for(example_id, model_order)))
            continue
        records = [predictions.get(example_id, model_id) for model_id in model_order]
        without = [r.model_id for r in records if r.probabilities is None]
        if without:
            raise DataIntegrityError(
                f"example {example_id} has no probabilities from {', '.join(without)}", [example_id]
            )
        rows.append(encode_probabilities([r.probabilities for r in records]))
    return np.vstack(rows) if rows else np.zeros((0, len(model_order) * NUM_CLASSES))


def stack_predict(mode: StackMode, predictions: PredictionSet, example_ids: Sequence[str],
                  model_order: Sequence[str], model: Optional[MetaLearnerModel] = None,
                  tiebreaker_index: int = 0, encoding: str = "one_hot") -> List[SentimentLabel]:
    """
    Ensemble label for every example.

    Args:
        mode: STACK1 (majority vote) or STACK2 (meta-learner)
        predictions: Base-model predictions
        example_ids: Examples to label, output follows this order
        model_order: The three base model ids; fixes vote positions and feature blocks
        model: Trained meta-learner, required for STACK2
        tiebreaker_index: Position of the designated model for STACK1
        encoding: Feature encoding for STACK2

    Returns:
        One label per example id
    """
    if len(model_order) != 3:
        raise InvalidArgumentError("stacking needs exactly three base models")
    missing = predictions.missing(example_ids, model_order)
    if missing:
        raise DataIntegrityError(
            f"missing base prediction for example {missing[0]}"
            + (f" and {len(missing) - 1} more" if len(missing) > 1 else ""),
            missing,
        )

    if mode is StackMode.STACK1:
        return [majority_vote(predictions.labels_for(example_id, model_order), tiebreaker_index)
                for example_id in example_ids]

    if model is None:
        raise InvalidArgumentError("STACK2 requires a trained meta-learner")
    if not example_ids:
        return []
    probs = predict_proba(model, build_features(predictions, example_ids, model_order, encoding))
    return [LABELS[int(index)] for index in np.argmax(probs, axis=1)]
