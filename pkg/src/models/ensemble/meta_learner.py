"""
Stack2 meta-learner: multinomial logistic regression trained by full-batch gradient descent.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from src.models.ensemble.labels import LABELS, NUM_CLASSES, SentimentLabel
from src.utils.config import MetaLearnerConfig
from src.utils.errors import InvalidArgumentError, NumericalFailureError
from src.utils.logging_config import get_logger

logger = get_logger()


@dataclass
class MetaLearnerModel:
    """
    Weights of the meta-learner.

    Attributes:
        weights: (num_classes, feature_dim + 1) matrix, last column is the bias
        feature_dim: length of the input feature vector
        hyperparams: training hyperparameters
        loss_history: training loss before every update, then at the final weights
    """
    weights: np.ndarray
    feature_dim: int
    hyperparams: MetaLearnerConfig = field(default_factory=MetaLearnerConfig)
    loss_history: List[float] = field(default_factory=list)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (NUM_CLASSES, self.feature_dim + 1):
            raise InvalidArgumentError(
                f"weights must have shape ({NUM_CLASSES}, {self.feature_dim + 1}), got {self.weights.shape}"
            )
        if not np.all(np.isfinite(self.weights)):
            raise NumericalFailureError("meta-learner weights must be finite")

    @classmethod
    def zeros(cls, feature_dim: int) -> "MetaLearnerModel":
        return cls(weights=np.zeros((NUM_CLASSES, feature_dim + 1)), feature_dim=feature_dim)

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1] if self.loss_history else math.nan

    @property
    def training_meta(self) -> Dict[str, Any]:
        return {
            "epochs": self.hyperparams.epochs,
            "learning_rate": self.hyperparams.learning_rate,
            "final_loss": self.final_loss,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feature_dim": self.feature_dim,
            "weights": self.weights.tolist(),
            "hyperparams": self.hyperparams.model_dump(),
            "training_meta": self.training_meta,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MetaLearnerModel":
        try:
            return cls(
                weights=np.asarray(data["weights"], dtype=float),
                feature_dim=int(data["feature_dim"]),
                hyperparams=MetaLearnerConfig(**data.get("hyperparams", {})),
            )
        except KeyError as e:
            raise InvalidArgumentError(f"model file is missing field {e}") from e


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def _with_bias(features: np.ndarray) -> np.ndarray:
    return np.hstack([features, np.ones((features.shape[0], 1))])


def one_hot_targets(labels: Sequence[SentimentLabel]) -> np.ndarray:
    targets = np.zeros((len(labels), NUM_CLASSES))
    targets[np.arange(len(labels)), [label.value for label in labels]] = 1.0
    return targets


def loss_and_gradient(weights: np.ndarray, features: np.ndarray, targets: np.ndarray,
                      l2_penalty: float) -> Tuple[float, np.ndarray]:
    """
    Mean cross-entropy plus an L2 penalty on the non-bias weights, and its gradient.

    Args:
        weights: (num_classes, feature_dim + 1)
        features: (n, feature_dim)
        targets: (n, num_classes) one-hot rows
        l2_penalty: penalty strength; the term is l2 / 2 * ||W_no_bias||^2

    Returns:
        (loss, gradient with the shape of weights)
    """
    inputs = _with_bias(features)
    n = inputs.shape[0]
    logits = inputs @ weights.T
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    probs = np.exp(log_probs)

    penalised = weights[:, :-1]
    loss = -np.sum(targets * log_probs) / n + 0.5 * l2_penalty * np.sum(penalised * penalised)

    gradient = (probs - targets).T @ inputs / n
    gradient[:, :-1] += l2_penalty * penalised
    return float(loss), gradient


def train_meta_learner(features: np.ndarray, labels: Sequence[SentimentLabel],
                       hyperparams: MetaLearnerConfig = None) -> MetaLearnerModel:
    """
    Fit the meta-learner by full-batch gradient descent from zero weights.

    Zero initialisation makes the run deterministic; the seed in hyperparams is kept for
    stochastic variants.

    Args:
        features: (n, feature_dim) encoded base-model outputs
        labels: n true labels
        hyperparams: learning rate, epochs, L2 penalty and seed

    Returns:
        Trained MetaLearnerModel with its loss history
    """
    hyperparams = hyperparams or MetaLearnerConfig()
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[0] == 0:
        raise InvalidArgumentError("training set must be a non-empty 2-D feature matrix")
    if features.shape[0] != len(labels):
        raise InvalidArgumentError(
            f"feature rows ({features.shape[0]}) and labels ({len(labels)}) differ in length"
        )
    if len(labels) < NUM_CLASSES:
        raise InvalidArgumentError(f"training set needs at least {NUM_CLASSES} examples")

    targets = one_hot_targets(labels)
    feature_dim = features.shape[1]
    weights = np.zeros((NUM_CLASSES, feature_dim + 1))
    history: List[float] = []

    for epoch in range(hyperparams.epochs + 1):
        loss, gradient = loss_and_gradient(weights, features, targets, hyperparams.l2_penalty)
        if not math.isfinite(loss) or not np.all(np.isfinite(gradient)):
            msg = f"meta-learner loss became non-finite at epoch {epoch}"
            logger.error(msg)
            raise NumericalFailureError(msg)
        history.append(loss)
        if epoch < hyperparams.epochs:
            weights = weights - hyperparams.learning_rate * gradient

    logger.debug(f"Meta-learner trained on {len(labels)} examples, final loss {history[-1]:.6f}")
    return MetaLearnerModel(weights=weights, feature_dim=feature_dim, hyperparams=hyperparams,
                            loss_history=history)


def predict_proba(model: MetaLearnerModel, features: np.ndarray) -> np.ndarray:
    """Class probabilities for a (n, feature_dim) matrix."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if features.shape[1] != model.feature_dim:
        raise InvalidArgumentError(
            f"feature length {features.shape[1]} does not match model feature_dim {model.feature_dim}"
        )
    return softmax(_with_bias(features) @ model.weights.T)


def predict_meta(model: MetaLearnerModel, features: np.ndarray) -> Tuple[SentimentLabel, np.ndarray]:
    """
    Predict one example.

    Args:
        model: Trained meta-learner
        features: Feature vector of length model.feature_dim

    Returns:
        (argmax label with ties to the lowest class index, class probabilities)
    """
    features = np.asarray(features, dtype=float)
    if features.ndim != 1:
        raise InvalidArgumentError("predict_meta takes a single feature vector")
    probs = predict_proba(model, features)[0]
    return LABELS[int(np.argmax(probs))], probs
