from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from src.utils.errors import InvalidArgumentError


class SentimentLabel(Enum):
    """Three-class sentiment; values are the stable feature encoding."""
    POSITIVE = 0
    NEGATIVE = 1
    NEUTRAL = 2

    @classmethod
    def parse(cls, value: str) -> "SentimentLabel":
        """Case-insensitive lookup by name."""
        try:
            return cls[str(value).strip().upper()]
        except KeyError as e:
            raise InvalidArgumentError(f"unknown sentiment label: {value!r}") from e


NUM_CLASSES = len(SentimentLabel)
LABELS: Tuple[SentimentLabel, ...] = tuple(SentimentLabel)


@dataclass(frozen=True)
class PredictionRecord:
    """
    One base model's prediction for one example.

    Attributes:
        example_id: example the prediction is for
        model_id: base model that produced it
        label: predicted label
        probabilities: optional class probabilities in label-value order
    """
    example_id: str
    model_id: str
    label: SentimentLabel
    probabilities: Optional[Tuple[float, float, float]] = None
