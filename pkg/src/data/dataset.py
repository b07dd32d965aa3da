"""
Review examples and the preparation pipeline: rating to sentiment mapping, down-sampling to
class balance and the stratified train/test split.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.models.ensemble.labels import LABELS, SentimentLabel
from src.utils.errors import InvalidArgumentError
from src.utils.logging_config import get_logger

logger = get_logger()

# guards the half-up rounding against representation error in count * fraction
_ROUNDING_EPS = 1e-9


@dataclass(frozen=True)
class LabeledExample:
    """
    A review with its sentiment label.

    Attributes:
        example_id: unique id
        text: review text (headline and body joined by a space)
        label: sentiment
        rating: optional 1-5 star rating; when present it determines the label
    """
    example_id: str
    text: str
    label: SentimentLabel
    rating: Optional[int] = None

    def __post_init__(self):
        if self.rating is not None and rating_to_label(self.rating) is not self.label:
            raise InvalidArgumentError(
                f"example {self.example_id}: label {self.label.name} contradicts rating {self.rating}"
            )


@dataclass(frozen=True)
class SplitDataset:
    train: List[LabeledExample]
    test: List[LabeledExample]
    split_seed: int


def rating_to_label(rating: int) -> SentimentLabel:
    """
    Ratings 4 and 5 are POSITIVE, 1 and 2 NEGATIVE, 3 NEUTRAL.
    """
    if isinstance(rating, bool) or not isinstance(rating, (int, np.integer)) or not 1 <= rating <= 5:
        raise InvalidArgumentError(f"rating must be an integer from 1 to 5, got {rating!r}")
    if rating >= 4:
        return SentimentLabel.POSITIVE
    if rating <= 2:
        return SentimentLabel.NEGATIVE
    return SentimentLabel.NEUTRAL


def group_by_label(examples: Sequence[LabeledExample]) -> Dict[SentimentLabel, List[LabeledExample]]:
    """Examples per label, in label order, each group keeping input order."""
    groups: Dict[SentimentLabel, List[LabeledExample]] = {label: [] for label in LABELS}
    for example in examples:
        groups[example.label].append(example)
    return groups


def class_counts(examples: Sequence[LabeledExample]) -> Dict[SentimentLabel, int]:
    return {label: len(group) for label, group in group_by_label(examples).items()}


def _require_all_classes(groups: Dict[SentimentLabel, List[LabeledExample]]) -> None:
    absent = [label.name for label, group in groups.items() if not group]
    if absent:
        raise InvalidArgumentError(f"no examples for class {', '.join(absent)}")


def downsample_balance(examples: Sequence[LabeledExample], seed: int) -> List[LabeledExample]:
    """
    Reduce every class to the minority-class count.

    Within each class a seeded uniform sample without replacement is kept; classes are emitted in
    label order.

    Args:
        examples: Input examples, every class present
        seed: Sampling seed

    Returns:
        Balanced example list
    """
    groups = group_by_label(examples)
    _require_all_classes(groups)
    target = min(len(group) for group in groups.values())
    rng = np.random.default_rng(seed)

    balanced: List[LabeledExample] = []
    for group in groups.values():
        keep = rng.choice(len(group), size=target, replace=False)
        balanced.extend(group[i] for i in keep)

    logger.info(f"Down-sampled {len(examples)} examples to {len(balanced)} ({target} per class)")
    return balanced


def test_count(count: int, test_fraction: float) -> int:
    """Round-half-up share of a class that goes to test."""
    return int(math.floor(count * test_fraction + 0.5 + _ROUNDING_EPS))


def stratified_split(examples: Sequence[LabeledExample], test_fraction: float, seed: int) -> SplitDataset:
    """
    Per-class split; each class sends round-half-up(count * test_fraction) examples to test.

    Args:
        examples: Input examples, every class present
        test_fraction: Fraction of each class going to test, in (0, 1)
        seed: Shuffle seed

    Returns:
        SplitDataset
    """
    if not 0 < test_fraction < 1:
        raise InvalidArgumentError(f"test_fraction must be in (0, 1), got {test_fraction}")
    groups = group_by_label(examples)
    _require_all_classes(groups)
    rng = np.random.default_rng(seed)

    train: List[LabeledExample] = []
    test: List[LabeledExample] = []
    for group in groups.values():
        order = rng.permutation(len(group))
        n_test = test_count(len(group), test_fraction)
        test.extend(group[i] for i in order[:n_test])
        train.extend(group[i] for i in order[n_test:])

    logger.debug(f"Stratified split: {len(train)} train, {len(test)} test")
    return SplitDataset(train=train, test=test, split_seed=seed)


def stacking_split(train: Sequence[LabeledExample], fraction: float,
                   seed: int) -> Tuple[List[LabeledExample], List[LabeledExample]]:
    """
    Split the training portion into base-model and meta-learner partitions.

    Args:
        train: Training examples
        fraction: Share of each class reserved for meta-learner training
        seed: Split seed

    Returns:
        (base-model partition, meta-learner partition)
    """
    split = stratified_split(train, fraction, seed)
    return split.train, split.test
