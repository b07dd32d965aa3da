"""
Stack1: majority vote over three base classifiers with a designated tiebreaker.
"""
from typing import Sequence

from src.models.ensemble.labels import SentimentLabel
from src.utils.errors import InvalidArgumentError


def majority_vote(preds: Sequence[SentimentLabel], tiebreaker_index: int = 0) -> SentimentLabel:
    """
    Label held by at least two models, else the tiebreaker model's label.

    Args:
        preds: Exactly three predictions, in model order
        tiebreaker_index: Position of the designated model

    Returns:
        The voted label
    """
    if len(preds) != 3:
        raise InvalidArgumentError(f"majority_vote needs exactly 3 predictions, got {len(preds)}")
    if tiebreaker_index not in (0, 1, 2):
        raise InvalidArgumentError(f"tiebreaker_index must be 0, 1 or 2, got {tiebreaker_index}")

    first, second, third = preds
    if first == second or first == third:
        return first
    if second == third:
        return second
    return preds[tiebreaker_index]
