"""
Thompson sampling over Beta-Bernoulli arms.
"""
from typing import Optional, Sequence

import numpy as np

from src.models.bandit.posterior import BanditArm
from src.utils.errors import InvalidArgumentError


def _shape_matrix(arms: Sequence[BanditArm]) -> np.ndarray:
    return np.array([[arm.posterior.a, arm.posterior.b] for arm in arms], dtype=float)


def sample_ctrs(arms: Sequence[BanditArm], rng: np.random.Generator,
                size: Optional[int] = None) -> np.ndarray:
    """
    Draw click-through rates from every arm's posterior.

    Beta variates are built from two Gamma variates, theta = G(a) / (G(a) + G(b)), which holds for
    non-integer shapes. Draws are consumed from the stream draw by draw, arm by arm in list order.

    Args:
        arms: Arms to sample
        rng: Random stream
        size: Number of joint draws; None for a single draw

    Returns:
        Array of shape (len(arms),) or (size, len(arms))
    """
    shapes = _shape_matrix(arms)
    if size is not None:
        shapes = np.broadcast_to(shapes, (size,) + shapes.shape)
    gammas = rng.standard_gamma(shapes)
    successes = gammas[..., 0]
    total = successes + gammas[..., 1]
    # both Gamma variates can underflow for tiny shapes
    return np.divide(successes, total, out=np.full_like(total, 0.5), where=total > 0)


def thompson_select(arms: Sequence[BanditArm], rng: np.random.Generator) -> int:
    """
    Pick the arm whose sampled click-through rate is highest.

    Args:
        arms: Candidate arms, at least one
        rng: Selection stream

    Returns:
        Index of the selected arm
    """
    if not arms:
        raise InvalidArgumentError("thompson_select needs at least one arm")
    return int(np.argmax(sample_ctrs(arms, rng)))
