"""
Seeded random streams.

Every stochastic component draws from its own ``numpy.random.Generator`` derived from a single
master seed, so that e.g. changing the Monte-Carlo sample count never perturbs the user arrival
and click sequence.
"""
from typing import Dict, Sequence

import numpy as np

BANDIT_STREAMS = ("selection", "click", "value_remaining")


def spawn_streams(seed: int, names: Sequence[str]) -> Dict[str, np.random.Generator]:
    """
    Derive one independent generator per name from a master seed.

    The mapping depends only on the seed and the position of each name, never on how many
    draws another stream consumes.

    Args:
        seed: Master seed (non-negative, up to 64 bits)
        names: Stream names, in a fixed order

    Returns:
        Dictionary of stream name to generator
    """
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}


def bandit_streams(seed: int) -> Dict[str, np.random.Generator]:
    """Streams used by a single bandit run: selection, click and value_remaining."""
    return spawn_streams(seed, BANDIT_STREAMS)
