"""
Monte-Carlo value-remaining stopping rule.

The posterior is sampled many times; each draw says which arm would be best and how much better
it is than the overall winner. The experiment may stop once, in (1 - significance) of the draws,
the winner leaves less than the threshold of its own value on the table.
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from src.models.bandit.posterior import BanditArm
from src.models.bandit.thompson import sample_ctrs
from src.utils.config import ExperimentConfig
from src.utils.errors import InvalidArgumentError

# guards ceil() against representation error in level * n
_QUANTILE_EPS = 1e-9


@dataclass(frozen=True)
class ValueRemainingReport:
    """
    Outcome of one Monte-Carlo termination check.

    Attributes:
        winner_index: arm winning the largest share of draws (ties to the lowest index)
        win_fractions: share of draws won by each arm
        quantile_value_remaining: (1 - significance)-quantile of the relative value remaining
        terminated: whether the caller's stopping rule fired on this report
    """
    winner_index: int
    win_fractions: Tuple[float, ...]
    quantile_value_remaining: float
    terminated: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "winner_index": self.winner_index,
            "win_fractions": list(self.win_fractions),
            "quantile_value_remaining": self.quantile_value_remaining,
            "terminated": self.terminated,
        }


def empirical_quantile(values: np.ndarray, level: float) -> float:
    """
    Sorted-index empirical quantile: element ceil(level * n) - 1 of the sorted values.

    Args:
        values: One-dimensional sample
        level: Quantile level in (0, 1)
    """
    n = len(values)
    if n == 0:
        raise InvalidArgumentError("cannot take the quantile of an empty sample")
    k = math.ceil(level * n - _QUANTILE_EPS) - 1
    k = min(max(k, 0), n - 1)
    return float(np.partition(values, k)[k])


def value_remaining(arms: Sequence[BanditArm], significance: float, mc_samples: int,
                    rng: np.random.Generator) -> ValueRemainingReport:
    """
    Estimate how much value is left by stopping now with the current winner.

    Args:
        arms: At least two arms
        significance: The alpha of the stopping rule, in (0, 1)
        mc_samples: Number of joint posterior draws
        rng: Value-remaining stream

    Returns:
        ValueRemainingReport with terminated left False
    """
    if len(arms) < 2:
        raise InvalidArgumentError("value_remaining needs at least 2 arms")
    if mc_samples < 1:
        raise InvalidArgumentError(f"mc_samples must be positive, got {mc_samples}")
    if not 0 < significance < 1:
        raise InvalidArgumentError(f"significance must be in (0, 1), got {significance}")

    thetas = sample_ctrs(arms, rng, size=mc_samples)
    draw_winners = np.argmax(thetas, axis=1)
    wins = np.bincount(draw_winners, minlength=len(arms))
    winner = int(np.argmax(wins))

    theta_winner = thetas[:, winner]
    shortfall = thetas.max(axis=1) - theta_winner
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(theta_winner > 0, shortfall / theta_winner,
                            np.where(shortfall > 0, np.inf, 0.0))

    return ValueRemainingReport(
        winner_index=winner,
        win_fractions=tuple(float(w) for w in wins / mc_samples),
        quantile_value_remaining=empirical_quantile(relative, 1.0 - significance),
    )


def should_terminate(iteration: int, report: ValueRemainingReport, config: ExperimentConfig) -> bool:
    """Burn-in gate plus a strict threshold on the value-remaining quantile."""
    return (iteration >= config.burn_in
            and report.quantile_value_remaining < config.value_remaining_threshold)
