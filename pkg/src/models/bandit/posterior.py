"""
Beta-Bernoulli arm state.

Each arm's click-through rate is unknown and believed to follow a Beta distribution; every
impression updates that belief by conjugacy.
"""
import math
from dataclasses import dataclass, replace
from typing import Any, Dict

from src.utils.errors import InvalidArgumentError


@dataclass(frozen=True)
class BetaPosterior:
    """
    Conjugate posterior over an arm's click-through rate.

    Attributes:
        a: prior successes plus observed clicks
        b: prior failures plus observed non-clicks
    """
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.a <= 0 or self.b <= 0:
            raise InvalidArgumentError(f"Beta parameters must be positive, got a={self.a}, b={self.b}")

    def mean(self) -> float:
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class BanditArm:
    """
    One strategy in a bandit experiment: its posterior and its traffic counters.

    Attributes:
        id: arm identifier
        posterior: current Beta belief
        impressions: users assigned to the arm
        clicks: users who clicked
    """
    id: str
    posterior: BetaPosterior
    impressions: int = 0
    clicks: int = 0

    def __post_init__(self):
        if self.impressions < 0 or self.clicks < 0:
            raise InvalidArgumentError(f"Arm {self.id}: counters must be non-negative")
        if self.clicks > self.impressions:
            raise InvalidArgumentError(
                f"Arm {self.id}: clicks ({self.clicks}) exceed impressions ({self.impressions})"
            )

    @classmethod
    def new(cls, arm_id: str, prior_a: float = 1.0, prior_b: float = 1.0) -> "BanditArm":
        """Fresh arm holding only the prior."""
        return cls(id=arm_id, posterior=BetaPosterior(prior_a, prior_b))

    @property
    def ctr(self) -> float:
        """Empirical click-through rate, clicks over impressions (0 before any traffic)."""
        return self.clicks / self.impressions if self.impressions else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "a": self.posterior.a,
            "b": self.posterior.b,
            "impressions": self.impressions,
            "clicks": self.clicks,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BanditArm":
        try:
            return cls(
                id=str(data["id"]),
                posterior=BetaPosterior(float(data["a"]), float(data["b"])),
                impressions=int(data["impressions"]),
                clicks=int(data["clicks"]),
            )
        except KeyError as e:
            raise InvalidArgumentError(f"Arm state is missing field {e}") from e


def record_outcome(arm: BanditArm, clicked: bool) -> BanditArm:
    """
    Bayesian update of an arm after one impression.

    Args:
        arm: The arm that was shown
        clicked: Whether the user clicked

    Returns:
        A new arm with counters and posterior updated
    """
    posterior = arm.posterior
    if clicked:
        posterior = BetaPosterior(posterior.a + 1, posterior.b)
    else:
        posterior = BetaPosterior(posterior.a, posterior.b + 1)
    return replace(
        arm,
        posterior=posterior,
        impressions=arm.impressions + 1,
        clicks=arm.clicks + (1 if clicked else 0),
    )
