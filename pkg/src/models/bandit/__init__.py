# Beta-Bernoulli bandit package initialization
from src.models.bandit.posterior import BanditArm, BetaPosterior, record_outcome
from src.models.bandit.stopping import (ValueRemainingReport, empirical_quantile,
                                        should_terminate, value_remaining)
from src.models.bandit.thompson import sample_ctrs, thompson_select

__all__ = [
    "BanditArm",
    "BetaPosterior",
    "ValueRemainingReport",
    "empirical_quantile",
    "record_outcome",
    "sample_ctrs",
    "should_terminate",
    "thompson_select",
    "value_remaining",
]
