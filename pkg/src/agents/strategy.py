"""
Nudging strategy agent.
"""

from typing import TYPE_CHECKING

import mesa
import numpy as np

from src.models.bandit.posterior import BanditArm, record_outcome
from src.utils.config import ArmSpec

if TYPE_CHECKING:
    from src.simulation.simulation_model import BanditExperiment


class Strategy(mesa.Agent):
    """
    One arm of the experiment: a nudge variant shown to arriving users.

    Holds the ground-truth click-through rate, which the bandit never sees, and the arm state the
    bandit learns from.
    """
    def __init__(self, model: 'BanditExperiment', spec: ArmSpec, prior_a: float, prior_b: float):
        """
        Initialise the strategy agent.

        Args:
            model: The experiment the strategy takes part in
            spec: Arm id and true click-through rate
            prior_a: Prior successes of the Beta belief
            prior_b: Prior failures of the Beta belief
        """
        super().__init__(model)
        self.model: 'BanditExperiment'
        self.spec = spec
        self.arm = BanditArm.new(spec.id, prior_a, prior_b)

    def serve(self, click_stream: np.random.Generator) -> bool:
        """
        Show the nudge to one user and learn from whether they click.

        Args:
            click_stream: Stream used for the Bernoulli click draw

        Returns:
            True if the user clicked
        """
        clicked = bool(click_stream.random() < self.spec.true_ctr)
        self.arm = record_outcome(self.arm, clicked)
        return clicked

    def __repr__(self):
        return f"Strategy {self.spec.id} (ctr={self.spec.true_ctr}), {self.arm.clicks}/{self.arm.impressions}"
