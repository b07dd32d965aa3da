from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mesa

from src.agents.strategy import Strategy
from src.models.bandit.posterior import BanditArm
from src.models.bandit.stopping import ValueRemainingReport, should_terminate, value_remaining
from src.models.bandit.thompson import thompson_select
from src.utils.config import ArmSpec, ExperimentConfig
from src.utils.errors import InvalidArgumentError
from src.utils.logging_config import get_logger
from src.utils.rng import bandit_streams

# Get logger for this module
logger = get_logger()


@dataclass(frozen=True)
class TrajectoryPoint:
    """State of every arm after a given iteration."""
    iteration: int
    impressions: Tuple[int, ...]
    clicks: Tuple[int, ...]
    posterior_means: Tuple[float, ...]
    quantile_value_remaining: Optional[float] = None


@dataclass
class ExperimentResult:
    """
    Full record of one bandit run.

    Attributes:
        winner_id: winner of the last value-remaining report
        iterations_run: number of users that arrived
        traffic: impressions per arm
        clicks: clicks per arm
        trajectory: recorded points, strictly increasing in iteration
        terminated_early: True iff the value-remaining rule stopped the run
        final_report: the report the winner was taken from
        arms: final arm states
        leader_changes: (iteration, arm id) whenever the posterior-mean leader changed
        seed: master seed of the run
    """
    winner_id: str
    iterations_run: int
    traffic: Dict[str, int]
    clicks: Dict[str, int]
    trajectory: List[TrajectoryPoint]
    terminated_early: bool
    final_report: ValueRemainingReport
    arms: List[BanditArm]
    leader_changes: List[Tuple[int, str]] = field(default_factory=list)
    seed: int = 0

    def summary(self) -> Dict[str, Any]:
        """Everything but the trajectory, as JSON-ready builtins."""
        return {
            "winner_id": self.winner_id,
            "iterations_run": self.iterations_run,
            "terminated_early": self.terminated_early,
            "traffic": dict(self.traffic),
            "clicks": dict(self.clicks),
            "empirical_ctr": {arm.id: arm.ctr for arm in self.arms},
            "arms": [arm.to_dict() for arm in self.arms],
            "final_report": self.final_report.to_dict(),
            "leader_changes": [[iteration, arm_id] for iteration, arm_id in self.leader_changes],
            "seed": self.seed,
        }


def validate_specs(specs: Sequence[ArmSpec]) -> None:
    if len(specs) < 2:
        raise InvalidArgumentError("at least 2 arms required")
    ids = [spec.id for spec in specs]
    if len(set(ids)) != len(ids):
        raise InvalidArgumentError(f"arm ids must be unique, got {ids}")


class BanditExperiment(mesa.Model):
    """
    Simulated user arrivals driving a Thompson-sampling bandit.

    Each step one user arrives, Thompson sampling assigns them a strategy, the strategy draws a
    click from its true click-through rate and the arm's posterior is updated. From burn-in
    onwards, every check_interval steps the value-remaining rule decides whether to stop.
    """
    def __init__(self, specs: Sequence[ArmSpec], config: ExperimentConfig = None,
                 record_trajectory: bool = True):
        """
        Initialise the experiment.

        Args:
            specs: Arm definitions, at least two with distinct ids
            config: Stopping-rule parameters; defaults to the published two-arm nudge settings
            record_trajectory: Keep per-iteration trajectory points
        """
        validate_specs(specs)
        self.config = config or ExperimentConfig()
        super().__init__(seed=self.config.seed)

        self.streams = bandit_streams(self.config.seed)
        self.strategies: List[Strategy] = [
            Strategy(self, spec, self.config.prior_a, self.config.prior_b) for spec in specs
        ]
        self.record_trajectory = record_trajectory

        self.iteration = 0
        self.terminated_early = False
        self.last_report: Optional[ValueRemainingReport] = None
        self._last_check_iteration = 0
        self.trajectory: List[TrajectoryPoint] = []
        self.leader_changes: List[Tuple[int, str]] = []
        self._leader: Optional[int] = None

    @property
    def arms(self) -> List[BanditArm]:
        return [strategy.arm for strategy in self.strategies]

    def _is_check_iteration(self) -> bool:
        return (self.iteration >= self.config.burn_in
                and self.iteration % self.config.check_interval == 0)

    def _track_leader(self) -> None:
        means = [strategy.arm.posterior.mean() for strategy in self.strategies]
        leader = max(range(len(means)), key=means.__getitem__)
        if leader != self._leader:
            self._leader = leader
            self.leader_changes.append((self.iteration, self.strategies[leader].spec.id))

    def _record(self, report: Optional[ValueRemainingReport]) -> None:
        arms = self.arms
        point = TrajectoryPoint(
            iteration=self.iteration,
            impressions=tuple(arm.impressions for arm in arms),
            clicks=tuple(arm.clicks for arm in arms),
            posterior_means=tuple(arm.posterior.mean() for arm in arms),
            quantile_value_remaining=report.quantile_value_remaining if report else None,
        )
        if self.trajectory and self.trajectory[-1].iteration == self.iteration:
            self.trajectory[-1] = point
        else:
            self.trajectory.append(point)

    def check(self, allow_stop: bool = True) -> ValueRemainingReport:
        """
        Run the Monte-Carlo value-remaining check on the current posteriors.

        Args:
            allow_stop: Apply the stopping rule; False for the closing report at max_iterations
        """
        report = value_remaining(self.arms, self.config.significance, self.config.mc_samples,
                                 self.streams["value_remaining"])
        stop = allow_stop and should_terminate(self.iteration, report, self.config)
        report = replace(report, terminated=stop)
        self.last_report = report
        self._last_check_iteration = self.iteration

        logger.trace(f"iteration {self.iteration}: winner {self.strategies[report.winner_index].spec.id}, "
                     f"value remaining {report.quantile_value_remaining:.5f}")
        if stop:
            self.terminated_early = True
            self.running = False
        return report

    def step(self):
        """
        One user arrival.
        """
        self.iteration += 1
        index = thompson_select(self.arms, self.streams["selection"])
        self.strategies[index].serve(self.streams["click"])
        self._track_leader()

        report = self.check() if self._is_check_iteration() else None
        if self.record_trajectory and (report is not None
                                       or self.iteration % self.config.trajectory_interval == 0):
            self._record(report)

    def run(self) -> ExperimentResult:
        """
        Run until the stopping rule fires or max_iterations users have arrived.
        """
        self.running = True
        logger.debug(f"Starting bandit experiment with {len(self.strategies)} arms, seed {self.config.seed}")
        while self.running and self.iteration < self.config.max_iterations:
            self.step()

        if self._last_check_iteration != self.iteration:
            report = self.check(allow_stop=False)
            if self.record_trajectory:
                self._record(report)

        result = self.result()
        if self.terminated_early:
            logger.debug(f"Experiment terminated after {self.iteration} iterations, winner {result.winner_id}")
        else:
            logger.debug(f"Experiment reached max_iterations ({self.iteration}), current winner {result.winner_id}")
        return result

    def result(self) -> ExperimentResult:
        arms = self.arms
        return ExperimentResult(
            winner_id=arms[self.last_report.winner_index].id,
            iterations_run=self.iteration,
            traffic={arm.id: arm.impressions for arm in arms},
            clicks={arm.id: arm.clicks for arm in arms},
            trajectory=list(self.trajectory),
            terminated_early=self.terminated_early,
            final_report=self.last_report,
            arms=arms,
            leader_changes=list(self.leader_changes),
            seed=self.config.seed,
        )


def run_experiment(specs: Sequence[ArmSpec], config: ExperimentConfig = None,
                   record_trajectory: bool = True) -> ExperimentResult:
    """
    Run one seeded bandit experiment.

    Args:
        specs: Arm definitions
        config: Experiment configuration
        record_trajectory: Keep trajectory points (disable for replications)

    Returns:
        The run's ExperimentResult
    """
    return BanditExperiment(specs, config, record_trajectory=record_trajectory).run()
