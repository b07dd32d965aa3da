"""
Repeated seeded bandit runs and their aggregate statistics.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.simulation.simulation_model import run_experiment, validate_specs
from src.utils.config import MAX_SEED, ArmSpec, ExperimentConfig
from src.utils.errors import InvalidArgumentError
from src.utils.logging_config import get_logger

logger = get_logger()


@dataclass
class ReplicationSummary:
    """
    Aggregate of n independent runs with seeds base_seed .. base_seed + n_runs - 1.

    Attributes:
        arm_ids: arm ids in configuration order
        base_seed: seed of the first run
        win_counts: runs won per arm
        termination_iterations: iterations_run of every run, in seed order
        terminated_early: per-run flag, in seed order
        traffic_shares: per arm, the share of each run's traffic, in seed order
        runs: per-run summaries, in seed order
    """
    arm_ids: List[str]
    base_seed: int
    win_counts: Dict[str, int]
    termination_iterations: List[int]
    terminated_early: List[bool]
    traffic_shares: Dict[str, List[float]]
    runs: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def n_runs(self) -> int:
        return len(self.runs)

    def early_win_counts(self) -> Dict[str, int]:
        """Win counts restricted to runs stopped by the value-remaining rule."""
        counts = {arm_id: 0 for arm_id in self.arm_ids}
        for run in self.runs:
            if run["terminated_early"]:
                counts[run["winner_id"]] += 1
        return counts

    def plurality_counts(self) -> Dict[str, int]:
        """Runs in which each arm received the most traffic (ties to the first arm)."""
        counts = {arm_id: 0 for arm_id in self.arm_ids}
        for run in self.runs:
            top = max(self.arm_ids, key=lambda arm_id: run["traffic"][arm_id])
            counts[top] += 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        iterations = np.asarray(self.termination_iterations, dtype=float)
        return {
            "n_runs": self.n_runs,
            "base_seed": self.base_seed,
            "arm_ids": list(self.arm_ids),
            "win_counts": dict(self.win_counts),
            "early_win_counts": self.early_win_counts(),
            "plurality_counts": self.plurality_counts(),
            "terminated_early_count": int(sum(self.terminated_early)),
            "termination_iterations": {
                "values": list(self.termination_iterations),
                "mean": float(iterations.mean()),
                "median": float(np.median(iterations)),
                "p05": float(np.percentile(iterations, 5)),
                "p95": float(np.percentile(iterations, 95)),
            },
            "traffic_share": {
                arm_id: {"mean": float(np.mean(shares)), "values": list(shares)}
                for arm_id, shares in self.traffic_shares.items()
            },
            "runs": list(self.runs),
        }


def _run_one(specs: Sequence[ArmSpec], config: ExperimentConfig) -> Dict[str, Any]:
    return run_experiment(specs, config, record_trajectory=False).summary()


def run_replications(specs: Sequence[ArmSpec], config: ExperimentConfig, n_runs: int,
                     base_seed: Optional[int] = None, workers: int = 1) -> ReplicationSummary:
    """
    Run independent experiments and aggregate exactly their per-run results.

    Args:
        specs: Arm definitions
        config: Experiment configuration; its seed is replaced per run
        n_runs: Number of runs, at least one
        base_seed: Seed of the first run; defaults to config.seed
        workers: Worker processes; results are aggregated in seed order regardless

    Returns:
        ReplicationSummary
    """
    if n_runs < 1:
        raise InvalidArgumentError(f"n_runs must be at least 1, got {n_runs}")
    validate_specs(specs)
    base_seed = config.seed if base_seed is None else base_seed
    if base_seed < 0 or base_seed + n_runs - 1 > MAX_SEED:
        raise InvalidArgumentError(f"seeds {base_seed}..{base_seed + n_runs - 1} out of range")

    configs = [config.model_copy(update={"seed": base_seed + i}) for i in range(n_runs)]
    logger.info(f"Running {n_runs} replications from seed {base_seed} with {workers} worker(s)")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_one, [specs] * n_runs, configs))
    else:
        runs = [_run_one(specs, run_config) for run_config in configs]

    arm_ids = [spec.id for spec in specs]
    win_counts = {arm_id: 0 for arm_id in arm_ids}
    traffic_shares: Dict[str, List[float]] = {arm_id: [] for arm_id in arm_ids}
    for run in runs:
        win_counts[run["winner_id"]] += 1
        for arm_id in arm_ids:
            traffic_shares[arm_id].append(run["traffic"][arm_id] / run["iterations_run"])

    return ReplicationSummary(
        arm_ids=arm_ids,
        base_seed=base_seed,
        win_counts=win_counts,
        termination_iterations=[run["iterations_run"] for run in runs],
        terminated_early=[run["terminated_early"] for run in runs],
        traffic_shares=traffic_shares,
        runs=runs,
    )
