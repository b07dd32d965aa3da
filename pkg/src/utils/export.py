"""
Output writers: trajectory CSV, JSON summaries and the run manifest.

JSON is written with sorted keys and fixed indentation so that identical runs produce
byte-identical files.
"""
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from src import __version__
from src.utils.errors import DataFormatError
from src.utils.logging_config import get_logger

logger = get_logger()

PathLike = Union[str, Path]

TRAJECTORY_COLUMNS = ["iteration", "arm_id", "impressions", "clicks", "posterior_mean",
                      "quantile_value_remaining"]


@dataclass(frozen=True)
class RunManifest:
    """
    Written next to every output set; re-running it reproduces the outputs.

    Attributes:
        command: Subcommand, e.g. "data prep"
        config_path: Configuration file, or None for the built-in defaults
        seed: Effective master seed of the run
        output_dir: Directory holding the outputs and this manifest
        options: Every other command-line option, keyed by its argparse destination
        tool_version: Package version that wrote the outputs
    """
    command: str
    config_path: Optional[str]
    seed: int
    output_dir: str
    options: Dict[str, Any] = field(default_factory=dict)
    tool_version: str = __version__


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _finite_or_none(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _finite_or_none(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_none(item) for item in value]
    return value


def write_json(data: Any, path: PathLike) -> None:
    """Write data as deterministic JSON; non-finite floats become null."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_finite_or_none(data), indent=2, sort_keys=True, default=_to_builtin)
    Path(path).write_text(text + "\n", encoding="utf-8")
    logger.debug(f"Wrote {path}")


def write_manifest(manifest: RunManifest, output_dir: PathLike) -> Path:
    path = Path(output_dir) / "manifest.json"
    write_json(asdict(manifest), path)
    return path


def load_manifest(path: PathLike) -> RunManifest:
    """
    Read a manifest written by write_manifest.

    Raises:
        FileNotFoundError: If the file does not exist
        DataFormatError: If the file is not a manifest
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        return RunManifest(**json.loads(text))
    except (json.JSONDecodeError, TypeError) as e:
        raise DataFormatError(f"{path} is not a run manifest: {e}") from e


def write_trajectory_csv(result, path: PathLike) -> None:
    """
    One row per arm per trajectory point; the quantile column is empty on iterations without a
    termination check.

    Args:
        result: ExperimentResult with a recorded trajectory
        path: Output CSV
    """
    arm_ids = [arm.id for arm in result.arms]
    rows = []
    for point in result.trajectory:
        quantile = "" if point.quantile_value_remaining is None else repr(point.quantile_value_remaining)
        for i, arm_id in enumerate(arm_ids):
            rows.append([point.iteration, arm_id, point.impressions[i], point.clicks[i],
                         repr(point.posterior_means[i]), quantile])

    Path(path).parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS).to_csv(
        path, index=False, encoding="utf-8", lineterminator="\n"
    )
    logger.debug(f"Wrote {len(result.trajectory)} trajectory points to {path}")
