import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from src.utils.errors import InvalidArgumentError
from src.utils.logging_config import get_logger

# Get logger for this module
logger = get_logger()

SEED_ENV_VAR = "NUDGEBANDIT_SEED"
MAX_SEED = 2**64 - 1
LABEL_NAMES = ("POSITIVE", "NEGATIVE", "NEUTRAL")


# Custom exceptions
class ConfigError(Exception):
    """Base class for configuration errors"""
    pass


class ConfigFileNotFoundError(ConfigError):
    """Raised when a configuration file cannot be found"""
    pass


class ConfigParsingError(ConfigError):
    """Raised when there's an error parsing the configuration"""
    pass


# Pydantic configuration models
class ExperimentConfig(BaseModel):
    """Stopping-rule and run parameters of a bandit experiment"""
    prior_a: float = Field(default=1.0, gt=0)
    prior_b: float = Field(default=1.0, gt=0)
    burn_in: int = Field(default=1500, ge=0)
    significance: float = Field(default=0.05, gt=0, lt=1)
    value_remaining_threshold: float = Field(default=0.01, gt=0, lt=1)
    mc_samples: int = Field(default=10_000, ge=1000)
    check_interval: int = Field(default=1, gt=0)
    max_iterations: int = Field(default=100_000, gt=0)
    trajectory_interval: int = Field(default=1, gt=0)
    seed: int = Field(default=42, ge=0, le=MAX_SEED)

    @model_validator(mode="after")
    def _burn_in_before_cap(self) -> "ExperimentConfig":
        if self.burn_in >= self.max_iterations:
            raise ValueError(
                f"burn_in ({self.burn_in}) must be smaller than max_iterations ({self.max_iterations})"
            )
        return self


class ArmSpec(BaseModel):
    """One simulated nudging strategy with its ground-truth click-through rate"""
    id: str = Field(min_length=1)
    true_ctr: float = Field(gt=0, lt=1)


class MetaLearnerConfig(BaseModel):
    """Hyperparameters of the logistic-regression meta-learner"""
    learning_rate: float = Field(default=0.1, gt=0)
    epochs: int = Field(default=1000, gt=0)
    l2_penalty: float = Field(default=1e-4, ge=0)
    seed: int = 0


class EnsembleConfig(BaseModel):
    """Stacking configuration over the three base classifiers"""
    model_order: List[str] = Field(default_factory=lambda: ["bert", "glove", "lstm"])
    tiebreaker_index: int = Field(default=0, ge=0, le=2)
    feature_encoding: Literal["one_hot", "probabilities"] = "one_hot"
    meta_learner: MetaLearnerConfig = MetaLearnerConfig()

    @field_validator("model_order")
    @classmethod
    def _three_distinct_models(cls, value: List[str]) -> List[str]:
        if len(value) != 3 or len(set(value)) != 3:
            raise ValueError("model_order must name exactly three distinct models")
        return value


class DataConfig(BaseModel):
    """Data preparation parameters"""
    test_fraction: float = Field(default=0.2, gt=0, lt=1)
    stacking_fraction: float = Field(default=0.25, gt=0, lt=1)
    seed: int = Field(default=42, ge=0, le=MAX_SEED)


class SyntheticModelConfig(BaseModel):
    """A synthetic base classifier: accuracy plus where its errors go"""
    id: str = Field(min_length=1)
    accuracy: float = Field(ge=0, le=1)
    # true label -> {wrong label: weight}; missing rows are uniform over the wrong labels
    confusion_bias: Dict[str, Dict[str, float]] = Field(default_factory=dict)

    @field_validator("confusion_bias")
    @classmethod
    def _known_labels(cls, value: Dict[str, Dict[str, float]]) -> Dict[str, Dict[str, float]]:
        normalised = {}
        for truth, weights in value.items():
            if truth.upper() not in LABEL_NAMES:
                raise ValueError(f"unknown label in confusion_bias: {truth}")
            row = {}
            for wrong, weight in weights.items():
                if wrong.upper() not in LABEL_NAMES:
                    raise ValueError(f"unknown label in confusion_bias: {wrong}")
                if weight < 0:
                    raise ValueError("confusion_bias weights must be non-negative")
                row[wrong.upper()] = float(weight)
            normalised[truth.upper()] = row
        return normalised


class SyntheticConfig(BaseModel):
    """Synthetic review and base-classifier generation"""
    class_counts: Dict[str, int] = Field(
        default_factory=lambda: {"POSITIVE": 1000, "NEGATIVE": 1000, "NEUTRAL": 1000}
    )
    models: List[SyntheticModelConfig] = Field(default_factory=lambda: [
        SyntheticModelConfig(id="bert", accuracy=0.9),
        SyntheticModelConfig(id="glove", accuracy=0.6),
        SyntheticModelConfig(id="lstm", accuracy=0.5),
    ])
    emit_probabilities: bool = False
    seed: int = Field(default=42, ge=0, le=MAX_SEED)

    @field_validator("class_counts")
    @classmethod
    def _counts(cls, value: Dict[str, int]) -> Dict[str, int]:
        normalised = {}
        for label, count in value.items():
            if label.upper() not in LABEL_NAMES:
                raise ValueError(f"unknown label in class_counts: {label}")
            if count < 0:
                raise ValueError("class_counts must be non-negative")
            normalised[label.upper()] = int(count)
        return normalised


def _default_two_arms() -> List[ArmSpec]:
    return [ArmSpec(id="arm1", true_ctr=0.021), ArmSpec(id="arm2", true_ctr=0.024)]


class CompleteConfig(BaseModel):
    """Complete configuration combining all sections and default values"""
    experiment: ExperimentConfig = ExperimentConfig()
    arms: List[ArmSpec] = Field(default_factory=_default_two_arms)
    ensemble: EnsembleConfig = EnsembleConfig()
    data: DataConfig = DataConfig()
    synthetic: SyntheticConfig = SyntheticConfig()

    @field_validator("arms")
    @classmethod
    def _enough_arms(cls, value: List[ArmSpec]) -> List[ArmSpec]:
        if len(value) < 2:
            raise ValueError("at least 2 arms required")
        if len({arm.id for arm in value}) != len(value):
            raise ValueError("arm ids must be unique")
        return value


class Config:
    """Configuration loader for experiments and pipelines"""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration manager.

        Args:
            config_path: Optional path to a YAML or TOML configuration file.
                         If not provided, will search for default config.
        """
        # If no config path provided, look for default config
        if not config_path:
            config_path = self._find_default_config()

        self.config_path = config_path
        self.config = self._load_config()

        env_seed = os.environ.get(SEED_ENV_VAR)
        if env_seed:
            try:
                self.apply_seed(int(env_seed))
            except ValueError as e:
                msg = f"{SEED_ENV_VAR} must be a non-negative integer, got {env_seed!r}"
                logger.error(msg)
                raise ConfigError(msg) from e
            logger.info(f"Seed overridden by {SEED_ENV_VAR}={env_seed}")

    def _find_default_config(self) -> Optional[str]:
        """Look for default configuration file in standard locations"""
        default_locations = [
            Path("configs/default_config.yml"),  # Relative to cwd
            Path(__file__).parent.parent.parent / "configs" / "default_config.yml"  # Project root
        ]

        for location in default_locations:
            if location.exists():
                logger.info(f"Using default config at {location}")
                return str(location)

        logger.info("No default config file found")
        return None

    def _read_file(self) -> Dict[str, Any]:
        suffix = Path(self.config_path).suffix.lower()
        if suffix == ".toml":
            with open(self.config_path, 'rb') as file:
                return tomllib.load(file)
        with open(self.config_path, 'r') as file:
            return yaml.safe_load(file) or {}

    def _load_config(self) -> CompleteConfig:
        """Load and parse configuration from file or use defaults"""
        # Start with default config
        config = CompleteConfig()

        # If no config path was found, keep default config
        if not self.config_path:
            logger.info("No config file found, using default configuration")
            return config

        # Check if file exists
        if not os.path.exists(self.config_path):
            msg = f"Config file not found at {self.config_path}"
            logger.error(msg)
            raise ConfigFileNotFoundError(msg)

        try:
            raw = self._read_file()

            if not raw:
                logger.warning("Empty configuration file, using default configuration")
                return config

            # Create new config with loaded values
            loaded_config = CompleteConfig(**raw)
            logger.success(f"Configuration loaded successfully from {self.config_path}")
            return loaded_config

        except (yaml.YAMLError, tomllib.TOMLDecodeError) as e:
            msg = f"Parsing error in configuration file: {str(e)}"
            logger.error(msg)
            raise ConfigParsingError(msg) from e
        except Exception as e:
            msg = f"Error loading configuration: {str(e)}"
            logger.error(msg)
            raise ConfigError(msg) from e

    def apply_seed(self, seed: int) -> None:
        """
        Override every seeded section with the same master seed.

        Args:
            seed: Non-negative integer seed
        """
        if seed < 0 or seed > MAX_SEED:
            raise InvalidArgumentError(f"seed out of range: {seed}")
        self.config = self.config.model_copy(update={
            "experiment": self.config.experiment.model_copy(update={"seed": seed}),
            "data": self.config.data.model_copy(update={"seed": seed}),
            "synthetic": self.config.synthetic.model_copy(update={"seed": seed}),
        })

    def get(self, path: str, default: Any = None) -> Any:
        """
        Get a configuration value using dot notation.

        Args:
            path: Path to the configuration value (e.g., 'experiment.burn_in')
            default: Default value to return if the path doesn't exist

        Returns:
            The configuration value or the default
        """
        current = self.config
        for part in path.split('.'):
            if hasattr(current, part):
                current = getattr(current, part)
            else:
                return default
        return current
