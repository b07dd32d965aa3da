import os
import shutil
import tempfile
import unittest
from unittest.mock import patch

import yaml

from src.utils.config import (SEED_ENV_VAR, Config, ConfigError, ConfigFileNotFoundError,
                              ConfigParsingError, ExperimentConfig)
from src.utils.errors import InvalidArgumentError


class TestConfig(unittest.TestCase):

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.env = patch.dict(os.environ, {}, clear=False)
        self.env.start()
        os.environ.pop(SEED_ENV_VAR, None)

    def tearDown(self):
        self.env.stop()
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def write_yaml(self, name, data):
        path = os.path.join(self.temp_dir, name)
        with open(path, "w") as f:
            yaml.dump(data, f)
        return path

    def test_default_config(self):
        """Test that defaults match the published two-arm experiment"""
        config = Config()
        experiment = config.config.experiment
        self.assertEqual(experiment.burn_in, 1500)
        self.assertEqual(experiment.significance, 0.05)
        self.assertEqual(experiment.value_remaining_threshold, 0.01)
        self.assertEqual(experiment.mc_samples, 10_000)
        self.assertEqual([arm.id for arm in config.config.arms], ["arm1", "arm2"])
        self.assertEqual([arm.true_ctr for arm in config.config.arms], [0.021, 0.024])
        self.assertEqual(config.config.ensemble.model_order, ["bert", "glove", "lstm"])

    def test_find_default_config(self):
        """Test the method that finds the default config"""
        with patch('pathlib.Path.exists') as mock_exists:
            mock_exists.return_value = True
            config = Config()
            self.assertIsNotNone(config._find_default_config())

            mock_exists.return_value = False
            config = Config()
            self.assertIsNone(config._find_default_config())

    def test_nonexistent_file_raises_error(self):
        """Test that specifying a non-existent file raises an error"""
        with self.assertRaises(ConfigFileNotFoundError):
            Config("/path/to/nonexistent/file.yml")

    def test_config_loading(self):
        """Test loading configuration from YAML file"""
        path = self.write_yaml("test_config.yml", {
            "experiment": {"burn_in": 100, "mc_samples": 2000, "seed": 7, "max_iterations": 5000},
            "arms": [{"id": "a", "true_ctr": 0.1}, {"id": "b", "true_ctr": 0.2},
                     {"id": "c", "true_ctr": 0.3}],
            "ensemble": {"tiebreaker_index": 1, "meta_learner": {"epochs": 50}},
        })
        config = Config(path)

        self.assertEqual(config.config.experiment.burn_in, 100)
        self.assertEqual(config.config.experiment.mc_samples, 2000)
        self.assertEqual(config.config.experiment.seed, 7)
        self.assertEqual([arm.id for arm in config.config.arms], ["a", "b", "c"])
        self.assertEqual(config.config.ensemble.tiebreaker_index, 1)
        self.assertEqual(config.config.ensemble.meta_learner.epochs, 50)
        self.assertEqual(config.config.ensemble.meta_learner.learning_rate, 0.1)

    def test_toml_loading(self):
        """Test that the shipped three-arm TOML file loads"""
        config = Config("configs/nudge_3arm.toml")
        self.assertEqual([arm.true_ctr for arm in config.config.arms], [0.021, 0.024, 0.044])
        self.assertEqual(config.config.experiment.burn_in, 1500)

    def test_invalid_toml(self):
        """Test handling of invalid TOML syntax"""
        path = os.path.join(self.temp_dir, "invalid.toml")
        with open(path, "w") as f:
            f.write("[experiment\nburn_in = ")
        with self.assertRaises(ConfigParsingError):
            Config(path)

    def test_partial_config(self):
        """Test loading a config file with only some sections defined"""
        path = self.write_yaml("partial_config.yml", {"data": {"test_fraction": 0.3}})
        config = Config(path)

        self.assertEqual(config.config.data.test_fraction, 0.3)
        self.assertEqual(config.config.experiment.burn_in, 1500)
        self.assertEqual(len(config.config.arms), 2)

    def test_single_arm_rejected(self):
        """Test that one arm is a configuration error naming the arm count"""
        path = self.write_yaml("one_arm.yml", {"arms": [{"id": "only", "true_ctr": 0.1}]})
        with self.assertRaises(ConfigError) as ctx:
            Config(path)
        self.assertIn("at least 2 arms required", str(ctx.exception))

    def test_duplicate_arm_ids_rejected(self):
        path = self.write_yaml("dup.yml", {"arms": [{"id": "a", "true_ctr": 0.1},
                                                    {"id": "a", "true_ctr": 0.2}]})
        with self.assertRaises(ConfigError):
            Config(path)

    def test_invalid_yaml(self):
        """Test handling of invalid YAML syntax"""
        yaml_path = os.path.join(self.temp_dir, "invalid.yml")
        with open(yaml_path, "w") as f:
            f.write("experiment: {burn_in: 10, seed: invalid")

        with self.assertRaises(ConfigParsingError):
            Config(yaml_path)

    def test_empty_yaml(self):
        """Test loading an empty YAML file"""
        yaml_path = os.path.join(self.temp_dir, "empty.yml")
        with open(yaml_path, "w") as _:
            pass

        config = Config(yaml_path)
        self.assertEqual(config.config.experiment.burn_in, 1500)

    def test_general_exception_handling(self):
        """Test that general exceptions are properly caught and wrapped"""
        yaml_path = os.path.join(self.temp_dir, "test_config.yml")
        with open(yaml_path, "w") as f:
            f.write("experiment: {burn_in: 10}")

        with patch('builtins.open', side_effect=Exception("Test exception")):
            with self.assertRaises(ConfigError):
                Config(yaml_path)

    def test_numeric_value_validation(self):
        """Test validation of numeric values in configuration"""
        invalid_sections = [
            {"experiment": {"significance": 1.5}},
            {"experiment": {"mc_samples": 10}},
            {"experiment": {"burn_in": 2000, "max_iterations": 1000}},
            {"experiment": {"max_iterations": "not a number"}},
            {"arms": [{"id": "a", "true_ctr": 0.0}, {"id": "b", "true_ctr": 0.2}]},
            {"ensemble": {"model_order": ["bert", "bert", "lstm"]}},
            {"ensemble": {"tiebreaker_index": 3}},
            {"synthetic": {"models": [{"id": "x", "accuracy": 1.2}]}},
        ]
        for i, data in enumerate(invalid_sections):
            with self.subTest(data=data):
                path = self.write_yaml(f"numeric_{i}.yml", data)
                with self.assertRaises(ConfigError):
                    Config(path)

    def test_confusion_bias_labels_normalised(self):
        """Test that synthetic confusion weights accept lowercase labels"""
        path = self.write_yaml("bias.yml", {"synthetic": {"models": [
            {"id": "m", "accuracy": 0.5, "confusion_bias": {"neutral": {"positive": 2.0}}},
        ]}})
        config = Config(path)
        self.assertEqual(config.config.synthetic.models[0].confusion_bias,
                         {"NEUTRAL": {"POSITIVE": 2.0}})

    def test_config_accessor_methods(self):
        """Test the API methods for accessing configuration values"""
        config = Config()

        self.assertEqual(config.get('experiment.burn_in'), 1500)
        self.assertEqual(config.get('ensemble.meta_learner.epochs'), 1000)
        self.assertEqual(config.get('non.existent.path', 'default_value'), 'default_value')

    def test_seed_from_environment(self):
        """Test that the seed environment variable overrides every seeded section"""
        os.environ[SEED_ENV_VAR] = "1234"
        config = Config()
        self.assertEqual(config.config.experiment.seed, 1234)
        self.assertEqual(config.config.data.seed, 1234)
        self.assertEqual(config.config.synthetic.seed, 1234)

    def test_invalid_seed_from_environment(self):
        os.environ[SEED_ENV_VAR] = "not-a-seed"
        with self.assertRaises(ConfigError):
            Config()

    def test_apply_seed(self):
        """Test that an explicit seed wins over the environment"""
        os.environ[SEED_ENV_VAR] = "5"
        config = Config()
        config.apply_seed(99)
        self.assertEqual(config.config.experiment.seed, 99)
        with self.assertRaises(InvalidArgumentError):
            config.apply_seed(-1)

    def test_yaml_structure_with_comments(self):
        """Test loading a YAML file that contains comments"""
        yaml_content = """
        # Experiment settings
        experiment:
          burn_in: 200      # users before the first check
          max_iterations: 900

        # Arms under test
        arms:
          - id: control
            true_ctr: 0.02
          - id: badge
            true_ctr: 0.03
        """
        yaml_path = os.path.join(self.temp_dir, "commented_config.yml")
        with open(yaml_path, "w") as f:
            f.write(yaml_content)

        config = Config(yaml_path)
        self.assertEqual(config.config.experiment.burn_in, 200)
        self.assertEqual(config.config.arms[1].id, "badge")

    def test_unknown_field_rejection(self):
        """Test that unknown fields in the config are ignored"""
        path = self.write_yaml("unknown_field.yml", {"experiment": {"unknown_field": "value"}})
        c = Config(path)
        self.assertNotIn("unknown_field", vars(c.config.experiment))


class TestExperimentConfig(unittest.TestCase):

    def test_defaults(self):
        config = ExperimentConfig()
        self.assertEqual((config.prior_a, config.prior_b), (1.0, 1.0))
        self.assertEqual(config.check_interval, 1)
        self.assertEqual(config.max_iterations, 100_000)


if __name__ == "__main__":
    unittest.main()
