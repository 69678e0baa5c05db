"""Test training config utilities"""
import os
from unittest import TestCase

from jsons import DeserializationError

from nodewrap.exceptions import InvalidConfig
from nodewrap.models.training_config import GenerativeSource, TrainingConfig
from nodewrap.utils.config import parse_training_configs, validate_config


class TestConfig(TestCase):
    """Test training config utilities"""

    def setUp(self):
        self.prev_dir = os.getcwd()
        os.chdir(os.path.normpath(os.path.dirname(__file__) + '/../helpers'))

    def tearDown(self):
        os.chdir(self.prev_dir)

    def test_defaults(self):
        """test no config files give the default configuration"""
        config = parse_training_configs([])

        self.assertEqual((config.T, config.L, config.beta0, config.k0), (5, 100000, 0.6, 1.0))
        self.assertEqual((config.k_beta1, config.k_beta2, config.k_c1, config.k_c2), (0.1, 1.0, 0.1, 1.0))
        self.assertEqual(config.epsilon, 0.0005)
        self.assertEqual((config.alpha, config.batch_size), (0.01, 32))
        self.assertEqual((config.epochs_teacher, config.epochs_student), (300, 100))
        self.assertEqual(config.generative_sources, [GenerativeSource.FUNCTIONS, GenerativeSource.OVERLAP])

    def test_parse_training_configs_merges(self):
        """test later files override earlier ones and overrides win over files"""
        config = parse_training_configs(
            ['configs/base.yml', 'configs/empty.yml', 'configs/override.yml'],
            {'seed': 4},
        )

        self.assertEqual(config.T, 3)
        self.assertEqual(config.L, 200)
        self.assertEqual(config.alpha, 0.05)
        self.assertEqual(config.seed, 4)
        self.assertFalse(config.noise_robust_loss)
        self.assertEqual(config.generative_sources, [GenerativeSource.OVERLAP])

    def test_parse_training_configs_unknown_key(self):
        """test unknown keys are rejected"""
        with self.assertRaises(DeserializationError):
            parse_training_configs(['configs/unknown_key.yml'])

    def test_parse_training_configs_invalid_values(self):
        """test values outside their ranges are reported together"""
        with self.assertRaises(InvalidConfig) as context:
            parse_training_configs(['configs/invalid_values.yml'])

        message = str(context.exception)
        self.assertIn('T must be at least 1', message)
        self.assertIn('beta0', message)
        self.assertIn('epsilon', message)

    def test_invalid_generative_source(self):
        """test unknown generative sources are rejected"""
        with self.assertRaises(DeserializationError):
            parse_training_configs([], {'generative_sources': ['oracle']})

    def test_validate_config(self):
        """test a valid configuration passes and a bad floor fails"""
        validate_config(TrainingConfig())

        with self.assertRaises(InvalidConfig):
            validate_config(TrainingConfig(weight_floor=1.0))
