"""Holds config utilities"""
import logging
from typing import Dict, List, Optional

import jsons
import yaml
from jsons import DeserializationError

from nodewrap.exceptions import InvalidConfig
from nodewrap.models.training_config import TrainingConfig
from nodewrap.utils.collection_utils import update

logger = logging.getLogger(__name__)


def parse_training_configs(config_files: List[str], overrides: Optional[Dict] = None) -> TrainingConfig:
    """
    Function for parsing training config files.
    :param config_files: A list of YAML file paths. Config files later in the list override those earlier in
    the list, and are merged with the default config and earlier files.
    :param overrides: Values that override every file, such as command line flags.
    :return: A validated TrainingConfig object representing the accumulated values of all the config files
    """
    generated_config: Dict = {}

    for config_path in config_files:
        with open(config_path, encoding='utf-8') as config_file:
            config = yaml.safe_load(config_file)
            if config and isinstance(config, dict):
                generated_config = update(generated_config, config)

    generated_config = update(generated_config, overrides or {})

    try:
        config_obj: TrainingConfig = jsons.load(generated_config, TrainingConfig, strict=True)
    except DeserializationError as exception:
        logger.error('Cannot parse training config from files: %s', config_files)
        raise exception

    validate_config(config_obj)
    return config_obj


def validate_config(config: TrainingConfig):
    """
    Check the constraints of a training configuration.
    :param config: The configuration to check.
    """
    problems = []
    if config.T < 1:
        problems.append(f"T must be at least 1, got {config.T}")
    if config.L < 1:
        problems.append(f"L must be at least 1, got {config.L}")
    for name in ('k_beta1', 'k_beta2', 'k0', 'k_c1', 'k_c2'):
        if getattr(config, name) < 0:
            problems.append(f"{name} must not be negative, got {getattr(config, name)}")
    if not 0.0 <= config.beta0 <= 1.0:
        problems.append(f"beta0 must lie in [0, 1], got {config.beta0}")
    if not 0.0 < config.epsilon < 1.0:
        problems.append(f"epsilon must lie in (0, 1), got {config.epsilon}")
    if not 0.0 < config.weight_floor < 1.0:
        problems.append(f"weight_floor must lie in (0, 1), got {config.weight_floor}")
    if config.alpha <= 0:
        problems.append(f"alpha must be positive, got {config.alpha}")
    if config.epochs_teacher < 0 or config.epochs_student < 0:
        problems.append("Epoch counts must not be negative")
    if config.batch_size < 1:
        problems.append(f"batch_size must be at least 1, got {config.batch_size}")
    if config.validation_pages_per_site < 1:
        problems.append(
            f"validation_pages_per_site must be at least 1, got {config.validation_pages_per_site}"
        )
    if not 0.0 < config.min_overlap <= 1.0:
        problems.append(f"min_overlap must lie in (0, 1], got {config.min_overlap}")
    if config.feature_dimension < 1:
        problems.append(f"feature_dimension must be at least 1, got {config.feature_dimension}")

    if problems:
        raise InvalidConfig('; '.join(problems))
