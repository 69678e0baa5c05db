"""Data classes to represent the training config file"""
# pylint: disable=missing-docstring
from enum import Enum
from typing import List

import jsons


class GenerativeSource(Enum):
    FUNCTIONS = 'functions'
    OVERLAP = 'overlap'


# pylint: disable=unused-argument
def generative_source_deserializer(obj, cls, **kwargs):
    """convert a config string to a GenerativeSource"""
    for source in GenerativeSource:
        if obj in (source.value, source.name):
            return source

    raise jsons.DeserializationError(f'Invalid generative source: {obj}', obj, cls)


jsons.set_deserializer(generative_source_deserializer, GenerativeSource)


class ReweightConfig:
    def __init__(self, epsilon: float = 0.0005, weight_floor: float = 0.01):
        self.epsilon = epsilon
        self.weight_floor = weight_floor


# pylint: disable=too-many-arguments,too-many-locals,too-many-instance-attributes,invalid-name
class TrainingConfig:
    def __init__(
            self,
            T: int = 5,
            L: int = 100000,
            beta0: float = 0.6,
            k_beta1: float = 0.1,
            k_beta2: float = 1.0,
            k0: float = 1.0,
            k_c1: float = 0.1,
            k_c2: float = 1.0,
            epsilon: float = 0.0005,
            alpha: float = 0.01,
            epochs_teacher: int = 300,
            epochs_student: int = 100,
            batch_size: int = 32,
            seed: int = 0,
            feature_dimension: int = 2 ** 15,
            validation_pages_per_site: int = 10,
            weight_floor: float = 0.01,
            min_overlap: float = 0.3,
            num_parallel: int = 4,
            use_generative_model: bool = True,
            generative_sources: List[GenerativeSource] = None,
            adaptive_reweighting: bool = True,
            noise_robust_loss: bool = True,
            refresh_pseudo_labels: bool = False,
            early_stop: bool = False,
            drop_unsound_functions: bool = False,
    ):
        self.T = T
        self.L = L
        self.beta0 = beta0
        self.k_beta1 = k_beta1
        self.k_beta2 = k_beta2
        self.k0 = k0
        self.k_c1 = k_c1
        self.k_c2 = k_c2
        self.epsilon = epsilon
        self.alpha = alpha
        self.epochs_teacher = epochs_teacher
        self.epochs_student = epochs_student
        self.batch_size = batch_size
        self.seed = seed
        self.feature_dimension = feature_dimension
        self.validation_pages_per_site = validation_pages_per_site
        self.weight_floor = weight_floor
        self.min_overlap = min_overlap
        self.num_parallel = num_parallel
        self.use_generative_model = use_generative_model
        self.generative_sources = generative_sources if generative_sources is not None else [
            GenerativeSource.FUNCTIONS,
            GenerativeSource.OVERLAP,
        ]
        self.adaptive_reweighting = adaptive_reweighting
        self.noise_robust_loss = noise_robust_loss
        self.refresh_pseudo_labels = refresh_pseudo_labels
        self.early_stop = early_stop
        self.drop_unsound_functions = drop_unsound_functions

    @property
    def reweight_config(self) -> ReweightConfig:
        return ReweightConfig(epsilon=self.epsilon, weight_floor=self.weight_floor)
