"""The parameters of the feature-hashed softmax node classifier"""
import json
from typing import List, Sequence

import numpy

CHECKPOINT_FORMAT_VERSION = 1


class ClassifierState:
    """Weights (classes x dimension) and bias of a linear softmax model over hashed node features"""

    def __init__(
            self,
            class_names: Sequence[str],
            dimension: int,
            seed: int = 0,
            weights: numpy.ndarray = None,
            bias: numpy.ndarray = None,
    ):
        """
        :param class_names: The class order. Fixed for the lifetime of the model.
        :param dimension: The size of the hashed feature space.
        :param seed: The seed the model was trained with.
        :param weights: Initial weights. Zero when omitted.
        :param bias: Initial bias. Zero when omitted.
        """
        self.class_names: List[str] = list(class_names)
        self.dimension = dimension
        self.seed = seed
        shape = (len(self.class_names), dimension)
        self.weights = numpy.zeros(shape) if weights is None else numpy.array(weights, dtype=numpy.float64)
        self.bias = numpy.zeros(shape[0]) if bias is None else numpy.array(bias, dtype=numpy.float64)
        if self.weights.shape != shape or self.bias.shape != (len(self.class_names),):
            raise ValueError(f"Parameter shapes {self.weights.shape}/{self.bias.shape} do not match {shape}")

    def copy(self) -> 'ClassifierState':
        return ClassifierState(
            self.class_names, self.dimension, self.seed, self.weights.copy(), self.bias.copy()
        )

    def is_finite(self) -> bool:
        return bool(numpy.isfinite(self.weights).all() and numpy.isfinite(self.bias).all())

    def to_dict(self) -> dict:
        """
        Checkpoint representation. Only feature columns with a non-zero weight are stored.
        :return: A JSON-serializable dictionary.
        """
        columns = numpy.flatnonzero(numpy.any(self.weights != 0.0, axis=0))
        return {
            'format_version': CHECKPOINT_FORMAT_VERSION,
            'dimension': self.dimension,
            'class_names': self.class_names,
            'seed': self.seed,
            'bias': self.bias.tolist(),
            'columns': columns.tolist(),
            'weights': self.weights[:, columns].T.tolist(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> 'ClassifierState':
        if obj.get('format_version') != CHECKPOINT_FORMAT_VERSION:
            raise ValueError(f"Unsupported checkpoint format version: {obj.get('format_version')}")
        state = cls(obj['class_names'], obj['dimension'], obj['seed'], bias=obj['bias'])
        columns = numpy.array(obj['columns'], dtype=numpy.int64)
        if columns.size:
            state.weights[:, columns] = numpy.array(obj['weights'], dtype=numpy.float64).T
        return state

    def save(self, path: str):
        """
        Write a JSON checkpoint. Identical parameters produce byte-identical files.
        :param path: Where to write the checkpoint.
        """
        with open(path, 'w', encoding='utf-8') as checkpoint_file:
            json.dump(self.to_dict(), checkpoint_file, sort_keys=True, separators=(',', ':'))

    @classmethod
    def load(cls, path: str) -> 'ClassifierState':
        with open(path, encoding='utf-8') as checkpoint_file:
            return cls.from_dict(json.load(checkpoint_file))
