"""Feature hashing, softmax prediction and weighted gradient training of the node classifier"""
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import mmh3
import numpy
from scipy import sparse

from nodewrap.exceptions import DegeneratePrediction
from nodewrap.models.classifier_state import ClassifierState
from nodewrap.models.dom_page import DetailPage, DomNodeRecord, NodeKey
from nodewrap.models.samples import AugmentedCorpus, LabeledSample, LabelSource, LabelSpace

logger = logging.getLogger(__name__)

DEFAULT_DIMENSION = 2 ** 15
DEFAULT_BATCH_SIZE = 32
PROBABILITY_FLOOR = 1e-12
POSITION_BINS = 10
MAX_TRIGRAM_TEXT = 64
CURRENCY_SYMBOLS = frozenset('$€£¥₹¢')

FeatureVector = Dict[int, float]


def _token_bucket(count: int) -> str:
    if count <= 3:
        return str(count)
    return '4-7' if count <= 7 else '8+'


def feature_strings(node: DomNodeRecord, page: DetailPage) -> List[str]:
    """
    Human-readable features of a node before hashing.
    :param node: The node to describe.
    :param page: The page the node belongs to.
    :return: The feature strings, possibly with repeats.
    """
    text = node.text
    lowered = text.lower()
    words = lowered.split()
    features = [f'w:{word}' for word in words]

    padded = f'^{lowered[:MAX_TRIGRAM_TEXT]}$'
    features.extend(f'c3:{padded[start:start + 3]}' for start in range(len(padded) - 2))

    tags = [step.split('[', 1)[0] for step in node.xpath.strip('/').split('/')]
    last_tags = tags[-3:]
    features.extend(f'x{depth}:{tag}' for depth, tag in enumerate(reversed(last_tags), start=1))
    features.append('xt:' + '/'.join(last_tags))
    features.append('xp:' + '/'.join(tags))
    features.append(f'leaf:{node.tag}')
    features.append(f'pos:{min(int(node.rel_position * POSITION_BINS), POSITION_BINS - 1)}')

    if any(char.isdigit() for char in text):
        features.append('flag:has_digit')
    if any(char.isalpha() for char in text) and text.upper() == text:
        features.append('flag:all_caps')
    if any(char in CURRENCY_SYMBOLS for char in text):
        features.append('flag:currency')
    features.append(f'tok:{_token_bucket(len(words))}')

    if node.node_id > 0:
        previous = page.nodes[node.node_id - 1]
        features.extend(f'prev:{word}' for word in previous.text.lower().split())
    else:
        features.append('prev:<start>')

    return features


def featurize(node: DomNodeRecord, page: DetailPage, dimension: int = DEFAULT_DIMENSION) -> FeatureVector:
    """
    :param node: The node to featurize.
    :param page: The page the node belongs to.
    :param dimension: The size of the hashed feature space.
    :return: A sparse map of hashed feature index to count.
    """
    vector: FeatureVector = {}
    for feature in feature_strings(node, page):
        index = mmh3.hash(feature, 0, signed=False) % dimension
        vector[index] = vector.get(index, 0.0) + 1.0
    return vector


class FeatureStore:
    """Caches hashed features of nodes and assembles them into sparse design matrices"""

    def __init__(self, pages: Dict[str, DetailPage], dimension: int = DEFAULT_DIMENSION):
        """
        :param pages: Every page whose nodes may be featurized, by page id.
        :param dimension: The size of the hashed feature space.
        """
        self.pages = pages
        self.dimension = dimension
        self._cache: Dict[NodeKey, FeatureVector] = {}

    def vector(self, node: DomNodeRecord) -> FeatureVector:
        key = node.key
        if key not in self._cache:
            self._cache[key] = featurize(node, self.pages[node.page_id], self.dimension)
        return self._cache[key]

    def matrix(self, nodes: Sequence[DomNodeRecord]) -> sparse.csr_matrix:
        """
        :param nodes: The nodes to stack.
        :return: A (len(nodes), dimension) CSR matrix with one row per node.
        """
        indptr = [0]
        indices: List[int] = []
        values: List[float] = []
        for node in nodes:
            vector = self.vector(node)
            for index in sorted(vector):
                indices.append(index)
                values.append(vector[index])
            indptr.append(len(indices))
        return sparse.csr_matrix(
            (numpy.array(values, dtype=numpy.float64), numpy.array(indices, dtype=numpy.int64), indptr),
            shape=(len(nodes), self.dimension),
        )


def softmax(logits: numpy.ndarray) -> numpy.ndarray:
    """
    Row-wise softmax, stable under uniform shifts of the logits.
    :param logits: A vector or a (rows, classes) matrix.
    :return: Probabilities of the same shape.
    """
    shifted = logits - numpy.max(logits, axis=-1, keepdims=True)
    exps = numpy.exp(shifted)
    return exps / numpy.sum(exps, axis=-1, keepdims=True)


def predict(model: ClassifierState, vector: FeatureVector) -> numpy.ndarray:
    """
    :param model: The classifier.
    :param vector: The hashed features of one node.
    :return: The soft label, one probability per class.
    """
    logits = model.bias.copy()
    for index, value in vector.items():
        logits += model.weights[:, index] * value
    return softmax(logits)


def predict_matrix(model: ClassifierState, features: sparse.csr_matrix) -> numpy.ndarray:
    """
    :param model: The classifier.
    :param features: A (rows, dimension) feature matrix.
    :return: A (rows, classes) matrix of soft labels.
    """
    if features.shape[0] == 0:
        return numpy.zeros((0, len(model.class_names)))
    probabilities = softmax(numpy.asarray(features.dot(model.weights.T)) + model.bias)
    if not numpy.isfinite(probabilities).all():
        raise DegeneratePrediction("The classifier produced non-finite probabilities")
    return probabilities


def cross_entropy(probabilities: numpy.ndarray, targets: numpy.ndarray) -> numpy.ndarray:
    """
    :param probabilities: A (rows, classes) matrix of soft predictions.
    :param targets: The class index of each row.
    :return: -log p(target) per row, with probabilities floored at 1e-12.
    """
    picked = probabilities[numpy.arange(len(targets)), targets]
    return -numpy.log(numpy.maximum(picked, PROBABILITY_FLOOR))


def loss_and_gradient(
        model: ClassifierState,
        features: sparse.csr_matrix,
        targets: numpy.ndarray,
        multipliers: Optional[numpy.ndarray] = None,
) -> Tuple[float, numpy.ndarray, numpy.ndarray]:
    """
    Mean multiplier-scaled cross-entropy and its gradient.
    :param model: The classifier.
    :param features: A (rows, dimension) feature matrix.
    :param targets: The class index of each row.
    :param multipliers: Per-row loss multipliers. All ones when omitted.
    :return: A tuple of the loss, the weight gradient (classes x dimension) and the bias gradient.
    """
    rows = features.shape[0]
    if multipliers is None:
        multipliers = numpy.ones(rows)
    probabilities = predict_matrix(model, features)
    loss = float(numpy.sum(multipliers * cross_entropy(probabilities, targets)) / rows)

    delta = probabilities.copy()
    delta[numpy.arange(rows), targets] -= 1.0
    delta *= (multipliers / rows)[:, None]
    weight_gradient = numpy.asarray(features.T.dot(delta)).T
    return loss, weight_gradient, delta.sum(axis=0)


def _step(model: ClassifierState, features: sparse.csr_matrix, targets: numpy.ndarray,
          multipliers: numpy.ndarray, alpha: float):
    rows = features.shape[0]
    columns = numpy.unique(features.indices)
    probabilities = predict_matrix(model, features)
    delta = probabilities
    delta[numpy.arange(rows), targets] -= 1.0
    delta *= (multipliers / rows)[:, None]
    # only columns active in the batch have a non-zero gradient
    local_gradient = numpy.asarray(features[:, columns].T.dot(delta)).T
    model.weights[:, columns] -= alpha * local_gradient
    model.bias -= alpha * delta.sum(axis=0)


# pylint: disable=too-many-arguments
def gradient_descent(
        model: ClassifierState,
        features: sparse.csr_matrix,
        targets: numpy.ndarray,
        multipliers: numpy.ndarray,
        epochs: int,
        alpha: float,
        rng: numpy.random.Generator,
        batch_size: int = DEFAULT_BATCH_SIZE,
) -> ClassifierState:
    """
    Plain mini-batch gradient descent on the mean multiplier-scaled cross-entropy.
    :param model: The starting parameters. Not modified.
    :param features: A (rows, dimension) feature matrix.
    :param targets: The class index of each row.
    :param multipliers: Per-row loss multipliers.
    :param epochs: Passes over the data.
    :param alpha: Step size.
    :param rng: Random generator for the batch order.
    :param batch_size: Rows per step.
    :return: The updated parameters.
    """
    model = model.copy()
    rows = features.shape[0]
    if rows == 0:
        return model

    for _ in range(epochs):
        order = rng.permutation(rows)
        for start in range(0, rows, batch_size):
            batch = order[start:start + batch_size]
            _step(model, features[batch], targets[batch], multipliers[batch], alpha)

    if not model.is_finite():
        raise DegeneratePrediction("Training diverged to non-finite parameters")
    return model


def train_supervised(
        model: ClassifierState,
        samples: Sequence[LabeledSample],
        store: FeatureStore,
        epochs: int,
        alpha: float,
        rng: numpy.random.Generator,
        batch_size: int = DEFAULT_BATCH_SIZE,
) -> ClassifierState:
    """
    Train on human labels with unweighted cross-entropy.
    :param model: The starting parameters. Not modified.
    :param samples: The human-labeled samples.
    :param store: Feature store covering the samples' pages.
    :param epochs: Passes over the data.
    :param alpha: Step size.
    :param rng: Random generator for the batch order.
    :param batch_size: Rows per step.
    :return: The trained parameters.
    """
    class_index = {name: index for index, name in enumerate(model.class_names)}
    features = store.matrix([sample.node for sample in samples])
    targets = numpy.array([class_index[sample.label] for sample in samples], dtype=numpy.int64)
    multipliers = numpy.ones(len(samples))
    return gradient_descent(model, features, targets, multipliers, epochs, alpha, rng, batch_size)


class LossConfig:
    """Settings of the student loss"""

    def __init__(self, k: float, rng: numpy.random.Generator, noise_robust: bool = True):
        """
        :param k: The penalty term of the current iteration.
        :param rng: Random generator for the uniform noise term.
        :param noise_robust: False to train the student with plain weighted cross-entropy.
        """
        self.k = k
        self.rng = rng
        self.noise_robust = noise_robust


def robust_loss_value(base_loss: float, weight: float, k: float, uniform: float) -> float:
    """
    :return: e^((1-k)c) * L + e^c * u for base loss L, weight c, penalty k and uniform draw u.
    """
    return math.exp((1.0 - k) * weight) * base_loss + math.exp(weight) * uniform


def noise_robust_loss(
        soft_prediction: numpy.ndarray,
        hard_label: int,
        weight: float,
        cfg: LossConfig,
) -> float:
    """
    Noise-robust loss of one sample. The uniform term does not depend on the model parameters, so it
    changes reported losses only.
    :param soft_prediction: The model's probability vector.
    :param hard_label: Class index of the hard pseudo-label.
    :param weight: The sample weight c in (0, 1].
    :param cfg: Loss settings holding k and the noise generator.
    :return: The loss value.
    """
    probability = soft_prediction[hard_label]
    if not math.isfinite(probability):
        raise DegeneratePrediction(f"Non-finite probability {probability} for class {hard_label}")
    base_loss = -math.log(max(probability, PROBABILITY_FLOOR))
    return robust_loss_value(base_loss, weight, cfg.k, cfg.rng.random())


def sample_multipliers(corpus: AugmentedCorpus, cfg: LossConfig) -> numpy.ndarray:
    """
    Per-sample gradient multipliers of the student loss: c * e^((1-k)c) for pseudo-labeled samples
    (c alone without the noise-robust loss) and 1 for human-labeled samples.
    :param corpus: The augmented corpus with current weights.
    :param cfg: Loss settings.
    :return: One multiplier per sample.
    """
    multipliers = numpy.ones(len(corpus))
    for position, sample in enumerate(corpus.samples):
        if sample.source == LabelSource.HUMAN:
            continue
        factor = math.exp((1.0 - cfg.k) * sample.weight) if cfg.noise_robust else 1.0
        multipliers[position] = sample.weight * factor
    return multipliers


def train_student(
        model: ClassifierState,
        corpus: AugmentedCorpus,
        store: FeatureStore,
        epochs: int,
        alpha: float,
        cfg: LossConfig,
        rng: numpy.random.Generator,
        batch_size: int = DEFAULT_BATCH_SIZE,
) -> Tuple[ClassifierState, float]:
    """
    Fine-tune a copy of the teacher on the weighted augmented corpus.
    :param model: The teacher parameters the student starts from. Not modified.
    :param corpus: The augmented corpus. Every sample carries a hard label and a weight.
    :param store: Feature store covering the corpus pages.
    :param epochs: Passes over the data.
    :param alpha: Step size.
    :param cfg: Loss settings.
    :param rng: Random generator for the batch order.
    :param batch_size: Rows per step.
    :return: A tuple of the student parameters and its mean training loss, noise term included.
    """
    if not len(corpus):
        return model.copy(), 0.0

    class_index = {name: index for index, name in enumerate(model.class_names)}
    features = store.matrix([sample.node for sample in corpus.samples])
    targets = numpy.array([class_index[sample.hard_label] for sample in corpus.samples], dtype=numpy.int64)
    multipliers = sample_multipliers(corpus, cfg)

    student = gradient_descent(model, features, targets, multipliers, epochs, alpha, rng, batch_size)

    probabilities = predict_matrix(student, features)
    losses = []
    for position, sample in enumerate(corpus.samples):
        if sample.source == LabelSource.HUMAN or not cfg.noise_robust:
            row = slice(position, position + 1)
            base = float(cross_entropy(probabilities[row], targets[row])[0])
            losses.append(multipliers[position] * base)
        else:
            robust = noise_robust_loss(probabilities[position], targets[position], sample.weight, cfg)
            losses.append(sample.weight * robust)
    mean_loss = float(numpy.mean(losses))
    logger.debug('Student trained on %d samples, mean loss %.5f', len(corpus), mean_loss)
    return student, mean_loss


def hard_labels(probabilities: numpy.ndarray, label_space: LabelSpace) -> List[str]:
    """
    :param probabilities: A (rows, classes) matrix of soft labels.
    :param label_space: The class order.
    :return: The argmax label of each row.
    """
    return [label_space.label_at(int(index)) for index in numpy.argmax(probabilities, axis=1)]
