"""Top-1 extraction, page-level scoring and zero-shot / in-domain experiment splits"""
import json
import logging
from collections import defaultdict
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set

import numpy

from nodewrap.exceptions import (
    DanglingXPath,
    InsufficientLabeledPages,
    InsufficientPages,
    OverlappingSiteSets,
)
from nodewrap.models.classifier_state import ClassifierState
from nodewrap.models.dom_page import DetailPage
from nodewrap.models.reports import AttributeScore, EvalReport, ExtractionResult, Prediction
from nodewrap.models.samples import NONE_LABEL
from nodewrap.utils.classifier import FeatureStore, predict_matrix
from nodewrap.utils.collection_utils import parallel_map
from nodewrap.utils.corpus import LoadedCorpus
from nodewrap.utils.dom import normalize_text

logger = logging.getLogger(__name__)

# page id -> attribute -> normalized texts
GroundTruth = Dict[str, Dict[str, Set[str]]]


def extract_page(
        model: ClassifierState,
        page: DetailPage,
        store: Optional[FeatureStore] = None,
        abstain: bool = True,
) -> ExtractionResult:
    """
    Predict at most one node per attribute: the node with the highest probability for the attribute,
    kept only if that probability beats the node's NONE probability.
    :param model: The trained classifier.
    :param page: The page to extract from.
    :param store: Feature store covering the page. A throwaway store is used when omitted.
    :param abstain: False to always emit the top-1 node, whatever its NONE probability.
    :return: The extraction result of the page.
    """
    result = ExtractionResult(page.page_id, page.website_id)
    if not page.nodes:
        return result

    if store is None:
        store = FeatureStore({page.page_id: page}, model.dimension)
    probabilities = predict_matrix(model, store.matrix(page.nodes))
    none_index = model.class_names.index(NONE_LABEL)

    for class_index, attribute in enumerate(model.class_names):
        if class_index == none_index:
            continue
        best = int(numpy.argmax(probabilities[:, class_index]))
        confidence = float(probabilities[best, class_index])
        if abstain and not confidence > probabilities[best, none_index]:
            continue
        node = page.nodes[best]
        result.predictions[attribute] = Prediction(attribute, node.xpath, node.text, confidence)
    return result


def extract_pages(
        model: ClassifierState,
        pages: Sequence[DetailPage],
        store: Optional[FeatureStore] = None,
        abstain: bool = True,
        num_parallel: int = 4,
) -> List[ExtractionResult]:
    """
    :param model: The trained classifier. Shared read-only across workers.
    :param pages: The pages to extract from.
    :param store: Feature store covering the pages.
    :param abstain: False to force top-1 predictions.
    :param num_parallel: The number of pages to process in parallel.
    :return: One result per page, in page order.
    """
    if store is None:
        store = FeatureStore({page.page_id: page for page in pages}, model.dimension)
        # warm the cache serially so workers only read it
        for page in pages:
            store.matrix(page.nodes)
    return parallel_map(lambda page: extract_page(model, page, store, abstain), pages, num_parallel)


def _score(correct: int, predictions: int, pages: int) -> AttributeScore:
    precision = 100.0 * correct / predictions if predictions else 0.0
    recall = 100.0 * correct / pages if pages else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return AttributeScore(precision, recall, f1, predictions, correct, pages)


def evaluate(
        results: Iterable[ExtractionResult],
        ground_truth: GroundTruth,
        attributes: Sequence[str],
) -> EvalReport:
    """
    Score top-1 predictions page by page. A prediction is correct when its normalized text equals a
    ground-truth text of the attribute on the same page. Precision with no predictions is 0.
    :param results: The extraction results. Pages absent from the ground truth have no true values.
    :param ground_truth: Normalized true texts by page and attribute.
    :param attributes: The attributes to score.
    :return: The evaluation report, scores in percent.
    """
    predictions: Dict[str, int] = defaultdict(int)
    correct: Dict[str, int] = defaultdict(int)
    for result in results:
        page_truth = ground_truth.get(result.page_id, {})
        for attribute, prediction in result.predictions.items():
            predictions[attribute] += 1
            if normalize_text(prediction.text) in page_truth.get(attribute, ()):
                correct[attribute] += 1

    pages: Dict[str, int] = defaultdict(int)
    for page_truth in ground_truth.values():
        for attribute, texts in page_truth.items():
            if texts:
                pages[attribute] += 1

    scores = {
        attribute: _score(correct[attribute], predictions[attribute], pages[attribute])
        for attribute in attributes
    }
    macro_f1 = sum(score.f1 for score in scores.values()) / len(scores) if scores else 0.0
    return EvalReport(scores, macro_f1)


def ground_truth_from_records(records: Iterable[dict]) -> GroundTruth:
    """
    :param records: Dictionaries with "page", "attribute" and "text" keys.
    :return: The ground truth. NONE records are skipped.
    """
    truth: GroundTruth = defaultdict(lambda: defaultdict(set))
    for record in records:
        if record['attribute'] == NONE_LABEL:
            continue
        truth[record['page']][record['attribute']].add(normalize_text(record['text']))
    return {page_id: dict(attributes) for page_id, attributes in truth.items()}


def _read_json_lines(path: str) -> List[dict]:
    records = []
    with open(path, encoding='utf-8') as json_file:
        for line_number, line in enumerate(json_file, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except ValueError as exception:
                raise DanglingXPath(f"Malformed JSON at {path}:{line_number}: {exception}") from exception
    return records


def read_ground_truth(paths: Sequence[str]) -> GroundTruth:
    """
    Read ground-truth JSON-lines files of {"page", "xpath", "attribute", "text"} objects.
    :param paths: The files to read. Later files add to earlier ones.
    :return: The ground truth.
    """
    records: List[dict] = []
    for path in paths:
        records.extend(_read_json_lines(path))
    try:
        return ground_truth_from_records(records)
    except KeyError as exception:
        raise DanglingXPath(f"Ground-truth record without {exception} in {list(paths)}") from exception


def write_predictions(results: Iterable[ExtractionResult], path: str):
    """
    Write one JSON object per prediction.
    :param results: The extraction results.
    :param path: Where to write the JSON-lines file.
    """
    with open(path, 'w', encoding='utf-8') as prediction_file:
        for result in results:
            for attribute in sorted(result.predictions):
                prediction = result.predictions[attribute]
                prediction_file.write(json.dumps({
                    'page': result.page_id,
                    'website': result.website_id,
                    'attribute': attribute,
                    'xpath': prediction.xpath,
                    'text': prediction.text,
                    'confidence': prediction.confidence,
                }, sort_keys=True) + '\n')


def read_predictions(path: str) -> List[ExtractionResult]:
    """
    :param path: A JSON-lines file written by write_predictions.
    :return: The extraction results, sorted by page id. Pages with no prediction are absent.
    """
    results: Dict[str, ExtractionResult] = {}
    for record in _read_json_lines(path):
        page_id = record['page']
        result = results.setdefault(page_id, ExtractionResult(page_id, record.get('website', '')))
        result.predictions[record['attribute']] = Prediction(
            record['attribute'], record['xpath'], record['text'], float(record['confidence'])
        )
    return [results[page_id] for page_id in sorted(results)]


class SplitMode(Enum):
    ZERO_SHOT = 'zero_shot'
    IN_DOMAIN = 'in_domain'


class ExperimentSplit:
    """The training and test page sets of one evaluation setting"""

    def __init__(
            self,
            mode: SplitMode,
            seed_sites: Sequence[str],
            target_sites: Sequence[str],
            labeled_page_ids: Sequence[str],
            pool_page_ids: Sequence[str],
            test_page_ids: Sequence[str],
    ):
        """
        :param mode: The evaluation setting.
        :param seed_sites: Websites whose human labels are used for training.
        :param target_sites: Websites reserved for zero-shot testing.
        :param labeled_page_ids: Human-labeled training pages.
        :param pool_page_ids: Pages whose nodes form the unlabeled pool.
        :param test_page_ids: Pages reserved for testing.
        """
        self.mode = mode
        self.seed_sites = list(seed_sites)
        self.target_sites = list(target_sites)
        self.labeled_page_ids = list(labeled_page_ids)
        self.pool_page_ids = list(pool_page_ids)
        self.test_page_ids = list(test_page_ids)

    def training_corpus(self, corpus: LoadedCorpus) -> LoadedCorpus:
        """
        :param corpus: The full corpus of the vertical.
        :return: A corpus holding the training pages only, with labels of seed websites only.
        """
        page_ids = set(self.labeled_page_ids) | set(self.pool_page_ids)
        return LoadedCorpus(
            pages={page_id: page for page_id, page in corpus.pages.items() if page_id in page_ids},
            labeled={page_id: corpus.labeled[page_id] for page_id in self.labeled_page_ids},
            label_space=corpus.label_space,
        )


# pylint: disable=too-many-arguments
def split_experiment(
        corpus: LoadedCorpus,
        mode: SplitMode,
        seed_sites: Sequence[str],
        target_sites: Sequence[str],
        held_out_per_seed: int = 100,
        seed: int = 0,
) -> ExperimentSplit:
    """
    Split a vertical for zero-shot or in-domain evaluation. Test pages never enter the unlabeled pool.
    Zero-shot tests on every page of the target websites. In-domain tests on unlabeled pages of the
    seed websites.
    :param corpus: The full corpus of the vertical.
    :param mode: The evaluation setting.
    :param seed_sites: Websites whose human labels are used for training.
    :param target_sites: Websites reserved for zero-shot testing. Must not overlap the seed websites.
    :param held_out_per_seed: In-domain test pages per seed website.
    :param seed: Seed of the in-domain page draw.
    :return: The split.
    """
    overlap = sorted(set(seed_sites) & set(target_sites))
    if overlap:
        raise OverlappingSiteSets(f"Websites {overlap} are both seed and target websites")
    known = set(corpus.website_ids())
    for website_id in list(seed_sites) + list(target_sites):
        if website_id not in known:
            raise InsufficientPages(f"Website {website_id} has no pages")

    labeled_by_site = corpus.labeled_pages_by_site()
    labeled_page_ids: List[str] = []
    for website_id in sorted(seed_sites):
        if website_id not in labeled_by_site:
            raise InsufficientLabeledPages(f"Seed website {website_id} has no labeled pages")
        labeled_page_ids.extend(labeled_by_site[website_id])

    test_page_ids: List[str] = []
    if mode == SplitMode.ZERO_SHOT:
        for website_id in sorted(target_sites):
            test_page_ids.extend(page.page_id for page in corpus.pages_of(website_id))
    else:
        rng = numpy.random.default_rng(seed)
        labeled = set(labeled_page_ids)
        for website_id in sorted(seed_sites):
            unseen = [page.page_id for page in corpus.pages_of(website_id) if page.page_id not in labeled]
            if len(unseen) < held_out_per_seed:
                raise InsufficientPages(
                    f"Website {website_id} has {len(unseen)} unlabeled pages, {held_out_per_seed} are needed"
                )
            chosen = numpy.sort(rng.choice(len(unseen), size=held_out_per_seed, replace=False))
            test_page_ids.extend(unseen[index] for index in chosen)

    excluded = set(labeled_page_ids) | set(test_page_ids)
    pool_page_ids = [page_id for page_id in sorted(corpus.pages) if page_id not in excluded]
    logger.info(
        '%s split: %d labeled, %d pool and %d test pages',
        mode.value, len(labeled_page_ids), len(pool_page_ids), len(test_page_ids),
    )
    return ExperimentSplit(
        mode, seed_sites, target_sites, labeled_page_ids, pool_page_ids, sorted(test_page_ids)
    )
