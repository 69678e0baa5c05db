"""Per-page sample weights estimated from validation accuracy and page overlap"""
from enum import Enum
from typing import Dict, FrozenSet, Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy

from nodewrap.exceptions import NoValidationEntries
from nodewrap.models.dom_page import DomNodeRecord
from nodewrap.models.samples import ValidationSet
from nodewrap.models.training_config import ReweightConfig


class WeightCase(Enum):
    """Which rule produced a page weight"""
    HUMAN_LABELED = 'A'
    SEED_SITE = 'B'
    OTHER_SITE = 'C'
    UNIFORM = 'uniform'


class PageSignature(NamedTuple):
    """The (predicted label, text) pairs of a page under one model snapshot"""
    page_id: str
    label_text_set: FrozenSet[Tuple[str, str]]


class PageWeight(NamedTuple):
    """A page weight with the rule that produced it"""
    page_id: str
    weight: float
    case: WeightCase
    matched_validation_page: Optional[str] = None


def build_page_signature(
        page_id: str,
        nodes: Iterable[DomNodeRecord],
        hard_labels: Iterable[str],
) -> PageSignature:
    """
    :param page_id: The page the nodes belong to.
    :param nodes: The nodes of the page.
    :param hard_labels: The hard prediction of the current model for each node, in the same order.
    :return: The page signature.
    """
    return PageSignature(page_id, frozenset(zip(hard_labels, (node.text for node in nodes))))


def page_overlap(sig1: PageSignature, sig2: PageSignature, cfg: ReweightConfig) -> float:
    """
    Floored Jaccard similarity of two page signatures. Two empty signatures overlap by epsilon.
    :param sig1: A page signature.
    :param sig2: A page signature built with the same model snapshot.
    :param cfg: Reweighting configuration holding epsilon.
    :return: The overlap in [epsilon, 1].
    """
    union = len(sig1.label_text_set | sig2.label_text_set)
    if not union:
        return cfg.epsilon
    return max(cfg.epsilon, len(sig1.label_text_set & sig2.label_text_set) / union)


def _clamp(value: float, cfg: ReweightConfig) -> float:
    return min(1.0, max(cfg.weight_floor, value))


def hard_accuracy_for_site(validation: ValidationSet, website_id: str, cfg: ReweightConfig) -> float:
    """
    :param validation: The validation set with current pseudo-labels.
    :param website_id: A seed website.
    :param cfg: Reweighting configuration holding the weight floor.
    :return: The fraction of the website's validation nodes whose hard pseudo-label is correct,
    clamped to [weight_floor, 1].
    """
    entries = validation.for_site(website_id)
    if not entries:
        raise NoValidationEntries(f"No validation entries for website {website_id}")
    correct = sum(1 for entry in entries if entry.hard_label == entry.human_label)
    return _clamp(correct / len(entries), cfg)


def soft_accuracy_for_page(
        validation: ValidationSet,
        page_id: str,
        cfg: ReweightConfig,
        class_index: Dict[str, int],
) -> float:
    """
    :param validation: The validation set with current pseudo-labels.
    :param page_id: A validation page.
    :param cfg: Reweighting configuration holding the weight floor.
    :param class_index: Index of each label in the soft pseudo-label vectors.
    :return: The mean probability mass the soft pseudo-labels of the page put on the human label,
    clamped to [weight_floor, 1].
    """
    entries = validation.for_page(page_id)
    if not entries:
        raise NoValidationEntries(f"No validation entries for page {page_id}")
    mass = numpy.mean([entry.soft_label[class_index[entry.human_label]] for entry in entries])
    return _clamp(float(mass), cfg)


# pylint: disable=too-many-arguments
def compute_page_weight(
        page_id: str,
        website_id: str,
        validation: ValidationSet,
        signatures: Dict[str, PageSignature],
        is_human_labeled_seed_page: bool,
        is_seed_site: bool,
        cfg: ReweightConfig,
        class_index: Dict[str, int],
        validation_page_ids: Optional[Sequence[str]] = None,
) -> PageWeight:
    """
    Weight shared by every node of a training page.
    Human-labeled seed pages weigh 1. Other pages of a seed website take the website's hard pseudo-label
    accuracy on validation. Pages of any other website take the soft accuracy of the best-overlapping
    validation page times that overlap.
    :param page_id: The training page.
    :param website_id: The website of the training page.
    :param validation: The validation set with current pseudo-labels.
    :param signatures: Signatures of the training page and of every validation page, by page id.
    :param is_human_labeled_seed_page: True if the page is a human-labeled page of a seed website.
    :param is_seed_site: True if the page belongs to a seed website.
    :param cfg: Reweighting configuration.
    :param class_index: Index of each label in the soft pseudo-label vectors.
    :param validation_page_ids: The validation page ids, sorted. Computed from the set when omitted.
    :return: The page weight in (0, 1].
    """
    if not len(validation):
        raise NoValidationEntries("The validation set is empty")
    if is_human_labeled_seed_page:
        return PageWeight(page_id, 1.0, WeightCase.HUMAN_LABELED)
    if is_seed_site:
        return PageWeight(page_id, hard_accuracy_for_site(validation, website_id, cfg), WeightCase.SEED_SITE)

    if validation_page_ids is None:
        validation_page_ids = validation.page_ids()
    best_page, best_overlap = None, -1.0
    for validation_page_id in validation_page_ids:
        overlap = page_overlap(signatures[page_id], signatures[validation_page_id], cfg)
        if overlap > best_overlap:
            best_page, best_overlap = validation_page_id, overlap

    weight = soft_accuracy_for_page(validation, best_page, cfg, class_index) * best_overlap
    return PageWeight(page_id, _clamp(weight, cfg), WeightCase.OTHER_SITE, best_page)
