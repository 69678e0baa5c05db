"""Utilities for loading corpora, splitting labeled pages and sampling the unlabeled pool"""
import json
import logging
from collections import defaultdict
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import numpy

from nodewrap.exceptions import (
    ConflictingLabel,
    DanglingXPath,
    InsufficientLabeledPages,
    InvalidConfig,
)
from nodewrap.models.dom_page import DetailPage, DomNodeRecord, NodeKey
from nodewrap.models.samples import (
    NONE_LABEL,
    AugmentedCorpus,
    LabeledSample,
    LabelSpace,
    PseudoLabeledSample,
    ValidationEntry,
    ValidationSet,
)
from nodewrap.utils.collection_utils import parallel_map
from nodewrap.utils.dom import parse_page_file
from nodewrap.utils.path import find_page_files

logger = logging.getLogger(__name__)

LabelRecord = NamedTuple('LabelRecord', [('page', str), ('xpath', str), ('attribute', str)])


class LoadedCorpus:
    """Every parsed page of a vertical, split into human-labeled samples and an unlabeled node pool"""

    def __init__(
            self,
            pages: Dict[str, DetailPage],
            labeled: Dict[str, List[LabeledSample]],
            label_space: LabelSpace,
    ):
        """
        :param pages: All parsed pages by page id.
        :param labeled: The human-labeled samples of every labeled page, by page id.
        :param label_space: The attribute set the labels were validated against.
        """
        self.pages = pages
        self.labeled = labeled
        self.label_space = label_space

    @property
    def unlabeled_page_ids(self) -> List[str]:
        return sorted(page_id for page_id in self.pages if page_id not in self.labeled)

    @property
    def unlabeled_pool(self) -> List[DomNodeRecord]:
        return pool_from_pages(self.pages[page_id] for page_id in self.unlabeled_page_ids)

    def website_ids(self) -> List[str]:
        return sorted({page.website_id for page in self.pages.values()})

    def seed_website_ids(self) -> List[str]:
        return sorted({self.pages[page_id].website_id for page_id in self.labeled})

    def pages_of(self, website_id: str) -> List[DetailPage]:
        return [page for _, page in sorted(self.pages.items()) if page.website_id == website_id]

    def labeled_pages_by_site(self) -> Dict[str, List[str]]:
        by_site: Dict[str, List[str]] = defaultdict(list)
        for page_id in sorted(self.labeled):
            by_site[self.pages[page_id].website_id].append(page_id)
        return dict(by_site)


def pool_from_pages(pages: Iterable[DetailPage]) -> List[DomNodeRecord]:
    """
    Flatten pages into an unlabeled node pool.
    :param pages: The pages to draw nodes from.
    :return: Every node of every page, in page then document order.
    """
    return [node for page in pages for node in page.nodes]


def read_label_file(path: str) -> List[LabelRecord]:
    """
    Read a JSON-lines label file with one {"page", "xpath", "attribute"} object per labeled node.
    :param path: Path to the label file.
    :return: The label records in file order. Extra keys such as "source" are ignored.
    """
    records = []
    with open(path, encoding='utf-8') as label_file:
        for line_number, line in enumerate(label_file, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records.append(LabelRecord(obj['page'], obj['xpath'], obj['attribute']))
            except (ValueError, KeyError) as exception:
                raise DanglingXPath(f"Malformed label at {path}:{line_number}: {exception}") from exception
    return records


def load_pages(vertical_dir: str, num_parallel: int = 4) -> Dict[str, DetailPage]:
    """
    Parse every page of a vertical directory.
    :param vertical_dir: Directory laid out as <vertical>/<website_id>/<page_id>.html.
    :param num_parallel: The number of pages to parse in parallel.
    :return: The parsed pages by page id.
    """
    jobs = [
        (website_id, path)
        for website_id, paths in find_page_files(vertical_dir).items()
        for path in paths
    ]
    parsed = parallel_map(lambda job: parse_page_file(job[1], website_id=job[0]), jobs, num_parallel)

    pages: Dict[str, DetailPage] = {}
    sources: Dict[str, str] = {}
    for (_, path), page in zip(jobs, parsed):
        if page.page_id in pages:
            raise DanglingXPath(
                f"Page id '{page.page_id}' is used by both {sources[page.page_id]} and {path}; "
                f"page ids must be unique within a vertical"
            )
        pages[page.page_id] = page
        sources[page.page_id] = path
    logger.info('Parsed %d pages from %s', len(pages), vertical_dir)
    return pages


def label_pages(
        pages: Dict[str, DetailPage],
        records: Iterable[LabelRecord],
        label_space: LabelSpace,
) -> Dict[str, List[LabeledSample]]:
    """
    Turn label records into samples. Every node of a labeled page becomes a sample; nodes the records
    do not mention are labeled NONE.
    :param pages: The parsed pages by page id.
    :param records: The label records.
    :param label_space: The attribute set labels must belong to.
    :return: The samples of every labeled page, by page id, in document order.
    """
    by_page: Dict[str, Dict[str, str]] = defaultdict(dict)
    for record in records:
        label_space.index_of(record.attribute)
        if record.attribute == NONE_LABEL:
            continue
        page = pages.get(record.page)
        if page is None:
            raise DanglingXPath(f"Label references unknown page '{record.page}'")
        if page.node_at(record.xpath) is None:
            raise DanglingXPath(f"Label references missing node {record.xpath} on page '{record.page}'")
        existing = by_page[record.page].get(record.xpath)
        if existing is not None and existing != record.attribute:
            raise ConflictingLabel(
                f"Node {record.xpath} on page '{record.page}' is labeled both "
                f"{existing} and {record.attribute}"
            )
        by_page[record.page][record.xpath] = record.attribute

    labeled = {}
    for page_id, xpaths in by_page.items():
        page = pages[page_id]
        labeled[page_id] = [
            LabeledSample(
                node=node,
                label=xpaths.get(node.xpath, NONE_LABEL),
                page_id=page_id,
                website_id=page.website_id,
            )
            for node in page.nodes
        ]
    return labeled


def load_corpus(
        page_dir: str,
        label_files: Optional[Sequence[str]],
        attribute_set: Sequence[str],
        num_parallel: int = 4,
) -> LoadedCorpus:
    """
    Parse a vertical and attach human labels.
    :param page_dir: Directory laid out as <vertical>/<website_id>/<page_id>.html.
    :param label_files: JSON-lines label files, or None when every page is unlabeled.
    :param attribute_set: The attributes to extract.
    :param num_parallel: The number of pages to parse in parallel.
    :return: The loaded corpus.
    """
    label_space = LabelSpace(attribute_set)
    pages = load_pages(page_dir, num_parallel=num_parallel)
    records: List[LabelRecord] = []
    for label_file in label_files or []:
        records.extend(read_label_file(label_file))
    labeled = label_pages(pages, records, label_space)
    logger.info('Loaded %d labeled and %d unlabeled pages', len(labeled), len(pages) - len(labeled))
    return LoadedCorpus(pages=pages, labeled=labeled, label_space=label_space)


def split_initial(
        labeled_pages_per_site: Dict[str, List[List[LabeledSample]]],
        validation_pages_per_site: int,
        label_space: LabelSpace,
        rng: numpy.random.Generator,
) -> Tuple[AugmentedCorpus, ValidationSet]:
    """
    Split human-labeled pages into the initial augmented corpus and the validation set. The split is
    page-level: no page contributes nodes to both sides.
    :param labeled_pages_per_site: For each seed website, the samples of each of its labeled pages.
    :param validation_pages_per_site: The number of pages per website that go to validation.
    :param label_space: The attribute set.
    :param rng: Random generator that decides which pages are held out.
    :return: A tuple of the augmented corpus A(0) and the validation set V(0).
    """
    if validation_pages_per_site < 1:
        raise InvalidConfig("validation_pages_per_site must be at least 1")

    training: List[PseudoLabeledSample] = []
    entries: List[ValidationEntry] = []
    for website_id in sorted(labeled_pages_per_site):
        site_pages = sorted(labeled_pages_per_site[website_id], key=lambda samples: samples[0].page_id)
        if len(site_pages) < validation_pages_per_site + 1:
            raise InsufficientLabeledPages(
                f"Website {website_id} has {len(site_pages)} labeled pages, "
                f"at least {validation_pages_per_site + 1} are needed"
            )
        order = rng.permutation(len(site_pages))
        held_out = set(order[:validation_pages_per_site].tolist())
        for index, samples in enumerate(site_pages):
            if index in held_out:
                entries.extend(
                    ValidationEntry(sample.node, sample.label, len(label_space)) for sample in samples
                )
            else:
                training.extend(PseudoLabeledSample.from_human(sample, label_space) for sample in samples)

    return AugmentedCorpus(training), ValidationSet(entries)


def sample_unlabeled(
        pool: Sequence[DomNodeRecord],
        limit: int,
        rng: numpy.random.Generator,
        consumed_ids: Set[NodeKey],
) -> List[DomNodeRecord]:
    """
    Draw up to `limit` nodes uniformly without replacement from the pool, skipping consumed nodes.
    :param pool: The unlabeled node pool.
    :param limit: The maximum number of nodes to draw.
    :param rng: Random generator for the draw.
    :param consumed_ids: Keys of nodes drawn before. Updated in place with the new draws.
    :return: The drawn nodes in pool order. Fewer than `limit` only when the pool is exhausted.
    """
    available = [node for node in pool if node.key not in consumed_ids]
    if len(available) > limit:
        chosen = numpy.sort(rng.choice(len(available), size=limit, replace=False))
        available = [available[index] for index in chosen]
    if not available:
        logger.info('Unlabeled pool is exhausted')

    consumed_ids.update(node.key for node in available)
    return available
