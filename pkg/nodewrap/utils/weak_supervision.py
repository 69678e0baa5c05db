"""
The generative labeler: website relations recovered from labeling functions and cross-site value overlap,
used as a distant supervision source with majority voting
"""
import logging
import re
from collections import Counter, defaultdict
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import Levenshtein
import networkx

from nodewrap.exceptions import UnsoundLabelingFunction
from nodewrap.models.dom_page import DetailPage, DomNodeRecord
from nodewrap.models.relations import LabelingFunction, OverlapRule, SiteRelation, SoundnessResult
from nodewrap.models.samples import NONE_LABEL, LabeledSample, LabelSpace
from nodewrap.utils.collection_utils import parallel_map
from nodewrap.utils.dom import normalize_text

logger = logging.getLogger(__name__)

MAX_WORD_EDIT_DISTANCE = 3
DEFAULT_MIN_OVERLAP = 0.3
LAST_INDEX_REGEX = re.compile(r'\[\d+\]$')


class DistantLabel(NamedTuple):
    """A node the generative labeler assigned to an attribute, with the number of relations voting for it"""
    node: DomNodeRecord
    label: str
    votes: int


def fuzzy_match(text1: str, text2: str, max_distance: int = MAX_WORD_EDIT_DISTANCE) -> bool:
    """
    Two texts match when they have the same number of words and every positionally aligned word pair
    is within the edit distance bound.
    :param text1: A normalized text.
    :param text2: A normalized text.
    :param max_distance: The largest Levenshtein distance allowed per word pair.
    :return: True if the texts match.
    """
    words1 = text1.split()
    words2 = text2.split()
    if len(words1) != len(words2):
        return False
    return all(Levenshtein.distance(word1, word2) <= max_distance for word1, word2 in zip(words1, words2))


def fuzzy_string_matcher(
        node_list: Sequence[DomNodeRecord],
        attribute: str,
        page: DetailPage,
) -> List[DomNodeRecord]:
    """
    Return the nodes of a page whose text fuzzy-matches the text of at least one labeled node.
    :param node_list: Nodes human-labeled as the attribute.
    :param attribute: The attribute of the labeled nodes.
    :param page: The page to search.
    :return: The matching nodes in document order.
    """
    texts = {node.text for node in node_list}
    return [node for node in page.nodes if any(fuzzy_match(text, node.text) for text in texts)]


class FuzzyStringMatcher(LabelingFunction):
    """Labeling function that transfers labels to nodes with near-identical text"""
    name = "fuzzy_string_matcher"

    def apply(
            self,
            node_list: Sequence[DomNodeRecord],
            attribute: str,
            page: DetailPage,
    ) -> List[DomNodeRecord]:
        return fuzzy_string_matcher(node_list, attribute, page)


class XPathConsistencyMatcher(LabelingFunction):
    """
    Labeling function for pages of the same website: a node matches when it sits at the xpath of a
    labeled node and its text fuzzy-matches that node's text.
    """
    name = "xpath_consistency_matcher"

    def apply(
            self,
            node_list: Sequence[DomNodeRecord],
            attribute: str,
            page: DetailPage,
    ) -> List[DomNodeRecord]:
        texts_by_xpath: Dict[str, Set[str]] = defaultdict(set)
        for node in node_list:
            if node.website_id == page.website_id:
                texts_by_xpath[node.xpath].add(node.text)

        return [
            node for node in page.nodes
            if any(fuzzy_match(text, node.text) for text in texts_by_xpath.get(node.xpath, ()))
        ]


def default_labeling_functions() -> List[LabelingFunction]:
    """The labeling functions shipped with nodewrap"""
    return [FuzzyStringMatcher(), XPathConsistencyMatcher()]


def _group_by_site(
        labeled_pages: Iterable[Sequence[LabeledSample]],
) -> Dict[str, List[Sequence[LabeledSample]]]:
    grouped: Dict[str, List[Sequence[LabeledSample]]] = defaultdict(list)
    for samples in labeled_pages:
        if samples:
            grouped[samples[0].website_id].append(samples)
    return grouped


def _page_of(samples: Sequence[LabeledSample]) -> DetailPage:
    return DetailPage(samples[0].page_id, samples[0].website_id, [sample.node for sample in samples])


def check_soundness(
        function: LabelingFunction,
        attribute: str,
        labeled_pages: Iterable[Sequence[LabeledSample]],
) -> SoundnessResult:
    """
    Apply a labeling function to human-labeled pages, seeded with the human-labeled nodes of the same
    website, and collect every returned node that was not human-labeled as the attribute.
    :param function: The labeling function to check.
    :param attribute: The attribute to check the function for.
    :param labeled_pages: The samples of every human-labeled page. Each page must be fully annotated.
    :return: Whether the function is sound, and the violating nodes.
    """
    violations: List[DomNodeRecord] = []
    for site_pages in _group_by_site(labeled_pages).values():
        node_list = [sample.node for samples in site_pages for sample in samples if sample.label == attribute]
        if not node_list:
            continue
        for samples in site_pages:
            allowed = {sample.node.key for sample in samples if sample.label == attribute}
            output = function.apply(node_list, attribute, _page_of(samples))
            violations.extend(node for node in output if node.key not in allowed)

    return SoundnessResult(sound=not violations, violations=violations)


def sound_function_pairs(
        functions: Sequence[LabelingFunction],
        label_space: LabelSpace,
        labeled_pages: Sequence[Sequence[LabeledSample]],
        drop_unsound: bool = False,
) -> List[Tuple[LabelingFunction, str]]:
    """
    Check every (function, attribute) pair against the human labels.
    :param functions: The labeling functions.
    :param label_space: The attribute set.
    :param labeled_pages: The samples of every human-labeled page.
    :param drop_unsound: True to drop unsound pairs with a warning instead of raising.
    :return: The sound (function, attribute) pairs.
    """
    pairs = []
    for function in functions:
        for attribute in label_space.attributes:
            result = check_soundness(function, attribute, labeled_pages)
            if result.sound:
                pairs.append((function, attribute))
                continue

            sample_texts = sorted({node.text for node in result.violations})[:5]
            message = (
                f"Labeling function {function.name} is unsound for '{attribute}': "
                f"{len(result.violations)} violating nodes, e.g. {sample_texts}"
            )
            if not drop_unsound:
                raise UnsoundLabelingFunction(message)
            logger.warning('%s. Dropping it for this attribute.', message)
    return pairs


def template_of(xpath: str) -> str:
    """
    :param xpath: An absolute xpath with sibling indices on every step.
    :return: The xpath with the sibling index of its final step replaced by a wildcard.
    """
    return LAST_INDEX_REGEX.sub('[*]', xpath)


def apply_template(template: str, page: DetailPage) -> List[DomNodeRecord]:
    """
    :param template: An xpath template produced by template_of.
    :param page: The page to extract from.
    :return: The nodes of the page the template matches, in document order.
    """
    return [node for node in page.nodes if template_of(node.xpath) == template]


def _template_values(pages: Sequence[DetailPage]) -> Dict[str, Set[str]]:
    values: Dict[str, Set[str]] = defaultdict(set)
    for page in pages:
        for node in page.nodes:
            values[template_of(node.xpath)].add(node.text)
    return values


def _jaccard(set1: Set[str], set2: Set[str]) -> float:
    union = len(set1 | set2)
    return len(set1 & set2) / union if union else 0.0


def infer_overlap_rules(
        site_pages: Dict[str, Sequence[DetailPage]],
        labeled_samples: Iterable[LabeledSample],
        min_overlap: float = DEFAULT_MIN_OVERLAP,
) -> List[OverlapRule]:
    """
    Align xpath templates of different seed websites whose extracted value sets overlap, then name each
    aligned cluster after the attribute whose human-labeled values it contains most often. Clusters whose
    best attribute is tied or absent are dropped.
    :param site_pages: For each seed website, all of its pages.
    :param labeled_samples: The human-labeled samples of the seed websites.
    :param min_overlap: The Jaccard overlap two templates need to be aligned.
    :return: The overlap rules, sorted by website and template.
    """
    labeled_values: Dict[str, Set[str]] = defaultdict(set)
    for sample in labeled_samples:
        if sample.label != NONE_LABEL:
            labeled_values[sample.label].add(sample.node.text)

    values = {
        website_id: _template_values(pages)
        for website_id, pages in sorted(site_pages.items())
    }

    graph = networkx.Graph()
    websites = sorted(values)
    for position, website_id in enumerate(websites):
        for other_id in websites[position + 1:]:
            for template, template_values in values[website_id].items():
                for other_template, other_values in values[other_id].items():
                    if _jaccard(template_values, other_values) >= min_overlap:
                        graph.add_edge((website_id, template), (other_id, other_template))

    rules = []
    for component in networkx.connected_components(graph):
        component_values: Set[str] = set()
        for website_id, template in component:
            component_values |= values[website_id][template]

        scores = Counter({
            attribute: len(component_values & attribute_values)
            for attribute, attribute_values in labeled_values.items()
        }).most_common()
        if not scores or scores[0][1] == 0:
            continue
        if len(scores) > 1 and scores[1][1] == scores[0][1]:
            logger.debug('Dropping aligned templates %s: tie between %s', sorted(component), scores[:2])
            continue

        attribute = scores[0][0]
        rules.extend(OverlapRule(website_id, template, attribute) for website_id, template in component)

    return sorted(rules)


def build_site_relations(
        labeled_samples: Iterable[LabeledSample],
        function_pairs: Sequence[Tuple[LabelingFunction, str]],
        overlap_rules: Sequence[OverlapRule],
        site_pages: Dict[str, Sequence[DetailPage]],
) -> List[SiteRelation]:
    """
    Combine human labels, labeling-function outputs and overlap-rule extractions into one relation per
    seed website.
    :param labeled_samples: The human-labeled samples of the seed websites.
    :param function_pairs: The sound (labeling function, attribute) pairs to apply.
    :param overlap_rules: The overlap rules to apply.
    :param site_pages: For each seed website, all of its pages.
    :return: One relation per seed website, sorted by website id.
    """
    human: Dict[str, Dict[str, List[DomNodeRecord]]] = defaultdict(lambda: defaultdict(list))
    for sample in labeled_samples:
        if sample.label != NONE_LABEL:
            human[sample.website_id][sample.label].append(sample.node)

    relations = []
    for website_id in sorted(set(site_pages) | set(human)):
        rows: Dict[str, Set[str]] = defaultdict(set)
        for attribute, nodes in human[website_id].items():
            rows[attribute].update(normalize_text(node.text) for node in nodes)

        pages = site_pages.get(website_id, [])
        for function, attribute in function_pairs:
            node_list = human[website_id].get(attribute)
            if not node_list:
                continue
            for page in pages:
                matches = function.apply(node_list, attribute, page)
                rows[attribute].update(normalize_text(node.text) for node in matches)

        for rule in overlap_rules:
            if rule.website_id != website_id:
                continue
            for page in pages:
                matches = apply_template(rule.xpath_template, page)
                rows[rule.attribute].update(normalize_text(node.text) for node in matches)

        relations.append(SiteRelation(website_id, dict(rows)))
        logger.debug('Built %s', relations[-1])

    return relations


def distant_label_page(relations: Sequence[SiteRelation], page: DetailPage) -> List[DistantLabel]:
    """
    Label every node whose text appears in some relation with the attribute most relations assign to
    that text. Ties and unknown texts are left unlabeled; the labeler never emits NONE.
    :param relations: The relations of the seed websites.
    :param page: The page to label.
    :return: The labeled nodes in document order.
    """
    labels = []
    for node in page.nodes:
        votes: Counter = Counter()
        for relation in relations:
            votes.update(relation.attributes_for(node.text))
        if not votes:
            continue
        ranked = votes.most_common()
        if len(ranked) > 1 and ranked[1][1] == ranked[0][1]:
            continue
        labels.append(DistantLabel(node=node, label=ranked[0][0], votes=ranked[0][1]))
    return labels


class GenerativeLabeler:
    """Frozen website relations used as a distant supervision source"""

    def __init__(self, relations: Sequence[SiteRelation]):
        self.relations = list(relations)

    # pylint: disable=too-many-arguments
    @classmethod
    def build(
            cls,
            labeled_pages: Sequence[Sequence[LabeledSample]],
            site_pages: Dict[str, Sequence[DetailPage]],
            label_space: LabelSpace,
            functions: Optional[Sequence[LabelingFunction]] = None,
            use_functions: bool = True,
            use_overlap: bool = True,
            min_overlap: float = DEFAULT_MIN_OVERLAP,
            drop_unsound: bool = False,
    ) -> 'GenerativeLabeler':
        """
        Recover the relation of every seed website.
        :param labeled_pages: The samples of every human-labeled page.
        :param site_pages: For each seed website, all of its pages.
        :param label_space: The attribute set.
        :param functions: The labeling functions. Defaults to the shipped ones.
        :param use_functions: False to ignore labeling functions.
        :param use_overlap: False to ignore cross-site overlap rules.
        :param min_overlap: The Jaccard overlap two templates need to be aligned.
        :param drop_unsound: True to drop unsound functions instead of raising.
        :return: The labeler.
        """
        samples = [sample for page_samples in labeled_pages for sample in page_samples]
        pairs: List[Tuple[LabelingFunction, str]] = []
        if use_functions:
            if functions is None:
                functions = default_labeling_functions()
            pairs = sound_function_pairs(functions, label_space, labeled_pages, drop_unsound=drop_unsound)

        rules: List[OverlapRule] = []
        if use_overlap:
            if len(site_pages) >= 2:
                rules = infer_overlap_rules(site_pages, samples, min_overlap=min_overlap)
            else:
                logger.warning('Overlap rules need at least two seed websites, got %d', len(site_pages))
        logger.info('Inferred %d overlap rules from %d seed websites', len(rules), len(site_pages))

        return cls(build_site_relations(samples, pairs, rules, site_pages))

    def label_page(self, page: DetailPage) -> List[DistantLabel]:
        return distant_label_page(self.relations, page)

    def label_pages(self, pages: Sequence[DetailPage], num_parallel: int = 4) -> List[List[DistantLabel]]:
        return parallel_map(self.label_page, pages, num_parallel)
