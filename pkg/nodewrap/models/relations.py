"""Data classes for the generative labeler: website relations, overlap rules and labeling functions"""
from abc import ABC, abstractmethod
from typing import Dict, List, NamedTuple, Sequence, Set

from nodewrap.models.dom_page import DetailPage, DomNodeRecord


class SiteRelation:
    """The recovered relation of one seed website: attribute name to the value strings it publishes"""

    def __init__(self, website_id: str, rows: Dict[str, Set[str]] = None):
        self.website_id = website_id
        self.rows: Dict[str, Set[str]] = rows or {}

    def attributes_for(self, text: str) -> List[str]:
        """
        :param text: A normalized node text.
        :return: The attributes whose value set contains the text, sorted by name.
        """
        return sorted(attribute for attribute, values in self.rows.items() if text in values)

    def __repr__(self) -> str:
        sizes = {attribute: len(values) for attribute, values in sorted(self.rows.items())}
        return f"SiteRelation({self.website_id}, {sizes})"


class OverlapRule(NamedTuple):
    """An xpath template of a seed website aligned with an attribute through cross-site value overlap"""
    website_id: str
    xpath_template: str
    attribute: str


class SoundnessResult(NamedTuple):
    """Outcome of checking a labeling function against human labels"""
    sound: bool
    violations: List[DomNodeRecord]


class LabelingFunction(ABC):
    """
    A heuristic that, given the human-labeled nodes of an attribute, returns nodes of a page it
    believes carry that attribute. Functions must be sound: on a human-labeled page their output is a
    subset of the nodes labeled with the attribute.
    """
    name = ""

    @abstractmethod
    def apply(
            self,
            node_list: Sequence[DomNodeRecord],
            attribute: str,
            page: DetailPage,
    ) -> List[DomNodeRecord]:
        """
        :param node_list: Nodes human-labeled as the attribute.
        :param attribute: The attribute the nodes were labeled with.
        :param page: The page to label.
        :return: The nodes of the page the function assigns to the attribute, in document order.
        """
        return []

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"
