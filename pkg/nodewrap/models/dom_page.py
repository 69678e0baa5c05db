"""Data classes to represent parsed detail pages"""
from typing import NamedTuple, Sequence, Tuple

NodeKey = Tuple[str, str, int]


class DomNodeRecord(NamedTuple):
    """One text-bearing DOM node of a detail page"""
    node_id: int
    xpath: str
    tag: str
    text: str
    rel_position: float
    page_id: str
    website_id: str

    @property
    def key(self) -> NodeKey:
        """Identifier of the node that is unique across a vertical"""
        return self.website_id, self.page_id, self.node_id


class DetailPage:
    """A detail page reduced to its ordered text-bearing nodes. Instances are never mutated."""

    def __init__(self, page_id: str, website_id: str, nodes: Sequence[DomNodeRecord]):
        """
        :param page_id: Identifier of the page, unique within the vertical.
        :param website_id: Identifier of the website the page belongs to.
        :param nodes: The text-bearing nodes of the page in document order.
        """
        self.page_id = page_id
        self.website_id = website_id
        self.nodes: Tuple[DomNodeRecord, ...] = tuple(nodes)
        self._by_xpath = {node.xpath: node for node in self.nodes}

    def node_at(self, xpath: str):
        """
        Look up a node by its absolute xpath.
        :param xpath: The absolute xpath of the node.
        :return: The node, or None if the page has no text-bearing node at that xpath.
        """
        return self._by_xpath.get(xpath)

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"DetailPage({self.website_id}/{self.page_id}, {len(self.nodes)} nodes)"
