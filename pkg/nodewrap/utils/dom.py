"""Utilities for turning raw HTML detail pages into text-bearing node records"""
import logging
import re
from typing import Iterator, List, Optional, Tuple

from lxml import etree, html

from nodewrap.exceptions import UnparseableDocument
from nodewrap.models.dom_page import DetailPage, DomNodeRecord

logger = logging.getLogger(__name__)

WHITESPACE_REGEX = re.compile(r'\s+')
EXCLUDED_TAGS = frozenset(['script', 'style'])


def normalize_text(raw: str) -> str:
    """
    Collapse whitespace runs to single spaces and trim the ends. Case is left intact.
    :param raw: The raw text.
    :return: The normalized text.
    """
    return WHITESPACE_REGEX.sub(' ', raw).strip()


def direct_text(element) -> str:
    """
    The text an element owns directly: its leading text plus the tail of every child, so descendant
    text is never attributed to an ancestor. Runs are joined with single spaces.
    :param element: An lxml element.
    :return: The normalized direct text, possibly empty.
    """
    runs = [element.text or '']
    for child in element:
        runs.append(child.tail or '')
    return normalize_text(' '.join(runs))


def _is_element(node) -> bool:
    # comments and processing instructions carry a callable tag
    return isinstance(node.tag, str)


def _walk(element, path: str) -> Iterator[Tuple[str, object]]:
    yield path, element

    counters: dict = {}
    for child in element:
        if not _is_element(child):
            continue
        tag = child.tag.lower()
        counters[tag] = counters.get(tag, 0) + 1
        yield from _walk(child, f'{path}/{tag}[{counters[tag]}]')


def iter_elements(root) -> Iterator[Tuple[str, object]]:
    """
    Walk a tree in document order.
    :param root: The root element of the document.
    :return: Pairs of absolute xpath (lowercase tags, 1-based sibling index on every step) and element.
    """
    yield from _walk(root, f'/{root.tag.lower()}[1]')


def element_xpath(element) -> str:
    """
    Absolute xpath of an element in the format produced by iter_elements.
    :param element: An lxml element attached to a tree.
    :return: The absolute xpath.
    """
    steps = []
    while element is not None:
        tag = element.tag.lower()
        index = 1
        sibling = element.getprevious()
        while sibling is not None:
            if _is_element(sibling) and sibling.tag.lower() == tag:
                index += 1
            sibling = sibling.getprevious()
        steps.append(f'{tag}[{index}]')
        element = element.getparent()
    return '/' + '/'.join(reversed(steps))


def _parse_tree(document: bytes):
    try:
        root = html.document_fromstring(document)
    except (etree.ParserError, etree.XMLSyntaxError, ValueError) as exception:
        raise UnparseableDocument(f"Could not recover a DOM tree: {exception}") from exception
    if root is None or not _is_element(root):
        raise UnparseableDocument("Could not recover a DOM tree")
    return root


def parse_page(document: bytes, page_id: str, website_id: str) -> DetailPage:
    """
    Parse a detail page leniently and keep every element whose direct text is non-empty.
    :param document: The raw HTML bytes. Malformed markup is repaired by the parser.
    :param page_id: Identifier of the page.
    :param website_id: Identifier of the website the page belongs to.
    :return: The page with its text-bearing nodes in document order.
    """
    root = _parse_tree(document)

    found: List[Tuple[str, str, str]] = []
    for xpath, element in iter_elements(root):
        tag = element.tag.lower()
        if tag in EXCLUDED_TAGS:
            continue
        text = direct_text(element)
        if text:
            found.append((xpath, tag, text))

    count = len(found)
    nodes = [
        DomNodeRecord(
            node_id=node_id,
            xpath=xpath,
            tag=tag,
            text=text,
            rel_position=node_id / count,
            page_id=page_id,
            website_id=website_id,
        )
        for node_id, (xpath, tag, text) in enumerate(found)
    ]
    return DetailPage(page_id=page_id, website_id=website_id, nodes=nodes)


def parse_page_file(path: str, website_id: str, page_id: Optional[str] = None) -> DetailPage:
    """
    Read and parse one HTML file.
    :param path: Path to a .html or .htm file.
    :param website_id: Identifier of the website the page belongs to.
    :param page_id: Identifier of the page. Defaults to the file name without its extension.
    :return: The parsed page.
    """
    if page_id is None:
        page_id = path.replace('\\', '/').rsplit('/', 1)[-1].rsplit('.', 1)[0]
    with open(path, 'rb') as page_file:
        document = page_file.read()
    try:
        return parse_page(document, page_id=page_id, website_id=website_id)
    except UnparseableDocument:
        logger.error('Unable to parse %s', path)
        raise
