"""Shared fixtures for the unit tests"""
from typing import Dict, List, Optional, Sequence, Tuple

from nodewrap.models.dom_page import DetailPage, DomNodeRecord
from nodewrap.models.samples import LabelSpace
from nodewrap.models.synth_config import NoiseConfig
from nodewrap.models.training_config import TrainingConfig
from nodewrap.utils.corpus import LabelRecord, LoadedCorpus, label_pages
from nodewrap.utils.dom import parse_page
from nodewrap.utils.synth import RenderedSite, preset_vertical, render_website

MOVIE_ATTRIBUTES = ['title', 'director', 'genre', 'mpaa_rating']
ZERO_NOISE = NoiseConfig(extraneous_attribute_count=1, null_rate=0.0, wrong_value_rate=0.0)


def make_page(
        page_id: str,
        website_id: str,
        texts: Sequence[str],
        tags: Optional[Sequence[str]] = None,
) -> DetailPage:
    """
    Build a page of sibling nodes without going through HTML.
    :param page_id: The page id.
    :param website_id: The website id.
    :param texts: The node texts in document order.
    :param tags: The tag of each node. Defaults to td.
    :return: The page.
    """
    tags = tags or ['td'] * len(texts)
    nodes = [
        DomNodeRecord(
            node_id=node_id,
            xpath=f'/html[1]/body[1]/table[1]/tr[{node_id + 1}]/{tag}[1]',
            tag=tag,
            text=text,
            rel_position=node_id / len(texts),
            page_id=page_id,
            website_id=website_id,
        )
        for node_id, (text, tag) in enumerate(zip(texts, tags))
    ]
    return DetailPage(page_id, website_id, nodes)


def movie_html(title: str, director: str, extra: str = '') -> bytes:
    """A small movie detail page with a table of labels and values"""
    return (
        '<!DOCTYPE html><html><head><title>Movie page</title></head><body>'
        f'<h1>{title}</h1>'
        '<table>'
        f'<tr><th>Director</th><td>{director}</td></tr>'
        f'<tr><th>Notes</th><td>{extra}</td></tr>'
        '</table>'
        '</body></html>'
    ).encode('utf-8')


def synthetic_sites(
        sites: int = 3,
        pages_per_site: int = 30,
        seed: int = 0,
        preset: str = 'dense',
        noise: Optional[NoiseConfig] = None,
) -> Dict[str, RenderedSite]:
    """
    Render a small synthetic movie vertical in memory.
    :return: The rendered websites by id.
    """
    relation, configs = preset_vertical(
        preset, 'movie', sites=sites, pages_per_site=pages_per_site, seed=seed, noise=noise or ZERO_NOISE
    )
    rendered = [render_website(relation, cfg) for cfg in configs]
    return {site.website_id: site for site in rendered}


def corpus_from_sites(
        sites: Dict[str, RenderedSite],
        seed_sites: Sequence[str],
        labeled_pages: int,
) -> LoadedCorpus:
    """
    Parse rendered websites and label the first pages of every seed website from the ground truth.
    :param sites: The rendered websites.
    :param seed_sites: The websites that get human labels.
    :param labeled_pages: The number of labeled pages per seed website.
    :return: The corpus.
    """
    pages: Dict[str, DetailPage] = {}
    records: List[LabelRecord] = []
    for website_id, site in sorted(sites.items()):
        for index, (page_id, document) in enumerate(zip(site.page_ids, site.documents)):
            pages[page_id] = parse_page(document, page_id, website_id)
            if website_id in seed_sites and index < labeled_pages:
                records.extend(
                    LabelRecord(record.page, record.xpath, record.attribute)
                    for record in site.ground_truth[index]
                )
    label_space = LabelSpace(MOVIE_ATTRIBUTES)
    labeled = label_pages(pages, records, label_space)
    return LoadedCorpus(pages=pages, labeled=labeled, label_space=label_space)


def synthetic_corpus(
        sites: int = 3,
        pages_per_site: int = 30,
        seed_sites: int = 2,
        labeled_pages: int = 6,
        seed: int = 0,
) -> Tuple[LoadedCorpus, Dict[str, RenderedSite]]:
    """
    :return: A parsed and labeled synthetic corpus with the websites it was rendered from.
    """
    rendered = synthetic_sites(sites=sites, pages_per_site=pages_per_site, seed=seed)
    seed_ids = sorted(rendered)[:seed_sites]
    return corpus_from_sites(rendered, seed_ids, labeled_pages), rendered


def small_training_config(**overrides) -> TrainingConfig:
    """A configuration small enough for unit tests"""
    values = dict(
        T=2,
        L=150,
        alpha=0.1,
        epochs_teacher=5,
        epochs_student=2,
        feature_dimension=2 ** 12,
        validation_pages_per_site=2,
        num_parallel=1,
        seed=7,
    )
    values.update(overrides)
    return TrainingConfig(**values)
