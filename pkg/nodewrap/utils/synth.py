"""Synthetic verticals: an entity relation rendered into noisy templated pages with exact ground truth"""
import json
import logging
import math
import os
from collections import defaultdict
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import numpy
from lxml import html
from lxml.html import builder as E

from nodewrap.exceptions import InvalidConfig
from nodewrap.models.relations import SiteRelation
from nodewrap.models.synth_config import (
    AbstractRelation,
    AttributeSpec,
    NoiseConfig,
    SiteGenConfig,
    SiteTemplate,
    VerticalSchema,
)
from nodewrap.utils.collection_utils import parallel_map
from nodewrap.utils.dom import element_xpath
from nodewrap.utils.weak_supervision import fuzzy_match

logger = logging.getLogger(__name__)

LAYOUTS = ('table', 'list', 'div')
REDESIGN_LAYOUTS = ('cards', 'columns')
# block tag, then row, label and value tags of every layout
SLOT_TAGS = {
    'table': (E.TABLE, E.TR, E.TH, E.TD),
    'list': (E.UL, E.LI, E.STRONG, E.SPAN),
    'div': (E.DIV, E.DIV, E.SPAN, E.DIV),
    'cards': (E.DIV, E.DIV, E.SPAN, E.EM),
    'columns': (E.DIV, E.P, E.SPAN, E.B),
}
SYLLABLES = (
    'ka', 'lo', 'ven', 'dra', 'mir', 'tes', 'qua', 'zor', 'bel', 'nix', 'har', 'pol', 'sun', 'vik', 'ter',
    'ma', 'ris', 'gan', 'dov', 'lyn', 'cor', 'ebb', 'fen', 'jus', 'wex', 'yor', 'tam', 'pri', 'sol', 'ulm',
)
CITIES = ('Boston', 'Denver', 'Phoenix', 'Orlando', 'Seattle', 'Memphis',
          'Toronto', 'Chicago', 'Atlanta', 'Houston')
MAX_DRAWS_PER_VALUE = 50
DEFAULT_VOCABULARY_SIZE = 20
GROUND_TRUTH_FILE = 'ground_truth.jsonl'
RELATION_FILE = 'relation.json'
SCHEMA_FILE = 'schema.json'
HUMAN_LABEL_FILE = 'human_labels.jsonl'
VALIDATION_LABEL_FILE = 'validation_labels.jsonl'
MIN_SITES = 5
DEFAULT_LABELED_PAGES = 9
DEFAULT_VALIDATION_PAGES = 10
DEFAULT_REDESIGN_RATE = 0.5

COMMON_DISTRACTORS = (
    'Sign in to rate and review this entry today',
    'All content on this page is provided for reference only',
    'Share this page with your friends and family members',
    'Copyright notice all rights reserved by the site owners',
    'Related listings are updated every single business day',
    'Subscribe to our newsletter for weekly updates and news',
)
EXTRANEOUS = (
    AttributeSpec('catalog_code', 'code', ('Catalog no.', 'Ref code')),
    AttributeSpec('listing_code', 'code', ('Listing id', 'Entry number')),
)

PRESETS: Dict[str, VerticalSchema] = {
    'movie': VerticalSchema('movie', [
        AttributeSpec('title', 'title', ('Title', 'Film')),
        AttributeSpec('director', 'person', ('Director', 'Directed by')),
        AttributeSpec('genre', 'choice', ('Genre', 'Category'), (
            'Drama', 'Comedy', 'Thriller', 'Horror', 'Documentary', 'Animation', 'Romance', 'Western',
            'Fantasy', 'Musical', 'Adventure', 'Mystery',
        )),
        AttributeSpec('mpaa_rating', 'choice', ('MPAA', 'Rated'), ('G', 'PG', 'PG-13', 'R', 'NC-17')),
    ], EXTRANEOUS, COMMON_DISTRACTORS),
    'nba-player': VerticalSchema('nba-player', [
        AttributeSpec('name', 'person', ('Player', 'Name')),
        AttributeSpec('team', 'team', ('Team', 'Club')),
        AttributeSpec('height', 'height', ('Height', 'Stands')),
        AttributeSpec('weight', 'weight', ('Weight', 'Weighs')),
    ], EXTRANEOUS, COMMON_DISTRACTORS),
    'auto': VerticalSchema('auto', [
        AttributeSpec('model', 'model', ('Model', 'Vehicle')),
        AttributeSpec('price', 'price', ('Price', 'MSRP')),
        AttributeSpec('engine', 'engine', ('Engine', 'Powertrain')),
        AttributeSpec('fuel_economy', 'mileage', ('Fuel economy', 'Mileage')),
    ], EXTRANEOUS, COMMON_DISTRACTORS),
    'university': VerticalSchema('university', [
        AttributeSpec('name', 'university', ('University', 'Institution')),
        AttributeSpec('phone', 'phone', ('Phone', 'Telephone')),
        AttributeSpec('website', 'url', ('Website', 'Homepage')),
        AttributeSpec(
            'type', 'choice', ('Type', 'Control'), ('Public', 'Private', 'Nonprofit', 'Proprietary')
        ),
    ], EXTRANEOUS, COMMON_DISTRACTORS),
}

# fraction of each website's entities shared with every other website
PRESET_SHARED_FRACTIONS = {'dense': 0.6, 'sparse': 0.1}


class GroundTruthRecord(NamedTuple):
    page: str
    xpath: str
    attribute: str
    text: str


class RenderedSite:
    """The pages, ground truth and post-noise relation of one synthetic website"""

    def __init__(
            self,
            website_id: str,
            page_ids: List[str],
            documents: List[bytes],
            ground_truth: List[List[GroundTruthRecord]],
            relation: SiteRelation,
            redesigned: Iterable[str] = (),
    ):
        self.website_id = website_id
        self.page_ids = page_ids
        self.documents = documents
        self.ground_truth = ground_truth
        self.relation = relation
        self.redesigned = set(redesigned)


def _pseudo_word(rng: numpy.random.Generator, syllables: int) -> str:
    return ''.join(SYLLABLES[index] for index in rng.integers(0, len(SYLLABLES), size=syllables)).capitalize()


# pylint: disable=too-many-return-statements
def _make_value(spec: AttributeSpec, rng: numpy.random.Generator) -> str:
    kind = spec.kind
    if kind == 'person':
        return f'{_pseudo_word(rng, 2)} {_pseudo_word(rng, 3)}'
    if kind == 'title':
        words = [_pseudo_word(rng, int(rng.integers(2, 4))) for _ in range(int(rng.integers(1, 3)))]
        return ' '.join(['The'] + words)
    if kind == 'team':
        return f'{CITIES[int(rng.integers(0, len(CITIES)))]} {_pseudo_word(rng, 2)}s'
    if kind == 'height':
        return f'{int(rng.integers(5, 8))} ft {int(rng.integers(0, 12))} in'
    if kind == 'weight':
        return f'{int(rng.integers(160, 300))} lbs'
    if kind == 'model':
        return f'{_pseudo_word(rng, 2)} {_pseudo_word(rng, 1).upper()}{int(rng.integers(1, 10))}'
    if kind == 'price':
        return f'${int(rng.integers(15, 90))},{int(rng.integers(0, 1000)):03d}'
    if kind == 'engine':
        cylinders = ('I4', 'V6', 'V8', 'H4', 'I6')[int(rng.integers(0, 5))]
        return f'{int(rng.integers(10, 60)) / 10:.1f} liter {cylinders} engine'
    if kind == 'mileage':
        return f'{int(rng.integers(15, 40))} city {int(rng.integers(20, 50))} highway mpg'
    if kind == 'university':
        return f'{_pseudo_word(rng, 3)} State University'
    if kind == 'phone':
        area, exchange = int(rng.integers(200, 1000)), int(rng.integers(200, 1000))
        line = int(rng.integers(0, 10000))
        return f'({area}) {exchange}-{line:04d}'
    if kind == 'url':
        return f'www.{_pseudo_word(rng, 3).lower()}.edu'
    if kind == 'code':
        letters = ''.join(chr(ord('A') + int(index)) for index in rng.integers(0, 26, size=4))
        return f'{letters[:2]}-{int(rng.integers(1000, 10000))}-{letters[2:]}'
    raise ValueError(f"Unknown attribute kind '{kind}'")


def template_texts(schema: VerticalSchema, website_ids: Iterable[str] = ()) -> Set[str]:
    """
    :param schema: The vertical schema.
    :param website_ids: Websites whose banner texts should be included.
    :return: Every non-value text a page of the vertical may contain.
    """
    texts = set(schema.distractors)
    for spec in schema.attributes + schema.extraneous:
        texts.update(spec.labels)
    for website_id in website_ids:
        texts.update(_banner_texts(website_id))
    return texts


def _banner_texts(website_id: str) -> Tuple[str, str]:
    return f'{website_id} detail page listing', f'Welcome to {website_id} online'


class _CollisionIndex:
    """Texts by word count, so fuzzy collisions are only checked between comparable texts"""

    def __init__(self):
        self._texts: Dict[int, Dict[str, Set[str]]] = defaultdict(lambda: defaultdict(set))

    def add(self, text: str, owner: str):
        self._texts[len(text.split())][owner].add(text)

    def collides(self, text: str, owner: str) -> bool:
        for other_owner, texts in self._texts[len(text.split())].items():
            if other_owner == owner:
                continue
            if any(fuzzy_match(text, other) for other in texts):
                return True
        return False


def build_vocabularies(
        schema: VerticalSchema,
        sizes: Dict[str, int],
        rng: numpy.random.Generator,
        reserved_texts: Iterable[str] = (),
) -> Dict[str, List[str]]:
    """
    Draw the value vocabulary of every attribute, extraneous ones included. A candidate value is
    rejected when it fuzzy-matches a value of another attribute or a reserved text, so labeling
    functions built on fuzzy text matching stay sound on the rendered pages.
    :param schema: The vertical schema.
    :param sizes: The requested vocabulary size per attribute. Choice attributes keep all usable choices.
    :param rng: Random generator for the draws.
    :param reserved_texts: Template texts values must not resemble.
    :return: The vocabulary of every attribute.
    """
    index = _CollisionIndex()
    for text in reserved_texts:
        index.add(text, '<template>')

    vocabularies: Dict[str, List[str]] = {}
    for spec in schema.attributes + schema.extraneous:
        values: List[str] = []
        if spec.kind == 'choice':
            size = len(spec.choices)
            candidates: Iterable[str] = spec.choices
        else:
            size = sizes.get(spec.name, DEFAULT_VOCABULARY_SIZE)
            candidates = (_make_value(spec, rng) for _ in range(size * MAX_DRAWS_PER_VALUE))

        for candidate in candidates:
            if len(values) >= size:
                break
            if candidate in values or index.collides(candidate, spec.name):
                continue
            values.append(candidate)
            index.add(candidate, spec.name)

        if not values:
            raise ValueError(f"No collision-free values could be drawn for '{spec.name}'")
        vocabularies[spec.name] = values
    return vocabularies


def generate_relation(
        n_tuples: int,
        schema: VerticalSchema,
        vocabulary_sizes: Dict[str, int],
        rng: numpy.random.Generator,
        reserved_texts: Iterable[str] = (),
) -> AbstractRelation:
    """
    Draw an entity table. Attributes whose vocabulary is at least as large as the table take distinct
    values; smaller vocabularies are drawn with replacement, so values repeat across entities.
    :param n_tuples: The number of entities.
    :param schema: The vertical schema.
    :param vocabulary_sizes: The vocabulary size per attribute.
    :param rng: Random generator for the draws.
    :param reserved_texts: Template texts values must not resemble.
    :return: The relation.
    """
    if n_tuples < 1:
        raise ValueError("A relation needs at least one tuple")
    vocabulary = build_vocabularies(schema, vocabulary_sizes, rng, reserved_texts)

    columns: Dict[str, List[str]] = {}
    for name in schema.attribute_names:
        values = vocabulary[name]
        replace = len(values) < n_tuples
        drawn = rng.choice(len(values), size=n_tuples, replace=replace)
        columns[name] = [values[int(index)] for index in drawn]

    tuples = [{name: columns[name][row] for name in schema.attribute_names} for row in range(n_tuples)]
    entity_ids = [f'e{row:05d}' for row in range(n_tuples)]
    return AbstractRelation(schema.name, schema.attribute_names, tuples, entity_ids, vocabulary)


def make_site_template(
        schema: VerticalSchema,
        projected: Sequence[str],
        extraneous_count: int,
        rng: numpy.random.Generator,
) -> SiteTemplate:
    """
    Draw a website layout: the wrapper tags, the slot order, the labels and the boilerplate around the
    attribute block all vary across websites.
    :param schema: The vertical schema.
    :param projected: The attributes the website publishes.
    :param extraneous_count: The number of extraneous attributes the website publishes.
    :param rng: Random generator for the layout.
    :return: The template.
    """
    extraneous = [spec.name for spec in schema.extraneous[:extraneous_count]]
    slots = [name for name in projected] + extraneous
    slots = [slots[int(index)] for index in rng.permutation(len(slots))]
    labels = {
        name: schema.spec(name).labels[int(rng.integers(0, len(schema.spec(name).labels)))]
        for name in slots
    }
    distractors = [schema.distractors[int(index)] for index in rng.permutation(len(schema.distractors))]
    before = int(rng.integers(0, 3))
    after = int(rng.integers(0, 3))
    return SiteTemplate(
        layout=LAYOUTS[int(rng.integers(0, len(LAYOUTS)))],
        slots=slots,
        labels=labels,
        title_heading=bool(rng.random() < 0.5),
        wrapper_depth=int(rng.integers(0, 3)),
        distractors_before=distractors[:before],
        distractors_after=distractors[before:before + after],
    )


def make_redesign_template(template: SiteTemplate, rng: numpy.random.Generator) -> SiteTemplate:
    """
    Draw the layout a website moved to after a redesign: the same slots and boilerplate, reordered
    into different tags, with the value of each slot rendered without its label.
    :param template: The main layout of the website.
    :param rng: Random generator for the layout.
    :return: The redesigned template.
    """
    slots = [template.slots[int(index)] for index in rng.permutation(len(template.slots))]
    return SiteTemplate(
        layout=REDESIGN_LAYOUTS[int(rng.integers(0, len(REDESIGN_LAYOUTS)))],
        slots=slots,
        labels={},
        title_heading=template.title_heading,
        wrapper_depth=int(rng.integers(0, 3)),
        distractors_before=template.distractors_before,
        distractors_after=template.distractors_after,
    )


def _slot_elements(layout: str, label: Optional[str], value: Optional[str]):
    _, row_tag, label_tag, value_tag = SLOT_TAGS[layout]
    value_element = value_tag(value or '')
    cells = [label_tag(label), value_element] if label else [value_element]
    return row_tag(*cells), value_element


def render_page(
        website_id: str,
        page_id: str,
        values: Dict[str, Optional[str]],
        template: SiteTemplate,
        topic_attribute: str,
        attributes: Sequence[str],
) -> Tuple[bytes, List[GroundTruthRecord]]:
    """
    Render one detail page. A null value leaves its value element empty, so the page keeps its
    layout but has no node for the attribute.
    :param website_id: The website of the page.
    :param page_id: The page id.
    :param values: The post-noise value of every slot, None for nulls.
    :param template: The website layout.
    :param topic_attribute: The attribute repeated in the heading.
    :param attributes: The extracted attributes. Other slots are left out of the ground truth.
    :return: The HTML bytes and the ground truth of the page.
    """
    title_text, banner_text = _banner_texts(website_id)
    body = E.BODY(E.DIV(banner_text))
    marked = []

    if template.title_heading:
        heading = E.H1(values.get(topic_attribute) or '')
        body.append(heading)
        marked.append((heading, topic_attribute))
    for text in template.distractors_before:
        body.append(E.P(text))

    container = body
    for _ in range(template.wrapper_depth):
        wrapper = E.DIV()
        container.append(wrapper)
        container = wrapper
    block = SLOT_TAGS[template.layout][0]()
    container.append(block)
    for name in template.slots:
        row, value_element = _slot_elements(template.layout, template.labels.get(name), values.get(name))
        block.append(row)
        marked.append((value_element, name))

    for text in template.distractors_after:
        body.append(E.P(text))
    root = E.HTML(E.HEAD(E.TITLE(title_text)), body)

    ground_truth = [
        GroundTruthRecord(page_id, element_xpath(element), name, element.text)
        for element, name in marked
        if element.text and name in attributes
    ]
    document = html.tostring(root, doctype='<!DOCTYPE html>', encoding='utf-8')
    return document, ground_truth


def _select_entities(
        relation: AbstractRelation,
        cfg: SiteGenConfig,
        rng: numpy.random.Generator,
) -> List[int]:
    candidates = list(range(len(relation)))
    if cfg.candidate_entities is not None:
        wanted = set(cfg.candidate_entities)
        candidates = [row for row in candidates if relation.entity_ids[row] in wanted]
    count = math.ceil(cfg.select_fraction * len(candidates))
    # a permutation prefix, so smaller fractions select nested subsets under the same seed
    return sorted(candidates[int(index)] for index in rng.permutation(len(candidates))[:count])


def _noisy_value(
        relation: AbstractRelation,
        name: str,
        value: Optional[str],
        noise: NoiseConfig,
        rng: numpy.random.Generator,
) -> Optional[str]:
    null_draw, wrong_draw, pick = rng.random(), rng.random(), rng.random()
    if null_draw < noise.null_rate:
        return None
    if wrong_draw < noise.wrong_value_rate:
        others = [other for other in relation.vocabulary[name] if other != value]
        if others:
            return others[int(pick * len(others))]
    return value


def render_website(
        relation: AbstractRelation,
        cfg: SiteGenConfig,
        schema: Optional[VerticalSchema] = None,
) -> RenderedSite:
    """
    Render a website as the selection, projection, noise and rendering of the relation.
    Noise is applied to the page and to the emitted site relation alike: corrupted values are recorded
    as the attribute's ground truth. With a redesign rate, pages after the stable prefix switch to the
    redesigned layout at that rate.
    :param relation: The entity relation.
    :param cfg: The website settings.
    :param schema: The vertical schema. Looked up from the presets when omitted.
    :return: The rendered website.
    """
    schema = schema or PRESETS[relation.vertical]
    rng = numpy.random.default_rng(cfg.seed)
    template = cfg.template or make_site_template(
        schema, cfg.projected_attributes, cfg.noise.extraneous_attribute_count, rng
    )
    redesign = make_redesign_template(template, rng) if cfg.redesign_rate > 0 else None
    topic_attribute = schema.attribute_names[0]

    page_ids, documents, ground_truth, redesigned = [], [], [], []
    rows: Dict[str, Set[str]] = defaultdict(set)
    for position, row in enumerate(_select_entities(relation, cfg, rng)):
        page_id = f'{cfg.website_id}-{position:04d}'
        page_template = template
        if redesign is not None and position >= cfg.stable_pages and rng.random() < cfg.redesign_rate:
            page_template = redesign
            redesigned.append(page_id)
        values: Dict[str, Optional[str]] = {}
        for name in template.slots:
            if name in relation.attributes:
                values[name] = _noisy_value(relation, name, relation.tuples[row][name], cfg.noise, rng)
            else:
                vocabulary = relation.vocabulary[name]
                values[name] = vocabulary[int(rng.integers(0, len(vocabulary)))]
        document, records = render_page(
            cfg.website_id, page_id, values, page_template, topic_attribute, cfg.projected_attributes
        )
        page_ids.append(page_id)
        documents.append(document)
        ground_truth.append(records)
        for name in cfg.projected_attributes:
            if values.get(name) is not None:
                rows[name].add(values[name])

    logger.debug('Rendered %d pages for %s with a %s layout, %d redesigned',
                 len(page_ids), cfg.website_id, template.layout, len(redesigned))
    return RenderedSite(
        cfg.website_id, page_ids, documents, ground_truth, SiteRelation(cfg.website_id, dict(rows)),
        redesigned,
    )


def _write_json_lines(records: Iterable[dict], path: str):
    with open(path, 'w', encoding='utf-8') as output_file:
        for record in records:
            output_file.write(json.dumps(record, sort_keys=True) + '\n')


def _label_records(site: RenderedSite, page_range: range) -> List[dict]:
    return [record._asdict() for index in page_range for record in site.ground_truth[index]]


# pylint: disable=too-many-arguments,too-many-locals
def generate_vertical(
        out_dir: str,
        relation: AbstractRelation,
        site_configs: Sequence[SiteGenConfig],
        seed_sites: Sequence[str],
        labeled_pages: int = DEFAULT_LABELED_PAGES,
        validation_pages: int = DEFAULT_VALIDATION_PAGES,
        schema: Optional[VerticalSchema] = None,
        num_parallel: int = 4,
) -> Dict[str, RenderedSite]:
    """
    Write a synthetic vertical laid out as <out_dir>/<website_id>/<page_id>.html, with a ground-truth
    file and a relation file per website, the schema, and human label files for the seed websites:
    the first `labeled_pages` pages of each seed website go to human_labels.jsonl and the next
    `validation_pages` to validation_labels.jsonl.
    :param out_dir: The vertical directory to create.
    :param relation: The entity relation.
    :param site_configs: The settings of every website.
    :param seed_sites: The websites that get human labels.
    :param labeled_pages: Training label pages per seed website.
    :param validation_pages: Validation label pages per seed website.
    :param schema: The vertical schema. Looked up from the presets when omitted.
    :param num_parallel: The number of websites to render in parallel.
    :return: The rendered websites by id.
    """
    if len(site_configs) < MIN_SITES:
        raise InvalidConfig(f"A vertical needs at least {MIN_SITES} websites, got {len(site_configs)}")
    schema = schema or PRESETS[relation.vertical]
    unknown = sorted(set(seed_sites) - {cfg.website_id for cfg in site_configs})
    if unknown:
        raise ValueError(f"Seed websites {unknown} are not among the rendered websites")

    sites = parallel_map(lambda cfg: render_website(relation, cfg, schema), site_configs, num_parallel)
    os.makedirs(out_dir, exist_ok=True)
    human_records: List[dict] = []
    validation_records: List[dict] = []
    for site in sites:
        site_dir = os.path.join(out_dir, site.website_id)
        os.makedirs(site_dir, exist_ok=True)
        for page_id, document in zip(site.page_ids, site.documents):
            with open(os.path.join(site_dir, f'{page_id}.html'), 'wb') as page_file:
                page_file.write(document)
        _write_json_lines(
            _label_records(site, range(len(site.page_ids))), os.path.join(site_dir, GROUND_TRUTH_FILE)
        )
        with open(os.path.join(site_dir, RELATION_FILE), 'w', encoding='utf-8') as relation_file:
            json.dump(
                {'website': site.website_id,
                 'attributes': {name: sorted(values) for name, values in site.relation.rows.items()}},
                relation_file, sort_keys=True, indent=2,
            )

        if site.website_id in seed_sites:
            needed = labeled_pages + validation_pages
            if len(site.page_ids) < needed:
                raise ValueError(
                    f"Seed website {site.website_id} has {len(site.page_ids)} pages, {needed} are needed"
                )
            human_records.extend(_label_records(site, range(labeled_pages)))
            validation_records.extend(_label_records(site, range(labeled_pages, needed)))

    _write_json_lines(human_records, os.path.join(out_dir, HUMAN_LABEL_FILE))
    _write_json_lines(validation_records, os.path.join(out_dir, VALIDATION_LABEL_FILE))
    with open(os.path.join(out_dir, SCHEMA_FILE), 'w', encoding='utf-8') as schema_file:
        json.dump({'vertical': schema.name, 'attributes': schema.attribute_names,
                   'seed_sites': sorted(seed_sites)}, schema_file, sort_keys=True, indent=2)
    logger.info('Wrote %d websites of the %s vertical to %s', len(sites), schema.name, out_dir)
    return {site.website_id: site for site in sites}


def preset_vertical(
        preset: str,
        vertical: str = 'movie',
        sites: int = 5,
        pages_per_site: int = 200,
        seed: int = 0,
        noise: Optional[NoiseConfig] = None,
        redesign_rate: float = DEFAULT_REDESIGN_RATE,
        stable_pages: int = DEFAULT_LABELED_PAGES + DEFAULT_VALIDATION_PAGES,
) -> Tuple[AbstractRelation, List[SiteGenConfig]]:
    """
    Build a dense or sparse vertical: every website renders a block of entities shared by all websites
    plus entities of its own. Dense verticals share 60% of each website's entities, sparse ones 10%.
    Every website was redesigned after its first `stable_pages` pages, the ones annotators labeled, so
    later pages mix the main layout with a label-free one the labeled pages never show.
    :param preset: 'dense' or 'sparse'.
    :param vertical: The schema preset.
    :param sites: The number of websites.
    :param pages_per_site: The number of pages per website.
    :param seed: The generation seed.
    :param noise: Page noise of every website. Light noise when omitted.
    :param redesign_rate: Share of pages after the stable prefix rendered with the redesigned layout.
    :param stable_pages: Leading pages of every website kept on the main layout.
    :return: The relation and the website settings.
    """
    if preset not in PRESET_SHARED_FRACTIONS:
        raise ValueError(f"Unknown preset '{preset}', expected one of {sorted(PRESET_SHARED_FRACTIONS)}")
    schema = PRESETS[vertical]
    shared = round(PRESET_SHARED_FRACTIONS[preset] * pages_per_site)
    private = pages_per_site - shared
    n_tuples = shared + sites * private
    website_ids = [f'{vertical}-site-{index}' for index in range(sites)]

    sizes = {spec.name: max(5, n_tuples // 3) for spec in schema.attributes + schema.extraneous}
    sizes[schema.attribute_names[0]] = n_tuples
    rng = numpy.random.default_rng(seed)
    relation = generate_relation(n_tuples, schema, sizes, rng, template_texts(schema, website_ids))

    if noise is None:
        noise = NoiseConfig(extraneous_attribute_count=1, null_rate=0.05, wrong_value_rate=0.02)
    child_seeds = numpy.random.SeedSequence(seed).generate_state(sites)
    configs = []
    for index, website_id in enumerate(website_ids):
        own = relation.entity_ids[shared + index * private:shared + (index + 1) * private]
        configs.append(SiteGenConfig(
            website_id=website_id,
            projected_attributes=schema.attribute_names,
            noise=noise,
            seed=int(child_seeds[index]),
            candidate_entities=relation.entity_ids[:shared] + own,
            redesign_rate=redesign_rate,
            stable_pages=stable_pages,
        ))
    return relation, configs
