"""Data classes describing synthetic verticals: schemas, relations and per-website rendering settings"""
# pylint: disable=missing-docstring
from typing import Dict, List, NamedTuple, Optional, Sequence


class AttributeSpec(NamedTuple):
    """An attribute of a vertical schema and how its values and labels look"""
    name: str
    kind: str
    labels: Sequence[str]
    choices: Sequence[str] = ()


class VerticalSchema:
    def __init__(
            self,
            name: str,
            attributes: Sequence[AttributeSpec],
            extraneous: Sequence[AttributeSpec],
            distractors: Sequence[str],
    ):
        """
        :param name: The vertical name.
        :param attributes: The attributes to extract. The first one names the topic entity.
        :param extraneous: Attributes some websites publish that are not extracted.
        :param distractors: Boilerplate sentences rendered around the attribute block.
        """
        self.name = name
        self.attributes = list(attributes)
        self.extraneous = list(extraneous)
        self.distractors = list(distractors)

    @property
    def attribute_names(self) -> List[str]:
        return [spec.name for spec in self.attributes]

    def spec(self, name: str) -> AttributeSpec:
        for spec in self.attributes + self.extraneous:
            if spec.name == name:
                return spec
        raise KeyError(name)


class AbstractRelation:
    """The entity table every website of a vertical renders a view of"""

    def __init__(
            self,
            vertical: str,
            attributes: Sequence[str],
            tuples: Sequence[Dict[str, Optional[str]]],
            entity_ids: Sequence[str],
            vocabulary: Dict[str, List[str]],
    ):
        """
        :param vertical: The vertical name.
        :param attributes: The attribute names.
        :param tuples: One attribute to value map per entity.
        :param entity_ids: Unique entity ids, aligned with the tuples.
        :param vocabulary: The value vocabulary of every attribute, extraneous ones included.
        """
        if len(set(entity_ids)) != len(entity_ids) or len(entity_ids) != len(tuples):
            raise ValueError("Entity ids must be unique and aligned with the tuples")
        self.vertical = vertical
        self.attributes = list(attributes)
        self.tuples = [dict(row) for row in tuples]
        self.entity_ids = list(entity_ids)
        self.vocabulary = vocabulary

    def __len__(self) -> int:
        return len(self.tuples)


class NoiseConfig:
    def __init__(
            self,
            extraneous_attribute_count: int = 0,
            null_rate: float = 0.0,
            wrong_value_rate: float = 0.0,
    ):
        for rate in (null_rate, wrong_value_rate):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"Noise rates must lie in [0, 1], got {rate}")
        self.extraneous_attribute_count = extraneous_attribute_count
        self.null_rate = null_rate
        self.wrong_value_rate = wrong_value_rate


class SiteTemplate:
    """The fixed layout every page of one website is rendered with"""

    # pylint: disable=too-many-arguments
    def __init__(
            self,
            layout: str,
            slots: Sequence[str],
            labels: Dict[str, str],
            title_heading: bool,
            wrapper_depth: int,
            distractors_before: Sequence[str],
            distractors_after: Sequence[str],
    ):
        """
        :param layout: A key of the synthetic generator's slot layouts, e.g. 'table'.
        :param slots: Attribute names in rendering order, extraneous ones included.
        :param labels: The label text rendered next to each slot. Slots without a label render their
            value alone.
        :param title_heading: True to repeat the topic attribute in an h1 heading.
        :param wrapper_depth: Extra div levels around the attribute block.
        :param distractors_before: Boilerplate paragraphs before the attribute block.
        :param distractors_after: Boilerplate paragraphs after the attribute block.
        """
        self.layout = layout
        self.slots = list(slots)
        self.labels = labels
        self.title_heading = title_heading
        self.wrapper_depth = wrapper_depth
        self.distractors_before = list(distractors_before)
        self.distractors_after = list(distractors_after)


class SiteGenConfig:
    # pylint: disable=too-many-arguments
    def __init__(
            self,
            website_id: str,
            projected_attributes: Sequence[str],
            select_fraction: float = 1.0,
            noise: Optional[NoiseConfig] = None,
            template: Optional[SiteTemplate] = None,
            seed: int = 0,
            candidate_entities: Optional[Sequence[str]] = None,
            redesign_rate: float = 0.0,
            stable_pages: int = 0,
    ):
        """
        :param website_id: The website to render.
        :param projected_attributes: The attributes the website publishes.
        :param select_fraction: The fraction of candidate entities the website renders, in (0, 1].
        :param noise: Page noise settings. No noise when omitted.
        :param template: The page layout. Drawn from the seed when omitted.
        :param seed: Seed of the entity selection, the noise and the layout.
        :param candidate_entities: Entity ids the website may render. Every entity when omitted.
        :param redesign_rate: Probability that a page after the stable prefix uses the website's
            redesigned, label-free layout instead of the main one.
        :param stable_pages: Leading pages that always use the main layout.
        """
        if not 0.0 < select_fraction <= 1.0:
            raise ValueError(f"select_fraction must lie in (0, 1], got {select_fraction}")
        if not 0.0 <= redesign_rate <= 1.0:
            raise ValueError(f"redesign_rate must lie in [0, 1], got {redesign_rate}")
        if stable_pages < 0:
            raise ValueError(f"stable_pages must not be negative, got {stable_pages}")
        if not projected_attributes:
            raise ValueError("A website must publish at least one attribute")
        self.website_id = website_id
        self.projected_attributes = list(projected_attributes)
        self.select_fraction = select_fraction
        self.noise = noise or NoiseConfig()
        self.template = template
        self.seed = seed
        self.candidate_entities = list(candidate_entities) if candidate_entities is not None else None
        self.redesign_rate = redesign_rate
        self.stable_pages = stable_pages
