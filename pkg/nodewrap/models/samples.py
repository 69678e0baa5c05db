"""Data classes for labeled, pseudo-labeled and validation samples"""
# pylint: disable=missing-docstring
from enum import Enum
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set

import numpy

from nodewrap.exceptions import UnknownAttribute
from nodewrap.models.dom_page import DomNodeRecord, NodeKey

NONE_LABEL = 'NONE'


class LabelSpace:
    """The attribute set A' plus the NONE sentinel, in a fixed class order"""

    def __init__(self, attributes: Sequence[str]):
        """
        :param attributes: The attribute names to extract. NONE is appended as the last class.
        """
        if not attributes:
            raise UnknownAttribute("The attribute set must not be empty")
        if NONE_LABEL in attributes:
            raise UnknownAttribute(f"'{NONE_LABEL}' is reserved and cannot be used as an attribute name")
        if len(set(attributes)) != len(attributes):
            raise UnknownAttribute(f"Duplicate attribute names in {list(attributes)}")
        self.attributes: List[str] = list(attributes)
        self.classes: List[str] = self.attributes + [NONE_LABEL]
        self._index = {name: index for index, name in enumerate(self.classes)}

    @property
    def none_index(self) -> int:
        return len(self.attributes)

    def __len__(self) -> int:
        return len(self.classes)

    def index_of(self, label: str) -> int:
        """
        Class index of a label.
        :param label: An attribute name or NONE.
        :return: The index of the label in the class order.
        """
        try:
            return self._index[label]
        except KeyError:
            raise UnknownAttribute(f"'{label}' is not one of {self.attributes} or {NONE_LABEL}") from None

    def label_at(self, index: int) -> str:
        return self.classes[index]

    def one_hot(self, label: str) -> numpy.ndarray:
        vector = numpy.zeros(len(self.classes))
        vector[self.index_of(label)] = 1.0
        return vector


class LabelSource(Enum):
    GENERATIVE = 'generative'
    TEACHER = 'teacher'
    HUMAN = 'human'


class LabeledSample(NamedTuple):
    node: DomNodeRecord
    label: str
    page_id: str
    website_id: str


class PseudoLabeledSample:
    # pylint: disable=too-many-arguments
    def __init__(
            self,
            node: DomNodeRecord,
            hard_label: str,
            soft_label: numpy.ndarray,
            source: LabelSource,
            iteration_added: int,
            weight: float = 1.0,
    ):
        self.node = node
        self.hard_label = hard_label
        self.soft_label = soft_label
        self.source = source
        self.weight = weight
        self.iteration_added = iteration_added
        # iteration whose validation snapshot produced the current weight
        self.weight_iteration = iteration_added

    @property
    def page_id(self) -> str:
        return self.node.page_id

    @property
    def website_id(self) -> str:
        return self.node.website_id

    @classmethod
    def from_human(cls, sample: LabeledSample, label_space: LabelSpace) -> 'PseudoLabeledSample':
        return cls(
            node=sample.node,
            hard_label=sample.label,
            soft_label=label_space.one_hot(sample.label),
            source=LabelSource.HUMAN,
            iteration_added=0,
            weight=1.0,
        )


class ValidationEntry:
    def __init__(self, node: DomNodeRecord, human_label: str, num_classes: int):
        self.node = node
        self.human_label = human_label
        self.soft_label = numpy.full(num_classes, 1.0 / num_classes)
        self.hard_label: Optional[str] = None

    @property
    def page_id(self) -> str:
        return self.node.page_id

    @property
    def website_id(self) -> str:
        return self.node.website_id


class ValidationSet:
    """Human-labeled nodes held out of training, re-scored by the current teacher every iteration"""

    def __init__(self, entries: Iterable[ValidationEntry]):
        self.entries: List[ValidationEntry] = list(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def for_site(self, website_id: str) -> List[ValidationEntry]:
        return [entry for entry in self.entries if entry.website_id == website_id]

    def for_page(self, page_id: str) -> List[ValidationEntry]:
        return [entry for entry in self.entries if entry.page_id == page_id]

    def page_ids(self) -> List[str]:
        return sorted({entry.page_id for entry in self.entries})

    def node_keys(self) -> Set[NodeKey]:
        return {entry.node.key for entry in self.entries}


class AugmentedCorpus:
    """Human-labeled samples plus every pseudo-labeled sample accumulated so far"""

    def __init__(self, human_samples: Iterable[PseudoLabeledSample] = ()):
        self.samples: List[PseudoLabeledSample] = []
        self.consumed_pool_ids: Set[NodeKey] = set()
        self._keys: Set[NodeKey] = set()
        for sample in human_samples:
            self.add(sample)

    def add(self, sample: PseudoLabeledSample):
        """
        Append a sample.
        :param sample: The sample to add. Its node must not already be in the corpus.
        """
        key = sample.node.key
        if key in self._keys:
            raise RuntimeError(f"Node {key} is already part of the augmented corpus")
        self._keys.add(key)
        self.samples.append(sample)

    def __len__(self) -> int:
        return len(self.samples)

    def __contains__(self, key) -> bool:
        return key in self._keys

    def human_samples(self) -> List[PseudoLabeledSample]:
        return [sample for sample in self.samples if sample.source == LabelSource.HUMAN]

    def pseudo_samples(self) -> List[PseudoLabeledSample]:
        return [sample for sample in self.samples if sample.source != LabelSource.HUMAN]

    def source_counts(self) -> Dict[str, int]:
        counts = {source.value: 0 for source in LabelSource}
        for sample in self.samples:
            counts[sample.source.value] += 1
        return counts

    def page_ids(self) -> List[str]:
        return sorted({sample.page_id for sample in self.samples})
