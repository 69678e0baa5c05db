"""Test page overlap and page weights"""
from unittest import TestCase

import numpy

from nodewrap.exceptions import NoValidationEntries
from nodewrap.models.samples import NONE_LABEL, ValidationEntry, ValidationSet
from nodewrap.models.training_config import ReweightConfig
from nodewrap.utils.reweighting import (
    PageSignature,
    WeightCase,
    build_page_signature,
    compute_page_weight,
    hard_accuracy_for_site,
    page_overlap,
    soft_accuracy_for_page,
)
from test.helpers import make_page

CLASSES = ['title', 'director', NONE_LABEL]
CLASS_INDEX = {name: index for index, name in enumerate(CLASSES)}


def _signature(page_id, pairs):
    return PageSignature(page_id, frozenset(pairs))


def _entry(page_id, website_id, human_label, hard_label, soft_label, node_id=0):
    node = make_page(page_id, website_id, ['x'] * (node_id + 1)).nodes[node_id]
    entry = ValidationEntry(node, human_label, len(CLASSES))
    entry.hard_label = hard_label
    entry.soft_label = numpy.array(soft_label)
    return entry


class TestReweighting(TestCase):
    """Test page overlap and page weights"""

    def setUp(self):
        self.cfg = ReweightConfig(epsilon=0.0005, weight_floor=0.01)

    def test_page_overlap(self):
        """test identical signatures overlap fully, disjoint and empty ones by epsilon"""
        page1 = _signature('p1', {('title', 'Up'), ('NONE', 'Footer')})
        page2 = _signature('p2', {('title', 'Up'), ('NONE', 'Header')})
        disjoint = _signature('p3', {('title', 'Jaws')})
        empty = _signature('p4', set())

        self.assertEqual(page_overlap(page1, page1, self.cfg), 1.0)
        self.assertAlmostEqual(page_overlap(page1, page2, self.cfg), 1 / 3)
        self.assertEqual(page_overlap(page1, disjoint, self.cfg), 0.0005)
        self.assertEqual(page_overlap(empty, empty, self.cfg), 0.0005)

    def test_build_page_signature(self):
        """test the signature pairs each predicted label with its node text"""
        page = make_page('p1', 'site-a', ['Up', 'Footer', 'Up'])

        signature = build_page_signature('p1', page.nodes, ['title', NONE_LABEL, 'title'])

        self.assertEqual(signature.label_text_set, frozenset({('title', 'Up'), (NONE_LABEL, 'Footer')}))

    def test_hard_accuracy_for_site(self):
        """test the fraction of correct hard pseudo-labels, clamped to the floor"""
        validation = ValidationSet([
            _entry('v1', 'site-a', 'title', 'title', [1, 0, 0]),
            _entry('v1', 'site-a', 'director', NONE_LABEL, [0, 0, 1], node_id=1),
            _entry('v2', 'site-b', 'title', 'director', [0, 1, 0]),
        ])

        self.assertEqual(hard_accuracy_for_site(validation, 'site-a', self.cfg), 0.5)
        self.assertEqual(hard_accuracy_for_site(validation, 'site-b', self.cfg), 0.01)
        with self.assertRaises(NoValidationEntries):
            hard_accuracy_for_site(validation, 'site-z', self.cfg)

    def test_soft_accuracy_for_page(self):
        """test the mean mass on the human label"""
        validation = ValidationSet([
            _entry('v1', 'site-a', 'title', 'title', [0.8, 0.1, 0.1]),
            _entry('v1', 'site-a', NONE_LABEL, NONE_LABEL, [0.2, 0.2, 0.6], node_id=1),
        ])

        self.assertAlmostEqual(soft_accuracy_for_page(validation, 'v1', self.cfg, CLASS_INDEX), 0.7)

    def test_compute_page_weight_cases(self):
        """test the three weighting rules"""
        validation = ValidationSet([
            _entry('v1', 'site-a', 'title', 'title', [0.9, 0.05, 0.05]),
            _entry('v1', 'site-a', 'director', NONE_LABEL, [0.1, 0.3, 0.6], node_id=1),
            _entry('v2', 'site-b', 'title', 'title', [0.5, 0.25, 0.25]),
        ])
        signatures = {
            'v1': _signature('v1', {('title', 'Up'), (NONE_LABEL, 'Footer')}),
            'v2': _signature('v2', {('title', 'Jaws')}),
            'train': _signature('train', {('title', 'Up'), (NONE_LABEL, 'Footer')}),
            'other': _signature('other', {('title', 'Jaws'), (NONE_LABEL, 'Footer')}),
        }

        cfg = self.cfg
        human = compute_page_weight('train', 'site-a', validation, signatures, True, True, cfg, CLASS_INDEX)
        seed = compute_page_weight('train', 'site-a', validation, signatures, False, True, cfg, CLASS_INDEX)
        other = compute_page_weight('other', 'site-c', validation, signatures, False, False, cfg, CLASS_INDEX)

        self.assertEqual((human.weight, human.case), (1.0, WeightCase.HUMAN_LABELED))
        self.assertEqual((seed.weight, seed.case), (0.5, WeightCase.SEED_SITE))
        # v1 overlaps by 1/3, v2 by 1/2 with soft accuracy 0.5
        self.assertEqual((other.case, other.matched_validation_page), (WeightCase.OTHER_SITE, 'v2'))
        self.assertAlmostEqual(other.weight, 0.25)

    def test_compute_page_weight_empty_validation(self):
        """test weighting without validation entries raises"""
        with self.assertRaises(NoValidationEntries):
            compute_page_weight('p1', 'site-a', ValidationSet([]), {}, False, True, self.cfg, CLASS_INDEX)

    def test_compute_page_weight_matches_brute_force(self):
        """test other-site weights against an exhaustive computation on random micro corpora"""
        rng = numpy.random.default_rng(42)
        texts = ['Up', 'Jaws', 'Heat', 'Footer', 'Alien']

        for _ in range(100):
            entries, signatures = [], {}
            for page in range(int(rng.integers(1, 4))):
                page_id = f'v{page}'
                pairs = set()
                for node_id in range(int(rng.integers(1, 4))):
                    soft = rng.dirichlet(numpy.ones(len(CLASSES)))
                    human_label = CLASSES[int(rng.integers(0, len(CLASSES)))]
                    hard_label = CLASSES[int(numpy.argmax(soft))]
                    entries.append(_entry(page_id, 'site-a', human_label, hard_label, soft, node_id=node_id))
                    pairs.add((hard_label, texts[int(rng.integers(0, len(texts)))]))
                signatures[page_id] = _signature(page_id, pairs)
            signatures['train'] = _signature('train', {
                (CLASSES[int(rng.integers(0, len(CLASSES)))], texts[int(rng.integers(0, len(texts)))])
                for _ in range(int(rng.integers(0, 4)))
            })
            validation = ValidationSet(entries)

            weight = compute_page_weight(
                'train', 'site-c', validation, signatures, False, False, self.cfg, CLASS_INDEX
            )

            best_page, best_overlap = None, -1.0
            for page_id in sorted({entry.page_id for entry in entries}):
                train_set, page_set = signatures['train'].label_text_set, signatures[page_id].label_text_set
                union = train_set | page_set
                overlap = max(0.0005, len(train_set & page_set) / len(union)) if union else 0.0005
                if overlap > best_overlap:
                    best_page, best_overlap = page_id, overlap
            page_entries = [entry for entry in entries if entry.page_id == best_page]
            mass = sum(entry.soft_label[CLASS_INDEX[entry.human_label]] for entry in page_entries)
            accuracy = min(1.0, max(0.01, mass / len(page_entries)))

            self.assertEqual(weight.matched_validation_page, best_page)
            self.assertAlmostEqual(weight.weight, min(1.0, max(0.01, accuracy * best_overlap)))
            self.assertTrue(0.0 < weight.weight <= 1.0)
