"""Test the synthetic vertical generator"""
import json
import os
import shutil
import tempfile
from unittest import TestCase

import numpy

from nodewrap.exceptions import InvalidConfig
from nodewrap.models.synth_config import NoiseConfig, SiteGenConfig
from nodewrap.utils.corpus import read_label_file
from nodewrap.utils.dom import parse_page
from nodewrap.utils.synth import (
    HUMAN_LABEL_FILE,
    PRESETS,
    SCHEMA_FILE,
    VALIDATION_LABEL_FILE,
    generate_relation,
    generate_vertical,
    preset_vertical,
    render_website,
    template_texts,
)
from nodewrap.utils.weak_supervision import fuzzy_match

SCHEMA = PRESETS['movie']
ATTRIBUTES = SCHEMA.attribute_names
VOCABULARY_SIZES = {'title': 10, 'director': 4}


class TestSynth(TestCase):
    """Test the synthetic vertical generator"""

    def setUp(self):
        self.relation = generate_relation(
            10, SCHEMA, VOCABULARY_SIZES, numpy.random.default_rng(0), template_texts(SCHEMA, ['s1'])
        )

    def test_generate_relation(self):
        """test the table size, unique ids and distinct topic values"""
        self.assertEqual(len(self.relation), 10)
        self.assertEqual(len(set(self.relation.entity_ids)), 10)
        self.assertEqual(len({row['title'] for row in self.relation.tuples}), 10)
        self.assertLessEqual(len({row['director'] for row in self.relation.tuples}), 4)
        self.assertIn('catalog_code', self.relation.vocabulary)

    def test_generate_relation_single_value_vocabulary(self):
        """test a vocabulary of one repeats its value across every tuple"""
        relation = generate_relation(5, SCHEMA, {'director': 1}, numpy.random.default_rng(1))

        self.assertEqual(len({row['director'] for row in relation.tuples}), 1)

    def test_generate_relation_is_seeded(self):
        """test the same seed gives the same relation"""
        again = generate_relation(
            10, SCHEMA, VOCABULARY_SIZES, numpy.random.default_rng(0), template_texts(SCHEMA, ['s1'])
        )

        self.assertEqual(again.tuples, self.relation.tuples)
        self.assertEqual(again.vocabulary, self.relation.vocabulary)

    def test_vocabularies_do_not_collide(self):
        """test no value resembles a value of another attribute or a template text"""
        reserved = template_texts(SCHEMA, ['s1'])
        vocabulary = self.relation.vocabulary
        for name, values in vocabulary.items():
            for value in values:
                self.assertFalse(any(fuzzy_match(value, text) for text in reserved), value)
                for other_name, other_values in vocabulary.items():
                    if other_name != name:
                        self.assertFalse(any(fuzzy_match(value, other) for other in other_values), value)

    def test_render_website_selection(self):
        """test a select fraction of one half renders half of the entities"""
        site = render_website(self.relation, SiteGenConfig('s1', ATTRIBUTES, select_fraction=0.5, seed=3))

        self.assertEqual(len(site.page_ids), 5)
        self.assertEqual(site.page_ids[0], 's1-0000')

    def test_render_website_round_trip(self):
        """test noise-free pages carry the relation values at their ground-truth xpaths"""
        cfg = SiteGenConfig('s1', ATTRIBUTES, noise=NoiseConfig(extraneous_attribute_count=2), seed=4)

        site = render_website(self.relation, cfg)

        for index, (page_id, document) in enumerate(zip(site.page_ids, site.documents)):
            page = parse_page(document, page_id, 's1')
            records = site.ground_truth[index]
            self.assertEqual({record.attribute for record in records}, set(ATTRIBUTES))
            for record in records:
                self.assertEqual(page.node_at(record.xpath).text, record.text)
                self.assertEqual(record.text, self.relation.tuples[index][record.attribute])
        self.assertEqual(site.relation.rows['title'], {row['title'] for row in self.relation.tuples})

    def test_render_website_nulls(self):
        """test null values leave no ground truth and no node"""
        cfg = SiteGenConfig('s1', ATTRIBUTES, noise=NoiseConfig(null_rate=1.0), seed=4)

        site = render_website(self.relation, cfg)

        self.assertTrue(all(records == [] for records in site.ground_truth))
        self.assertEqual(site.relation.rows, {})
        page = parse_page(site.documents[0], site.page_ids[0], 's1')
        values = {row['title'] for row in self.relation.tuples}
        self.assertFalse(any(node.text in values for node in page.nodes))

    def test_render_website_wrong_values(self):
        """test wrong values come from the vocabulary and are recorded as ground truth"""
        cfg = SiteGenConfig('s1', ['director'], noise=NoiseConfig(wrong_value_rate=1.0), seed=4)

        site = render_website(self.relation, cfg)

        for index, records in enumerate(site.ground_truth):
            self.assertEqual(len(records), 1)
            self.assertIn(records[0].text, self.relation.vocabulary['director'])
            self.assertNotEqual(records[0].text, self.relation.tuples[index]['director'])

    def test_render_website_is_seeded(self):
        """test the same settings produce byte-identical pages"""
        cfg = SiteGenConfig('s1', ATTRIBUTES, noise=NoiseConfig(1, 0.1, 0.1), seed=9)
        first, second = render_website(self.relation, cfg), render_website(self.relation, cfg)

        self.assertEqual(first.documents, second.documents)

    def test_preset_vertical(self):
        """test dense websites share sixty percent of their entities"""
        relation, configs = preset_vertical('dense', 'movie', sites=3, pages_per_site=20, seed=0)

        self.assertEqual(len(relation), 12 + 3 * 8)
        self.assertEqual([cfg.website_id for cfg in configs], [f'movie-site-{index}' for index in range(3)])
        shared = set(configs[0].candidate_entities) & set(configs[1].candidate_entities)
        self.assertEqual(len(shared), 12)
        self.assertTrue(all(len(cfg.candidate_entities) == 20 for cfg in configs))
        self.assertEqual({(cfg.redesign_rate, cfg.stable_pages) for cfg in configs}, {(0.5, 19)})
        with self.assertRaises(ValueError):
            preset_vertical('medium')

    def test_generate_vertical(self):
        """test the directory layout and the label files of the seed websites"""
        relation, configs = preset_vertical('sparse', 'movie', sites=5, pages_per_site=12, seed=2)
        out_dir = tempfile.mkdtemp()
        try:
            sites = generate_vertical(out_dir, relation, configs, ['movie-site-0'], labeled_pages=3,
                                      validation_pages=2, num_parallel=2)

            self.assertEqual(sorted(sites), [f'movie-site-{index}' for index in range(5)])
            self.assertEqual(len(os.listdir(os.path.join(out_dir, 'movie-site-1'))), 12 + 2)
            human = read_label_file(os.path.join(out_dir, HUMAN_LABEL_FILE))
            validation = read_label_file(os.path.join(out_dir, VALIDATION_LABEL_FILE))
            human_pages = {record.page for record in human}
            validation_pages = {record.page for record in validation}
            self.assertEqual(human_pages, {f'movie-site-0-000{index}' for index in range(3)})
            self.assertEqual(validation_pages, {'movie-site-0-0003', 'movie-site-0-0004'})
            with open(os.path.join(out_dir, SCHEMA_FILE)) as schema_file:
                schema = json.load(schema_file)
            self.assertEqual(schema['attributes'], ATTRIBUTES)
            self.assertEqual(schema['seed_sites'], ['movie-site-0'])
        finally:
            shutil.rmtree(out_dir)

    def test_generate_vertical_unknown_seed_site(self):
        """test seed websites must be rendered"""
        relation, configs = preset_vertical('sparse', 'movie', sites=5, pages_per_site=12)

        with self.assertRaises(ValueError):
            generate_vertical(tempfile.gettempdir(), relation, configs, ['movie-site-9'])

    def test_generate_vertical_too_few_sites(self):
        """test a vertical of fewer than five websites is rejected before anything is written"""
        relation, configs = preset_vertical('sparse', 'movie', sites=4, pages_per_site=12)
        out_dir = os.path.join(tempfile.mkdtemp(), 'vertical')
        try:
            with self.assertRaises(InvalidConfig):
                generate_vertical(out_dir, relation, configs, ['movie-site-0'])
            self.assertFalse(os.path.exists(out_dir))
        finally:
            shutil.rmtree(os.path.dirname(out_dir))

    def test_render_website_redesign(self):
        """test pages after the stable prefix switch to a label-free layout with exact ground truth"""
        cfg = SiteGenConfig('s1', ATTRIBUTES, noise=NoiseConfig(extraneous_attribute_count=1), seed=4,
                            redesign_rate=1.0, stable_pages=4)
        labels = {label for spec in SCHEMA.attributes + SCHEMA.extraneous for label in spec.labels}

        site = render_website(self.relation, cfg)

        self.assertEqual(site.redesigned, {f's1-{index:04d}' for index in range(4, 10)})
        for index, (page_id, document) in enumerate(zip(site.page_ids, site.documents)):
            page = parse_page(document, page_id, 's1')
            texts = {node.text for node in page.nodes}
            if page_id in site.redesigned:
                self.assertFalse(texts & labels, page_id)
            else:
                self.assertTrue(texts & labels, page_id)
            records = site.ground_truth[index]
            self.assertEqual({record.attribute for record in records}, set(ATTRIBUTES))
            for record in records:
                self.assertEqual(page.node_at(record.xpath).text, record.text)

    def test_render_website_redesign_changes_value_paths(self):
        """test a redesigned page puts no slot value at a path the main layout uses for it"""
        cfg = SiteGenConfig('s1', ATTRIBUTES, seed=4, redesign_rate=1.0, stable_pages=1)

        site = render_website(self.relation, cfg)

        def slot_paths(records):
            return {record.xpath for record in records if '/h1[' not in record.xpath}

        main_paths = slot_paths(site.ground_truth[0])
        self.assertEqual(len(main_paths), len(ATTRIBUTES))
        for records in site.ground_truth[1:]:
            self.assertFalse(slot_paths(records) & main_paths)

    def test_render_website_without_redesign(self):
        """test no page is redesigned at a zero rate, and the rate stays within [0, 1]"""
        site = render_website(self.relation, SiteGenConfig('s1', ATTRIBUTES, seed=4))

        self.assertEqual(site.redesigned, set())
        with self.assertRaises(ValueError):
            SiteGenConfig('s1', ATTRIBUTES, redesign_rate=1.5)
        with self.assertRaises(ValueError):
            SiteGenConfig('s1', ATTRIBUTES, stable_pages=-1)

    def test_selection_overlap_grows_with_nested_fractions(self):
        """test growing select fractions nest each website's entities and grow the shared ones"""
        previous_titles = {'s1': set(), 's2': set()}
        previous_shared = -1
        for fraction in (0.2, 0.5, 0.8, 1.0):
            titles = {}
            for website_id, seed in (('s1', 3), ('s2', 5)):
                cfg = SiteGenConfig(website_id, ATTRIBUTES, select_fraction=fraction, seed=seed)
                titles[website_id] = render_website(self.relation, cfg).relation.rows['title']
                self.assertLessEqual(previous_titles[website_id], titles[website_id])
            shared = len(titles['s1'] & titles['s2'])
            self.assertGreaterEqual(shared, previous_shared)
            previous_titles, previous_shared = titles, shared
        self.assertEqual(previous_shared, 10)
