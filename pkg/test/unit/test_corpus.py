"""Test corpus loading, the initial split and unlabeled sampling"""
import json
import os
import shutil
import tempfile
from unittest import TestCase

import numpy

from nodewrap.exceptions import (
    ConflictingLabel,
    DanglingXPath,
    InsufficientLabeledPages,
    InvalidConfig,
    UnknownAttribute,
)
from nodewrap.models.samples import NONE_LABEL, LabelSource, LabelSpace
from nodewrap.utils.corpus import (
    LabelRecord,
    label_pages,
    load_corpus,
    sample_unlabeled,
    split_initial,
)
from nodewrap.utils.dom import parse_page
from test.helpers import make_page, movie_html

TD1 = '/html[1]/body[1]/table[1]/tr[1]/td[1]'
H1 = '/html[1]/body[1]/h1[1]'


class TestCorpus(TestCase):
    """Test corpus loading, the initial split and unlabeled sampling"""

    def setUp(self):
        self.label_space = LabelSpace(['title', 'director'])
        self.pages = {
            'p1': parse_page(movie_html('The Lost City', 'Ann Lee'), 'p1', 'site-a'),
            'p2': parse_page(movie_html('Night Train', 'Bo Park'), 'p2', 'site-a'),
        }

    def test_label_pages(self):
        """test unmentioned nodes of a labeled page are NONE and unlabeled pages stay out"""
        labeled = label_pages(
            self.pages,
            [LabelRecord('p1', H1, 'title'), LabelRecord('p1', TD1, 'director')],
            self.label_space,
        )

        self.assertEqual(list(labeled), ['p1'])
        self.assertEqual(
            [(sample.node.text, sample.label) for sample in labeled['p1']],
            [
                ('Movie page', NONE_LABEL),
                ('The Lost City', 'title'),
                ('Director', NONE_LABEL),
                ('Ann Lee', 'director'),
                ('Notes', NONE_LABEL),
            ],
        )

    def test_label_pages_unknown_attribute(self):
        """test labels outside the attribute set are rejected"""
        with self.assertRaises(UnknownAttribute):
            label_pages(self.pages, [LabelRecord('p1', H1, 'budget')], self.label_space)

    def test_label_pages_dangling(self):
        """test labels pointing at a missing page or node are rejected"""
        with self.assertRaises(DanglingXPath):
            label_pages(self.pages, [LabelRecord('p9', H1, 'title')], self.label_space)
        with self.assertRaises(DanglingXPath):
            label_pages(self.pages, [LabelRecord('p1', '/html[1]/body[1]/h2[1]', 'title')], self.label_space)

    def test_label_pages_conflict(self):
        """test a node labeled with two attributes is rejected"""
        with self.assertRaises(ConflictingLabel):
            label_pages(
                self.pages,
                [LabelRecord('p1', H1, 'title'), LabelRecord('p1', H1, 'director')],
                self.label_space,
            )

    def test_label_space(self):
        """test NONE is the last class and cannot be an attribute"""
        self.assertEqual(self.label_space.classes, ['title', 'director', NONE_LABEL])
        self.assertEqual(self.label_space.none_index, 2)
        numpy.testing.assert_array_equal(self.label_space.one_hot('director'), [0.0, 1.0, 0.0])
        with self.assertRaises(UnknownAttribute):
            LabelSpace(['title', NONE_LABEL])
        with self.assertRaises(UnknownAttribute):
            LabelSpace([])

    def test_load_corpus(self):
        """test a vertical directory is parsed and labeled"""
        vertical_dir = tempfile.mkdtemp()
        try:
            pages = [('site-a', 'a1', 'Up'), ('site-a', 'a2', 'Down'), ('site-b', 'b1', 'Left')]
            for website_id, page_id, title in pages:
                os.makedirs(os.path.join(vertical_dir, website_id), exist_ok=True)
                with open(os.path.join(vertical_dir, website_id, f'{page_id}.html'), 'wb') as page_file:
                    page_file.write(movie_html(title, 'Ann Lee'))
            label_path = os.path.join(vertical_dir, 'labels.jsonl')
            with open(label_path, 'w') as label_file:
                label_file.write(json.dumps({'page': 'a1', 'xpath': H1, 'attribute': 'title'}) + '\n\n')

            corpus = load_corpus(vertical_dir, [label_path], ['title', 'director'], num_parallel=2)

            self.assertEqual(sorted(corpus.pages), ['a1', 'a2', 'b1'])
            self.assertEqual(corpus.website_ids(), ['site-a', 'site-b'])
            self.assertEqual(corpus.seed_website_ids(), ['site-a'])
            self.assertEqual(corpus.unlabeled_page_ids, ['a2', 'b1'])
            self.assertEqual(len(corpus.unlabeled_pool), 10)
            self.assertEqual(corpus.pages['b1'].website_id, 'site-b')
        finally:
            shutil.rmtree(vertical_dir)

    def test_load_corpus_duplicate_page_ids(self):
        """test the same page id under two websites is rejected"""
        vertical_dir = tempfile.mkdtemp()
        try:
            for website_id in ['site-a', 'site-b']:
                os.makedirs(os.path.join(vertical_dir, website_id))
                with open(os.path.join(vertical_dir, website_id, 'same.html'), 'wb') as page_file:
                    page_file.write(movie_html('Up', 'Ann Lee'))

            with self.assertRaises(DanglingXPath):
                load_corpus(vertical_dir, None, ['title'])
        finally:
            shutil.rmtree(vertical_dir)

    def test_load_corpus_page_id_collision_within_website(self):
        """test two files of one website mapping to the same page id are rejected, nested files ignored"""
        vertical_dir = tempfile.mkdtemp()
        try:
            site_dir = os.path.join(vertical_dir, 'site-a')
            os.makedirs(os.path.join(site_dir, 'archive'))
            for path in ['p1.html', os.path.join('archive', 'p1.html')]:
                with open(os.path.join(site_dir, path), 'wb') as page_file:
                    page_file.write(movie_html('Up', 'Ann Lee'))

            self.assertEqual(sorted(load_corpus(vertical_dir, None, ['title']).pages), ['p1'])

            with open(os.path.join(site_dir, 'p1.htm'), 'wb') as page_file:
                page_file.write(movie_html('Down', 'Bo Park'))
            with self.assertRaises(DanglingXPath) as context:
                load_corpus(vertical_dir, None, ['title'])
            self.assertIn('p1.htm', str(context.exception))
            self.assertIn('p1.html', str(context.exception))
        finally:
            shutil.rmtree(vertical_dir)

    def _labeled_pages(self, sites: int, pages: int):
        label_space = LabelSpace(['title'])
        by_site = {}
        for site in range(sites):
            website_id = f'site-{site}'
            page_samples = []
            for index in range(pages):
                page = make_page(f'{website_id}-{index}', website_id, [f'Title {index}', 'Footer'])
                records = [LabelRecord(page.page_id, page.nodes[0].xpath, 'title')]
                page_samples.append(label_pages({page.page_id: page}, records, label_space)[page.page_id])
            by_site[website_id] = page_samples
        return by_site, label_space

    def test_split_initial(self):
        """test the split is page-level with the requested validation pages per website"""
        by_site, label_space = self._labeled_pages(sites=2, pages=5)

        augmented, validation = split_initial(by_site, 2, label_space, numpy.random.default_rng(3))

        training_pages = set(augmented.page_ids())
        validation_pages = set(validation.page_ids())
        self.assertFalse(training_pages & validation_pages)
        self.assertEqual(len(training_pages), 6)
        self.assertEqual(len(validation_pages), 4)
        for website_id in by_site:
            self.assertEqual(len({entry.page_id for entry in validation.for_site(website_id)}), 2)
        self.assertTrue(all(sample.source == LabelSource.HUMAN for sample in augmented.samples))
        self.assertTrue(all(sample.weight == 1.0 for sample in augmented.samples))
        self.assertEqual(len(augmented) + len(validation), 20)

    def test_split_initial_is_seeded(self):
        """test the same seed gives the same split"""
        by_site, label_space = self._labeled_pages(sites=2, pages=5)

        _, first = split_initial(by_site, 2, label_space, numpy.random.default_rng(11))
        _, second = split_initial(by_site, 2, label_space, numpy.random.default_rng(11))

        self.assertEqual(first.page_ids(), second.page_ids())

    def test_split_initial_errors(self):
        """test too few labeled pages or no validation pages are rejected"""
        by_site, label_space = self._labeled_pages(sites=1, pages=3)

        with self.assertRaises(InsufficientLabeledPages):
            split_initial(by_site, 3, label_space, numpy.random.default_rng(0))
        with self.assertRaises(InvalidConfig):
            split_initial(by_site, 0, label_space, numpy.random.default_rng(0))

    def test_sample_unlabeled(self):
        """test draws are without replacement until the pool is exhausted"""
        pool = list(make_page('p1', 'site-a', [f'text {index}' for index in range(10)]).nodes)
        rng = numpy.random.default_rng(5)
        consumed = set()

        first = sample_unlabeled(pool, 4, rng, consumed)
        second = sample_unlabeled(pool, 4, rng, consumed)
        third = sample_unlabeled(pool, 4, rng, consumed)
        fourth = sample_unlabeled(pool, 4, rng, consumed)

        self.assertEqual([len(first), len(second), len(third), len(fourth)], [4, 4, 2, 0])
        keys = [node.key for node in first + second + third]
        self.assertEqual(len(set(keys)), 10)
        self.assertEqual(consumed, {node.key for node in pool})
        self.assertEqual(first, sorted(first, key=lambda node: node.node_id))
