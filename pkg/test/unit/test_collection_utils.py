"""Test collection utilities"""
import threading
from unittest import TestCase

from nodewrap.utils.collection_utils import parallel_map, update


class TestCollectionUtils(TestCase):
    """Test collection utilities"""

    def test_update(self):
        """test nested dictionaries merge and lists are replaced"""
        merged = update(
            {'T': 5, 'nested': {'a': 1, 'b': 2}, 'generative_sources': ['functions', 'overlap']},
            {'nested': {'b': 3}, 'generative_sources': ['overlap']},
        )

        self.assertEqual(merged, {'T': 5, 'nested': {'a': 1, 'b': 3}, 'generative_sources': ['overlap']})

    def test_parallel_map_keeps_order(self):
        """test results come back in item order"""
        squares = parallel_map(lambda value: value * value, range(20), 4)

        self.assertEqual(squares, [value * value for value in range(20)])
        self.assertEqual(parallel_map(str, [], 4), [])

    def test_parallel_map_inline(self):
        """test a single worker runs on the calling thread"""
        caller = threading.get_ident()

        threads = parallel_map(lambda _: threading.get_ident(), range(3), 1)

        self.assertEqual(threads, [caller] * 3)
