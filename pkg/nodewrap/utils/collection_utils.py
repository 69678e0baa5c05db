"""Utilities for working with collections"""
import concurrent.futures
from typing import Callable, Dict, Iterable, List, TypeVar

ItemT = TypeVar('ItemT')
ResultT = TypeVar('ResultT')


def update(dict1: Dict, dict2: Dict) -> Dict:
    """
    Recursively updates the first provided dictionary with the keys and values from the second dictionary.
    Child dictionaries are merged; lists and scalars from the second dictionary replace earlier values.
    :param dict1: The dictionary to merge into.
    :param dict2: The dictionary to merge.
    :return: A merged dictionary.
    """
    for key, value in dict2.items():
        if isinstance(value, dict):
            dict1[key] = update(dict1.get(key, {}), value)
        else:
            dict1[key] = value
    return dict1


def parallel_map(
        function: Callable[[ItemT], ResultT],
        items: Iterable[ItemT],
        num_parallel: int = 4,
) -> List[ResultT]:
    """
    Apply a pure function to every item using a thread pool.
    :param function: The function to apply. Must not mutate shared state.
    :param items: The items to map over.
    :param num_parallel: The number of worker threads. 1 runs inline.
    :return: The results in the same order as the items.
    """
    items = list(items)
    if num_parallel <= 1 or len(items) <= 1:
        return [function(item) for item in items]

    with concurrent.futures.ThreadPoolExecutor(max_workers=num_parallel) as executor:
        return list(executor.map(function, items))
