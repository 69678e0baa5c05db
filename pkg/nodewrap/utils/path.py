"""Module for containing convenience functions around path manipulation"""
import os
from typing import Dict, List

PAGE_EXTENSIONS = ('.html', '.htm')


def get_absolute_path(path: str, root_dir: str = None) -> str:
    """
    Convenience function for determining the full path to a file or directory.
    :param path: The path. Can be either relative from the cwd or an absolute path.
    :param root_dir: The root directory to use instead of the cwd.
    :return: An absolute path for the given path.
    """
    if os.path.isabs(path):
        return os.path.abspath(path)

    return os.path.abspath(os.path.join(root_dir or os.getcwd(), path))


def find_page_files(vertical_dir: str) -> Dict[str, List[str]]:
    """
    Find every detail page of a vertical laid out as <vertical>/<website_id>/<page_id>.html. Files in
    subdirectories of a website directory are not pages.
    :param vertical_dir: The vertical directory.
    :return: A dictionary of website id to the sorted absolute paths of its pages. Websites without
    pages are omitted.
    """
    vertical_dir = get_absolute_path(vertical_dir)
    if not os.path.isdir(vertical_dir):
        raise FileNotFoundError(f"Vertical directory '{vertical_dir}' does not exist")

    page_files: Dict[str, List[str]] = {}
    for website_id in sorted(os.listdir(vertical_dir)):
        site_dir = os.path.join(vertical_dir, website_id)
        if not os.path.isdir(site_dir):
            continue

        candidates = [os.path.join(site_dir, file_name) for file_name in sorted(os.listdir(site_dir))]
        pages = [
            path for path in candidates
            if path.lower().endswith(PAGE_EXTENSIONS) and os.path.isfile(path)
        ]
        if pages:
            page_files[website_id] = pages

    return page_files
