"""Multi-seed comparison of self-training variants against the teacher-only baseline"""
import copy
import logging
import os
import statistics
from typing import Callable, Dict, List, Optional, Sequence

from nodewrap.exceptions import InsufficientLabeledPages, InvalidConfig
from nodewrap.models.classifier_state import ClassifierState
from nodewrap.models.reports import SweepResult, VariantResult
from nodewrap.models.samples import LabeledSample
from nodewrap.models.training_config import GenerativeSource, TrainingConfig
from nodewrap.utils.corpus import LoadedCorpus, pool_from_pages
from nodewrap.utils.evaluation import (
    ExperimentSplit,
    SplitMode,
    evaluate,
    extract_pages,
    read_ground_truth,
    split_experiment,
)
from nodewrap.utils.self_training import run_least, train_baseline
from nodewrap.utils.synth import DEFAULT_LABELED_PAGES, GROUND_TRUTH_FILE

logger = logging.getLogger(__name__)

BASELINE = 'baseline'


def _full(config: TrainingConfig):
    return config


def _no_generative(config: TrainingConfig):
    config.use_generative_model = False


def _overlap_only(config: TrainingConfig):
    config.generative_sources = [GenerativeSource.OVERLAP]


def _no_reweighting(config: TrainingConfig):
    config.adaptive_reweighting = False


def _no_noise_robust_loss(config: TrainingConfig):
    config.noise_robust_loss = False


VARIANTS: Dict[str, Optional[Callable[[TrainingConfig], object]]] = {
    BASELINE: None,
    'full': _full,
    'no_generative': _no_generative,
    'overlap_only': _overlap_only,
    'no_reweighting': _no_reweighting,
    'no_noise_robust_loss': _no_noise_robust_loss,
}


def find_ground_truth_files(vertical_dir: str) -> List[str]:
    """
    :param vertical_dir: A vertical directory written by the synthetic generator.
    :return: The per-website ground-truth files, sorted.
    """
    paths = []
    for website_id in sorted(os.listdir(vertical_dir)):
        path = os.path.join(vertical_dir, website_id, GROUND_TRUTH_FILE)
        if os.path.isfile(path):
            paths.append(path)
    return paths


def check_no_leak(split: ExperimentSplit, training: LoadedCorpus):
    """
    Fail when a test page reaches the training corpus.
    :param split: The experiment split.
    :param training: The corpus handed to training.
    """
    leaked = sorted(set(split.test_page_ids) & set(training.pages))
    if leaked:
        raise RuntimeError(f"Test pages {leaked[:5]} leaked into the training corpus")


def train_variant(variant: str, config: TrainingConfig, training: LoadedCorpus) -> ClassifierState:
    """
    :param variant: A name from VARIANTS.
    :param config: The base configuration. Not modified.
    :param training: The training corpus.
    :return: The trained classifier.
    """
    if variant not in VARIANTS:
        raise ValueError(f"Unknown variant '{variant}', expected one of {sorted(VARIANTS)}")
    if variant == BASELINE:
        return train_baseline(config, training)

    config = copy.deepcopy(config)
    VARIANTS[variant](config)
    pool = pool_from_pages(training.pages[page_id] for page_id in training.unlabeled_page_ids)
    return run_least(config, training, pool).model


# pylint: disable=too-many-arguments,too-many-locals
def run_experiment(
        corpus: LoadedCorpus,
        ground_truth_files: Sequence[str],
        variants: Sequence[str],
        seeds: Sequence[int],
        config: TrainingConfig,
        mode: SplitMode,
        seed_sites: Sequence[str],
        target_sites: Sequence[str],
        held_out_per_seed: int = 100,
) -> List[VariantResult]:
    """
    Train every variant with every seed and score it on the test pages of the split.
    :param corpus: The full corpus of the vertical.
    :param ground_truth_files: Ground-truth files covering the test pages.
    :param variants: Names from VARIANTS.
    :param seeds: The seeds to run. Each seed drives the split and the training.
    :param config: The base configuration.
    :param mode: Zero-shot or in-domain evaluation.
    :param seed_sites: Websites whose human labels are used.
    :param target_sites: Websites reserved for zero-shot testing.
    :param held_out_per_seed: In-domain test pages per seed website.
    :return: One result per variant, with the macro-F1 of every seed and their median.
    """
    ground_truth = read_ground_truth(ground_truth_files)
    scores: Dict[str, List[float]] = {variant: [] for variant in variants}

    for seed in seeds:
        split = split_experiment(corpus, mode, seed_sites, target_sites, held_out_per_seed, seed=seed)
        training = split.training_corpus(corpus)
        check_no_leak(split, training)
        test_pages = [corpus.pages[page_id] for page_id in split.test_page_ids]
        test_truth = {page_id: ground_truth.get(page_id, {}) for page_id in split.test_page_ids}
        seeded = copy.deepcopy(config)
        seeded.seed = seed

        for variant in variants:
            model = train_variant(variant, seeded, training)
            results = extract_pages(model, test_pages, num_parallel=config.num_parallel)
            macro_f1 = evaluate(results, test_truth, corpus.label_space.attributes).macro_f1
            scores[variant].append(macro_f1)
            logger.info('Seed %d, %s: %s macro-F1 %.2f', seed, variant, mode.value, macro_f1)

    return [
        VariantResult(variant, list(seeds), scores[variant], statistics.median(scores[variant]))
        for variant in variants
    ]


def restrict_labeled_pages(corpus: LoadedCorpus, pages_per_site: int) -> LoadedCorpus:
    """
    Keep the first labeled pages of every seed website, in page-id order. Pages that lose their labels
    stay in the corpus as unlabeled pages.
    :param corpus: The corpus.
    :param pages_per_site: Labeled pages to keep per seed website, validation pages included.
    :return: A corpus sharing the pages with fewer labels.
    """
    kept: Dict[str, List[LabeledSample]] = {}
    for website_id, page_ids in corpus.labeled_pages_by_site().items():
        if len(page_ids) < pages_per_site:
            raise InsufficientLabeledPages(
                f"Seed website {website_id} has {len(page_ids)} labeled pages, {pages_per_site} are needed"
            )
        kept.update((page_id, corpus.labeled[page_id]) for page_id in page_ids[:pages_per_site])
    return LoadedCorpus(pages=corpus.pages, labeled=kept, label_space=corpus.label_space)


# pylint: disable=too-many-arguments
def run_label_sweep(
        corpus: LoadedCorpus,
        ground_truth_files: Sequence[str],
        variants: Sequence[str],
        seeds: Sequence[int],
        config: TrainingConfig,
        candidate_seed_sites: Sequence[str],
        target_sites: Sequence[str],
        seed_site_counts: Sequence[int] = (2, 3, 4, 5),
        labeled_page_counts: Sequence[int] = (DEFAULT_LABELED_PAGES,),
) -> List[SweepResult]:
    """
    Zero-shot label efficiency: rerun the experiment with the first n candidate seed websites and k
    training pages per seed website, always testing on the same target websites. Candidates left out of
    the seed set join the unlabeled pool.
    :param corpus: The full corpus of the vertical.
    :param ground_truth_files: Ground-truth files covering the target websites.
    :param variants: Names from VARIANTS.
    :param seeds: The seeds of every point.
    :param config: The base configuration. Its validation pages come on top of the training pages.
    :param candidate_seed_sites: Labeled websites, in the order they join the seed set.
    :param target_sites: Websites reserved for testing.
    :param seed_site_counts: The seed set sizes to try.
    :param labeled_page_counts: The training pages per seed website to try.
    :return: One result per (seed set size, training pages) point, in sweep order.
    """
    points = []
    for count in seed_site_counts:
        if not 2 <= count <= len(candidate_seed_sites):
            raise InvalidConfig(
                f"Seed set size {count} must lie in [2, {len(candidate_seed_sites)}], "
                f"the number of candidate seed websites"
            )
        for labeled_pages in labeled_page_counts:
            if labeled_pages < 1:
                raise InvalidConfig(
                    f"At least one training page per seed website is needed, got {labeled_pages}"
                )
            restricted = restrict_labeled_pages(corpus, labeled_pages + config.validation_pages_per_site)
            results = run_experiment(
                restricted, ground_truth_files, variants, seeds, config, SplitMode.ZERO_SHOT,
                candidate_seed_sites[:count], target_sites,
            )
            for result in results:
                logger.info('%d seed websites, %d training pages: %s median macro-F1 %.2f',
                            count, labeled_pages, result.variant, result.median_macro_f1)
            points.append(SweepResult(count, labeled_pages, results))
    return points
