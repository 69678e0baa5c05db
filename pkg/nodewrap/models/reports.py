"""Data classes for training, extraction and evaluation reports"""
# pylint: disable=missing-docstring
from typing import Dict, List, NamedTuple, Optional


class IterationReport:
    # pylint: disable=too-many-arguments,too-many-instance-attributes
    def __init__(
            self,
            iteration: int,
            beta: float,
            k: float,
            corpus_size: int,
            new_samples: int,
            validation_macro_f1: float,
            mean_weight: float,
            source_counts: Dict[str, int],
            student_loss: float,
    ):
        self.iteration = iteration
        self.beta = beta
        self.k = k
        self.corpus_size = corpus_size
        self.new_samples = new_samples
        self.validation_macro_f1 = validation_macro_f1
        self.mean_weight = mean_weight
        self.source_counts = source_counts
        self.student_loss = student_loss


class Prediction(NamedTuple):
    """The top-1 node predicted for one attribute of a page"""
    attribute: str
    xpath: str
    text: str
    confidence: float


class ExtractionResult:
    def __init__(self, page_id: str, website_id: str, predictions: Optional[Dict[str, Prediction]] = None):
        self.page_id = page_id
        self.website_id = website_id
        # at most one prediction per attribute
        self.predictions: Dict[str, Prediction] = predictions or {}

    def __repr__(self) -> str:
        return f"ExtractionResult({self.page_id}, {sorted(self.predictions)})"


class AttributeScore:
    # pylint: disable=too-many-arguments
    def __init__(self, precision: float, recall: float, f1: float,
                 predictions: int, correct: int, pages: int):
        self.precision = precision
        self.recall = recall
        self.f1 = f1
        self.predictions = predictions
        self.correct = correct
        self.pages = pages


class EvalReport:
    """Page-level precision, recall and F1 per attribute, in percent"""

    def __init__(self, scores: Dict[str, AttributeScore], macro_f1: float):
        self.scores = scores
        self.macro_f1 = macro_f1
        self.predictions = sum(score.predictions for score in scores.values())
        self.correct = sum(score.correct for score in scores.values())
        self.pages_with_truth = sum(score.pages for score in scores.values())


class VariantResult:
    def __init__(self, variant: str, seeds: List[int], macro_f1: List[float], median_macro_f1: float):
        self.variant = variant
        self.seeds = seeds
        self.macro_f1 = macro_f1
        self.median_macro_f1 = median_macro_f1


class SweepResult:
    """The variant results of one point of a label-efficiency sweep"""

    def __init__(self, seed_site_count: int, labeled_pages: int, results: List[VariantResult]):
        self.seed_site_count = seed_site_count
        self.labeled_pages = labeled_pages
        self.results = results
