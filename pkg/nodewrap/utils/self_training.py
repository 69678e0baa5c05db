"""The self-training loop: teacher training, pseudo-label fusion, reweighting and student training"""
import json
import logging
import math
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy

from nodewrap.exceptions import InsufficientLabeledPages
from nodewrap.models.classifier_state import ClassifierState
from nodewrap.models.dom_page import DetailPage, DomNodeRecord
from nodewrap.models.relations import LabelingFunction
from nodewrap.models.reports import IterationReport
from nodewrap.models.samples import (
    AugmentedCorpus,
    NONE_LABEL,
    LabeledSample,
    LabelSource,
    LabelSpace,
    PseudoLabeledSample,
)
from nodewrap.models.training_config import GenerativeSource, TrainingConfig
from nodewrap.utils.classifier import (
    FeatureStore,
    LossConfig,
    hard_labels,
    predict_matrix,
    train_student,
    train_supervised,
)
from nodewrap.utils.collection_utils import parallel_map
from nodewrap.utils.corpus import LoadedCorpus, sample_unlabeled, split_initial
from nodewrap.utils.evaluation import evaluate, extract_pages
from nodewrap.utils.reweighting import PageSignature, WeightCase, build_page_signature, compute_page_weight
from nodewrap.utils.weak_supervision import GenerativeLabeler

logger = logging.getLogger(__name__)

EARLY_STOP_PATIENCE = 2
RNG_STREAMS = ('split', 'sampling', 'fusion', 'teacher', 'student', 'noise')


def beta_schedule(t: int, prior: float, cfg: TrainingConfig) -> float:
    """
    :param t: The iteration, starting at 1.
    :param prior: The previous probability of trusting the generative labeler.
    :param cfg: Training configuration holding k_beta1 and k_beta2.
    :return: prior - k_beta1 * e^(-k_beta2 * t), clamped to [0, 1].
    """
    return min(1.0, max(0.0, prior - cfg.k_beta1 * math.exp(-cfg.k_beta2 * t)))


def k_schedule(t: int, prior: float, cfg: TrainingConfig) -> float:
    """
    :param t: The iteration, starting at 1.
    :param prior: The previous penalty term.
    :param cfg: Training configuration holding k_c1 and k_c2.
    :return: prior - k_c1 * e^(-k_c2 * t).
    """
    return prior - cfg.k_c1 * math.exp(-cfg.k_c2 * t)


def fuse_pseudo_label(
        gamma_label: Optional[str],
        teacher_soft: numpy.ndarray,
        beta_t: float,
        rng: numpy.random.Generator,
        label_space: LabelSpace,
) -> Tuple[str, numpy.ndarray, LabelSource]:
    """
    Pick the pseudo-label of one node. One uniform is drawn per call whether or not the generative
    labeler has an opinion, so the stream stays aligned across ablations.
    :param gamma_label: The generative labeler's label, or None when it abstains.
    :param teacher_soft: The teacher's probability vector.
    :param beta_t: The probability of trusting the generative labeler.
    :param rng: Random generator for the draw.
    :param label_space: The class order.
    :return: A tuple of hard label, soft label and label source.
    """
    draw = rng.random()
    if gamma_label is not None and draw < beta_t:
        return gamma_label, label_space.one_hot(gamma_label), LabelSource.GENERATIVE
    return label_space.label_at(int(numpy.argmax(teacher_soft))), teacher_soft, LabelSource.TEACHER


class TrainingResult:
    """The final student with everything a run recorded along the way"""

    def __init__(
            self,
            model: ClassifierState,
            reports: List[IterationReport],
            audit: List[dict],
            weights: List[dict],
    ):
        self.model = model
        self.reports = reports
        self.audit = audit
        self.weights = weights

    def write_audit(self, path: str):
        _write_json_lines(self.audit, path)

    def write_weights(self, path: str):
        _write_json_lines(self.weights, path)


def _write_json_lines(records: Sequence[dict], path: str):
    with open(path, 'w', encoding='utf-8') as output_file:
        for record in records:
            output_file.write(json.dumps(record, sort_keys=True) + '\n')


def make_rngs(seed: int) -> Dict[str, numpy.random.Generator]:
    """
    :param seed: The run seed.
    :return: One independent generator per concern.
    """
    children = numpy.random.SeedSequence(seed).spawn(len(RNG_STREAMS))
    return {name: numpy.random.default_rng(child) for name, child in zip(RNG_STREAMS, children)}


def _seed_pages(corpus: LoadedCorpus) -> Dict[str, List[List[LabeledSample]]]:
    by_site = corpus.labeled_pages_by_site()
    if len(by_site) < 2:
        raise InsufficientLabeledPages(
            f"At least 2 seed websites with labeled pages are needed, got {len(by_site)}"
        )
    return {
        website_id: [corpus.labeled[page_id] for page_id in page_ids]
        for website_id, page_ids in by_site.items()
    }


def train_baseline(config: TrainingConfig, corpus: LoadedCorpus) -> ClassifierState:
    """
    Train the classifier on the human-labeled training pages only. This is the first teacher of a
    self-training run with the same configuration.
    :param config: The training configuration.
    :param corpus: The training corpus.
    :return: The trained classifier.
    """
    rngs = make_rngs(config.seed)
    label_space = corpus.label_space
    augmented, _ = split_initial(
        _seed_pages(corpus), config.validation_pages_per_site, label_space, rngs['split']
    )
    samples = _human_training_samples(corpus, augmented)
    store = FeatureStore(corpus.pages, config.feature_dimension)
    model = ClassifierState(label_space.classes, config.feature_dimension, config.seed)
    return train_supervised(
        model, samples, store, config.epochs_teacher, config.alpha, rngs['teacher'], config.batch_size
    )


def _human_training_samples(corpus: LoadedCorpus, augmented: AugmentedCorpus) -> List[LabeledSample]:
    return [
        sample
        for page_id in sorted({sample.page_id for sample in augmented.human_samples()})
        for sample in corpus.labeled[page_id]
    ]


class SelfTrainer:
    """Owns the models, the augmented corpus and the validation set of one run"""

    def __init__(
            self,
            config: TrainingConfig,
            corpus: LoadedCorpus,
            pool: Optional[Sequence[DomNodeRecord]] = None,
            functions: Optional[Sequence[LabelingFunction]] = None,
    ):
        """
        :param config: The training configuration.
        :param corpus: The training corpus. Its labeled pages come from the seed websites.
        :param pool: The unlabeled node pool. Defaults to every node of the corpus' unlabeled pages.
        :param functions: The labeling functions. Defaults to the shipped ones.
        """
        self.config = config
        self.corpus = corpus
        self.label_space = corpus.label_space
        self.pool = list(pool) if pool is not None else corpus.unlabeled_pool
        self.functions = functions
        self.rngs = make_rngs(config.seed)
        self.store = FeatureStore(corpus.pages, config.feature_dimension)
        self.class_index = {name: index for index, name in enumerate(self.label_space.classes)}

        seed_pages = _seed_pages(corpus)
        self.seed_sites: Set[str] = set(seed_pages)
        self.augmented, self.validation = split_initial(
            seed_pages, config.validation_pages_per_site, self.label_space, self.rngs['split']
        )
        self.human_samples = _human_training_samples(corpus, self.augmented)
        self.human_page_ids: Set[str] = {sample.page_id for sample in self.human_samples}
        self.labeler = self._build_labeler()
        self._gamma: Dict[str, Dict[int, str]] = {}

    def _build_labeler(self) -> Optional[GenerativeLabeler]:
        if not self.config.use_generative_model:
            return None

        # validation and test pages stay out of the relations
        allowed = self.human_page_ids | {node.page_id for node in self.pool}
        site_pages: Dict[str, List[DetailPage]] = {
            website_id: [page for page in self.corpus.pages_of(website_id) if page.page_id in allowed]
            for website_id in sorted(self.seed_sites)
        }
        labeled_pages = [self.corpus.labeled[page_id] for page_id in sorted(self.human_page_ids)]
        return GenerativeLabeler.build(
            labeled_pages,
            site_pages,
            self.label_space,
            functions=self.functions,
            use_functions=GenerativeSource.FUNCTIONS in self.config.generative_sources,
            use_overlap=GenerativeSource.OVERLAP in self.config.generative_sources,
            min_overlap=self.config.min_overlap,
            drop_unsound=self.config.drop_unsound_functions,
        )

    def _gamma_labels(self, nodes: Sequence[DomNodeRecord]) -> List[Optional[str]]:
        if self.labeler is None:
            return [None] * len(nodes)

        missing = sorted({node.page_id for node in nodes} - set(self._gamma))
        pages = [self.corpus.pages[page_id] for page_id in missing]
        labeled = self.labeler.label_pages(pages, self.config.num_parallel)
        for page_id, labels in zip(missing, labeled):
            self._gamma[page_id] = {label.node.node_id: label.label for label in labels}
        return [self._gamma[node.page_id].get(node.node_id) for node in nodes]

    def _fuse(self, nodes: Sequence[DomNodeRecord], teacher: ClassifierState, beta: float):
        probabilities = predict_matrix(teacher, self.store.matrix(nodes))
        gamma = self._gamma_labels(nodes)
        rng = self.rngs['fusion']
        return [
            fuse_pseudo_label(gamma[position], probabilities[position], beta, rng, self.label_space)
            for position in range(len(nodes))
        ]

    def _refresh_pseudo_labels(self, teacher: ClassifierState, beta: float):
        pseudo = self.augmented.pseudo_samples()
        fused = self._fuse([sample.node for sample in pseudo], teacher, beta)
        for sample, (hard, soft, source) in zip(pseudo, fused):
            sample.hard_label, sample.soft_label, sample.source = hard, soft, source

    def _refresh_validation(self, teacher: ClassifierState):
        entries = self.validation.entries
        if not entries:
            return
        probabilities = predict_matrix(teacher, self.store.matrix([entry.node for entry in entries]))
        for entry, soft, hard in zip(entries, probabilities, hard_labels(probabilities, self.label_space)):
            entry.soft_label = soft
            entry.hard_label = hard

    def _signatures(self, teacher: ClassifierState, page_ids: Sequence[str]) -> Dict[str, PageSignature]:
        def signature(page_id: str) -> PageSignature:
            page = self.corpus.pages[page_id]
            labels = hard_labels(predict_matrix(teacher, self.store.matrix(page.nodes)), self.label_space)
            return build_page_signature(page_id, page.nodes, labels)

        # featurize serially so the workers only read the cache
        for page_id in page_ids:
            self.store.matrix(self.corpus.pages[page_id].nodes)
        return dict(zip(page_ids, parallel_map(signature, page_ids, self.config.num_parallel)))

    def _reweight(self, teacher: ClassifierState, iteration: int) -> List[dict]:
        page_ids = self.augmented.page_ids()
        if not self.config.adaptive_reweighting:
            for sample in self.augmented.samples:
                sample.weight, sample.weight_iteration = 1.0, iteration
            return [
                {'page': page_id, 'weight': 1.0, 'case': WeightCase.UNIFORM.value,
                 'matched_validation_page': None, 'iteration': iteration}
                for page_id in page_ids
            ]

        validation_page_ids = self.validation.page_ids()
        signatures = self._signatures(teacher, sorted(set(page_ids) | set(validation_page_ids)))
        reweight_config = self.config.reweight_config

        def page_weight(page_id: str):
            website_id = self.corpus.pages[page_id].website_id
            return compute_page_weight(
                page_id,
                website_id,
                self.validation,
                signatures,
                is_human_labeled_seed_page=page_id in self.human_page_ids,
                is_seed_site=website_id in self.seed_sites,
                cfg=reweight_config,
                class_index=self.class_index,
                validation_page_ids=validation_page_ids,
            )

        computed = parallel_map(page_weight, page_ids, self.config.num_parallel)
        weights = {weight.page_id: weight for weight in computed}
        for sample in self.augmented.samples:
            sample.weight = 1.0 if sample.source == LabelSource.HUMAN else weights[sample.page_id].weight
            sample.weight_iteration = iteration
        return [
            {'page': weight.page_id, 'weight': weight.weight, 'case': weight.case.value,
             'matched_validation_page': weight.matched_validation_page, 'iteration': iteration}
            for weight in weights.values()
        ]

    def _check_weights(self, iteration: int):
        stale = [sample.node.key for sample in self.augmented.samples if sample.weight_iteration != iteration]
        if stale:
            raise RuntimeError(f"{len(stale)} samples carry stale weights, e.g. {stale[0]}")
        if any(not 0.0 < sample.weight <= 1.0 for sample in self.augmented.samples):
            raise RuntimeError("Sample weights must lie in (0, 1]")

    def _validation_macro_f1(self, model: ClassifierState) -> float:
        page_ids = self.validation.page_ids()
        truth: Dict[str, Dict[str, Set[str]]] = {page_id: {} for page_id in page_ids}
        for entry in self.validation.entries:
            if entry.human_label != NONE_LABEL:
                truth[entry.page_id].setdefault(entry.human_label, set()).add(entry.node.text)
        results = extract_pages(
            model, [self.corpus.pages[page_id] for page_id in page_ids], self.store, num_parallel=1
        )
        return evaluate(results, truth, self.label_space.attributes).macro_f1

    def run(self) -> TrainingResult:
        """
        :return: The final student and the per-iteration records.
        """
        cfg = self.config
        beta, k = cfg.beta0, cfg.k0
        model = ClassifierState(self.label_space.classes, cfg.feature_dimension, cfg.seed)
        reports: List[IterationReport] = []
        audit: List[dict] = []
        weight_dump: List[dict] = []
        best_f1, stale_iterations = -1.0, 0

        for iteration in range(1, cfg.T + 1):
            beta = beta_schedule(iteration, beta, cfg)
            k = k_schedule(iteration, k, cfg)

            teacher = train_supervised(
                model, self.human_samples, self.store, cfg.epochs_teacher, cfg.alpha, self.rngs['teacher'],
                cfg.batch_size,
            )

            if cfg.refresh_pseudo_labels:
                self._refresh_pseudo_labels(teacher, beta)
            new_nodes = sample_unlabeled(
                self.pool, cfg.L, self.rngs['sampling'], self.augmented.consumed_pool_ids
            )
            for node, (hard, soft, source) in zip(new_nodes, self._fuse(new_nodes, teacher, beta)):
                self.augmented.add(PseudoLabeledSample(node, hard, soft, source, iteration))

            self._refresh_validation(teacher)
            weight_dump.extend(self._reweight(teacher, iteration))
            self._check_weights(iteration)

            student, student_loss = train_student(
                teacher,
                self.augmented,
                self.store,
                cfg.epochs_student,
                cfg.alpha,
                LossConfig(k, self.rngs['noise'], cfg.noise_robust_loss),
                self.rngs['student'],
                cfg.batch_size,
            )
            model = student

            macro_f1 = self._validation_macro_f1(student)
            report = IterationReport(
                iteration=iteration,
                beta=beta,
                k=k,
                corpus_size=len(self.augmented),
                new_samples=len(new_nodes),
                validation_macro_f1=macro_f1,
                mean_weight=float(numpy.mean([sample.weight for sample in self.augmented.samples])),
                source_counts=self.augmented.source_counts(),
                student_loss=student_loss,
            )
            reports.append(report)
            audit.append({'iteration': iteration, 'added': [list(node.key) for node in new_nodes]})
            logger.info(
                'Iteration %d: beta=%.5f k=%.5f corpus=%d added=%d validation macro-F1=%.2f loss=%.5f',
                iteration, beta, k, report.corpus_size, report.new_samples, macro_f1, student_loss,
            )

            if macro_f1 > best_f1:
                best_f1, stale_iterations = macro_f1, 0
            else:
                stale_iterations += 1
            if cfg.early_stop and stale_iterations >= EARLY_STOP_PATIENCE:
                logger.info('Validation macro-F1 stalled for %d iterations, stopping', stale_iterations)
                break

        return TrainingResult(model, reports, audit, weight_dump)


def run_least(
        config: TrainingConfig,
        corpus: LoadedCorpus,
        pool: Optional[Sequence[DomNodeRecord]] = None,
        functions: Optional[Sequence[LabelingFunction]] = None,
) -> TrainingResult:
    """
    Run teacher-student self-training with generative pseudo-labels and adaptive sample weights.
    :param config: The training configuration.
    :param corpus: The training corpus with the human-labeled pages of at least 2 seed websites.
    :param pool: The unlabeled node pool. Defaults to every node of the corpus' unlabeled pages.
    :param functions: The labeling functions. Defaults to the shipped ones.
    :return: The final student and the per-iteration reports.
    """
    return SelfTrainer(config, corpus, pool, functions).run()
