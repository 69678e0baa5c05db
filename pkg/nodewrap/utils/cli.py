"""Module for the nodewrap command line: one function per subcommand plus the argument parser"""
from __future__ import print_function

import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence

import jsons
from jsons import DeserializationError

from nodewrap import __version__
from nodewrap.exceptions import CorpusValidationError, InvalidConfig
from nodewrap.models.classifier_state import ClassifierState
from nodewrap.models.reports import VariantResult
from nodewrap.models.samples import LabelSource
from nodewrap.models.training_config import GenerativeSource, TrainingConfig
from nodewrap.utils.config import parse_training_configs
from nodewrap.utils.corpus import LoadedCorpus, load_corpus, load_pages
from nodewrap.utils.evaluation import (
    SplitMode,
    evaluate,
    extract_pages,
    read_ground_truth,
    read_predictions,
    write_predictions,
)
from nodewrap.utils.experiment import VARIANTS, find_ground_truth_files, run_experiment, run_label_sweep
from nodewrap.utils.self_training import run_least, train_baseline
from nodewrap.utils.synth import (
    DEFAULT_LABELED_PAGES,
    DEFAULT_REDESIGN_RATE,
    HUMAN_LABEL_FILE,
    PRESETS,
    SCHEMA_FILE,
    VALIDATION_LABEL_FILE,
    generate_vertical,
    preset_vertical,
)
from nodewrap.utils.weak_supervision import GenerativeLabeler

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_VALIDATION_ERROR = 2


def _attributes(args: argparse.Namespace) -> List[str]:
    if args.attributes:
        return [name.strip() for name in args.attributes.split(',') if name.strip()]
    schema_path = os.path.join(args.vertical_dir, SCHEMA_FILE)
    if os.path.isfile(schema_path):
        with open(schema_path, encoding='utf-8') as schema_file:
            return json.load(schema_file)['attributes']
    raise InvalidConfig(f"No --attributes given and no {SCHEMA_FILE} in {args.vertical_dir}")


def _label_files(args: argparse.Namespace) -> List[str]:
    if args.labels:
        return args.labels
    defaults = [os.path.join(args.vertical_dir, name) for name in (HUMAN_LABEL_FILE, VALIDATION_LABEL_FILE)]
    return [path for path in defaults if os.path.isfile(path)]


def _load(args: argparse.Namespace) -> LoadedCorpus:
    return load_corpus(
        args.vertical_dir, _label_files(args), _attributes(args), num_parallel=args.num_parallel or 4
    )


def _config(args: argparse.Namespace) -> TrainingConfig:
    overrides: Dict = {}
    if args.seed is not None:
        overrides['seed'] = args.seed
    if getattr(args, 'no_generative', False):
        overrides['use_generative_model'] = False
    if getattr(args, 'overlap_only', False):
        overrides['generative_sources'] = [GenerativeSource.OVERLAP.value]
    if getattr(args, 'no_reweighting', False):
        overrides['adaptive_reweighting'] = False
    if getattr(args, 'no_noise_robust_loss', False):
        overrides['noise_robust_loss'] = False
    if getattr(args, 'refresh_pseudo_labels', False):
        overrides['refresh_pseudo_labels'] = True
    if getattr(args, 'early_stop', False):
        overrides['early_stop'] = True
    if getattr(args, 'drop_unsound_functions', False):
        overrides['drop_unsound_functions'] = True
    if args.num_parallel is not None:
        overrides['num_parallel'] = args.num_parallel
    return parse_training_configs(args.config or [], overrides)


def _write_json_lines(records: Sequence[dict], path: str):
    with open(path, 'w', encoding='utf-8') as output_file:
        for record in records:
            output_file.write(json.dumps(record, sort_keys=True) + '\n')


def ingest(args: argparse.Namespace) -> int:
    """Parse and validate a vertical, then print its size"""
    corpus = _load(args)
    for website_id in corpus.website_ids():
        pages = corpus.pages_of(website_id)
        labeled = sum(1 for page in pages if page.page_id in corpus.labeled)
        nodes = sum(len(page) for page in pages)
        print(f"{website_id}: {len(pages)} pages, {labeled} labeled, {nodes} nodes")
    return EXIT_SUCCESS


def synth(args: argparse.Namespace) -> int:
    """Write a synthetic vertical"""
    relation, configs = preset_vertical(
        args.preset, args.vertical, sites=args.sites, pages_per_site=args.pages_per_site,
        seed=args.seed or 0, redesign_rate=args.redesign_rate,
        stable_pages=args.labeled_pages + args.validation_pages,
    )
    seed_sites = [cfg.website_id for cfg in configs[:args.seed_sites]]
    generate_vertical(
        args.out, relation, configs, seed_sites,
        labeled_pages=args.labeled_pages,
        validation_pages=args.validation_pages,
        num_parallel=args.num_parallel or 1,
    )
    print(f"Wrote {len(configs)} websites to {args.out}, seed websites: {', '.join(seed_sites)}")
    return EXIT_SUCCESS


def pseudo_label(args: argparse.Namespace) -> int:
    """Label the unlabeled pages of a vertical with the generative labeler only"""
    corpus = _load(args)
    config = _config(args)
    seed_sites = corpus.seed_website_ids()
    labeler = GenerativeLabeler.build(
        [corpus.labeled[page_id] for page_id in sorted(corpus.labeled)],
        {website_id: corpus.pages_of(website_id) for website_id in seed_sites},
        corpus.label_space,
        use_functions=GenerativeSource.FUNCTIONS in config.generative_sources,
        use_overlap=GenerativeSource.OVERLAP in config.generative_sources,
        min_overlap=config.min_overlap,
        drop_unsound=config.drop_unsound_functions,
    )
    pages = [corpus.pages[page_id] for page_id in corpus.unlabeled_page_ids]
    records = [
        {'page': label.node.page_id, 'xpath': label.node.xpath, 'attribute': label.label,
         'text': label.node.text, 'source': LabelSource.GENERATIVE.value, 'votes': label.votes}
        for labels in labeler.label_pages(pages, config.num_parallel)
        for label in labels
    ]
    _write_json_lines(records, args.out)
    print(f"Wrote {len(records)} distant labels for {len(pages)} pages to {args.out}")
    return EXIT_SUCCESS


def train(args: argparse.Namespace) -> int:
    """Run self-training, or train the teacher-only baseline"""
    corpus = _load(args)
    config = _config(args)
    if args.baseline:
        model = train_baseline(config, corpus)
    else:
        result = run_least(config, corpus)
        model = result.model
        if args.report:
            _write_json_lines([jsons.dump(report) for report in result.reports], args.report)
        if args.audit:
            result.write_audit(args.audit)
        if args.dump_weights:
            result.write_weights(args.dump_weights)
    model.save(args.checkpoint_out)
    print(f"Checkpoint written to {args.checkpoint_out}")
    return EXIT_SUCCESS


def extract(args: argparse.Namespace) -> int:
    """Extract top-1 attribute values from every page of a directory"""
    model = ClassifierState.load(args.checkpoint)
    pages = load_pages(args.pages, num_parallel=args.num_parallel or 1)
    ordered = [pages[page_id] for page_id in sorted(pages)]
    results = extract_pages(model, ordered, abstain=not args.no_abstain, num_parallel=args.num_parallel or 1)
    write_predictions(results, args.out)
    print(f"Wrote predictions for {len(results)} pages to {args.out}")
    return EXIT_SUCCESS


def evaluate_predictions(args: argparse.Namespace) -> int:
    """Score a prediction file against ground-truth files"""
    results = read_predictions(args.pred)
    ground_truth = read_ground_truth(args.truth)
    if args.attributes:
        attributes = [name.strip() for name in args.attributes.split(',') if name.strip()]
    else:
        attributes = sorted({name for page in ground_truth.values() for name in page})
    report = evaluate(results, ground_truth, attributes)
    if args.report:
        with open(args.report, 'w', encoding='utf-8') as report_file:
            json.dump(jsons.dump(report), report_file, sort_keys=True, indent=2)
    _print_scores(report.scores, report.macro_f1)
    return EXIT_SUCCESS


def _print_scores(scores, macro_f1: float):
    print(f"{'attribute':<20} {'P':>7} {'R':>7} {'F1':>7}")
    for attribute, score in sorted(scores.items()):
        print(f"{attribute:<20} {score.precision:7.2f} {score.recall:7.2f} {score.f1:7.2f}")
    print(f"{'macro-F1':<20} {'':>7} {'':>7} {macro_f1:7.2f}")


def _integers(text: str) -> List[int]:
    return [int(value) for value in text.split(',') if value.strip()]


def _print_results(results: Sequence[VariantResult], prefix: str = ''):
    for result in results:
        scores = ' '.join(f'{score:.2f}' for score in result.macro_f1)
        print(f"{prefix}{result.variant:<22} median {result.median_macro_f1:6.2f}  ({scores})")


def experiment(args: argparse.Namespace) -> int:
    """Compare variants over several seeds, or sweep the seed set size and the training pages"""
    corpus = _load(args)
    config = _config(args)
    seed_sites = args.seed_sites.split(',')
    target_sites = args.target_sites.split(',') if args.target_sites else []
    truth_files = args.truth or find_ground_truth_files(args.vertical_dir)
    variants, seeds = args.variants.split(','), _integers(args.seeds)

    if args.seed_site_counts or args.labeled_page_counts:
        points = run_label_sweep(
            corpus, truth_files, variants, seeds, config, seed_sites, target_sites,
            seed_site_counts=_integers(args.seed_site_counts or str(len(seed_sites))),
            labeled_page_counts=_integers(args.labeled_page_counts or str(DEFAULT_LABELED_PAGES)),
        )
        report = [jsons.dump(point) for point in points]
        for point in points:
            _print_results(point.results, f"{point.seed_site_count} seeds {point.labeled_pages:>3} pages  ")
    else:
        results = run_experiment(
            corpus, truth_files, variants, seeds, config,
            SplitMode(args.mode), seed_sites, target_sites, args.held_out_per_seed,
        )
        report = [jsons.dump(result) for result in results]
        _print_results(results)
    if args.report:
        with open(args.report, 'w', encoding='utf-8') as report_file:
            json.dump(report, report_file, sort_keys=True, indent=2)
    return EXIT_SUCCESS


def _add_corpus_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--vertical-dir', required=True, help='Directory laid out as <website>/<page>.html')
    parser.add_argument('--labels', action='append', help='Label JSON-lines file. May be repeated.')
    parser.add_argument('--attributes', help='Comma-separated attribute names. Defaults to schema.json.')


def _add_config_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--config', action='append', help='YAML training config. Later files win.')
    parser.add_argument('--no-generative', action='store_true', help='Use teacher pseudo-labels only')
    parser.add_argument('--overlap-only', action='store_true', help='Build relations from overlap rules only')
    parser.add_argument('--no-reweighting', action='store_true', help='Give every sample weight 1')
    parser.add_argument('--no-noise-robust-loss', action='store_true', help='Use weighted cross-entropy')
    parser.add_argument('--refresh-pseudo-labels', action='store_true', help='Re-infer earlier pseudo-labels')
    parser.add_argument('--early-stop', action='store_true', help='Stop when validation macro-F1 stalls')
    parser.add_argument('--drop-unsound-functions', action='store_true', help='Skip unsound functions')


def build_parser() -> argparse.ArgumentParser:
    """
    :return: The parser of the nodewrap command line.
    """
    parser = argparse.ArgumentParser(prog='nodewrap', description='Self-training web data extraction toolkit')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--verbose', action='store_true', help='Log debug output')
    parser.add_argument('--seed', type=int, help='Seed of every random draw')
    parser.add_argument('--num-parallel', type=int, help='Worker threads for per-page steps')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    ingest_parser = commands.add_parser('ingest', help='Parse and validate a vertical')
    _add_corpus_arguments(ingest_parser)
    ingest_parser.set_defaults(handler=ingest)

    synth_parser = commands.add_parser('synth', help='Write a synthetic vertical')
    synth_parser.add_argument('--preset', choices=['dense', 'sparse'], default='dense')
    synth_parser.add_argument('--vertical', choices=sorted(PRESETS), default='movie')
    synth_parser.add_argument('--sites', type=int, default=5)
    synth_parser.add_argument('--seed-sites', type=int, default=2)
    synth_parser.add_argument('--labeled-pages', type=int, default=9)
    synth_parser.add_argument('--validation-pages', type=int, default=10)
    synth_parser.add_argument('--pages-per-site', type=int, default=200)
    synth_parser.add_argument('--redesign-rate', type=float, default=DEFAULT_REDESIGN_RATE,
                              help='Share of pages after the labeled prefix with a label-free layout')
    synth_parser.add_argument('--out', required=True)
    synth_parser.set_defaults(handler=synth)

    label_parser = commands.add_parser('pseudo-label', help='Run the generative labeler only')
    _add_corpus_arguments(label_parser)
    _add_config_arguments(label_parser)
    label_parser.add_argument('--out', required=True, help='Distant label JSON-lines file to write')
    label_parser.set_defaults(handler=pseudo_label)

    train_parser = commands.add_parser('train', help='Run self-training')
    _add_corpus_arguments(train_parser)
    _add_config_arguments(train_parser)
    train_parser.add_argument('--checkpoint-out', required=True)
    train_parser.add_argument('--report', help='Iteration report JSON-lines file to write')
    train_parser.add_argument('--audit', help='JSON-lines file listing the nodes added per iteration')
    train_parser.add_argument('--dump-weights', help='JSON-lines file of page weights per iteration')
    train_parser.add_argument('--baseline', action='store_true', help='Train on human labels only')
    train_parser.set_defaults(handler=train)

    extract_parser = commands.add_parser('extract', help='Extract attribute values with a checkpoint')
    extract_parser.add_argument('--checkpoint', required=True)
    extract_parser.add_argument('--pages', required=True, help='Directory laid out as <website>/<page>.html')
    extract_parser.add_argument('--out', required=True)
    extract_parser.add_argument('--no-abstain', action='store_true', help='Always emit the top-1 node')
    extract_parser.set_defaults(handler=extract)

    eval_parser = commands.add_parser('eval', help='Score predictions against ground truth')
    eval_parser.add_argument('--pred', required=True)
    eval_parser.add_argument('--truth', required=True, action='append')
    eval_parser.add_argument('--attributes', help='Comma-separated attributes. Defaults to the truth.')
    eval_parser.add_argument('--report')
    eval_parser.set_defaults(handler=evaluate_predictions)

    experiment_parser = commands.add_parser('experiment', help='Compare variants over several seeds')
    _add_corpus_arguments(experiment_parser)
    _add_config_arguments(experiment_parser)
    experiment_parser.add_argument('--mode', choices=[mode.value for mode in SplitMode], default='zero_shot')
    experiment_parser.add_argument('--seed-sites', required=True, help='Comma-separated seed websites')
    experiment_parser.add_argument('--target-sites', help='Comma-separated target websites')
    experiment_parser.add_argument('--held-out-per-seed', type=int, default=100)
    experiment_parser.add_argument('--variants', default=','.join(VARIANTS))
    experiment_parser.add_argument('--seeds', default='0,1,2,3,4')
    experiment_parser.add_argument('--truth', action='append', help='Ground-truth file. May be repeated.')
    experiment_parser.add_argument('--seed-site-counts', help='Comma-separated seed set sizes to sweep')
    experiment_parser.add_argument('--labeled-page-counts', help='Comma-separated training pages to sweep')
    experiment_parser.add_argument('--report')
    experiment_parser.set_defaults(handler=experiment)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of bin/nodewrap.
    :param argv: The arguments. Defaults to sys.argv.
    :return: The exit code.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
    try:
        return args.handler(args)
    except (CorpusValidationError, DeserializationError) as exception:
        print(f"nodewrap {args.command}: {exception}", file=sys.stderr)
        return EXIT_VALIDATION_ERROR
