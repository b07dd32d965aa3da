import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pydantic import ValidationError

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.data.dataset import downsample_balance, stacking_split, stratified_split
from src.data.io import load_predictions, load_reviews, write_examples, write_predictions
from src.data.synthetic import generate_synthetic_predictions, generate_synthetic_reviews
from src.models.ensemble.labels import PredictionRecord
from src.models.ensemble.meta_learner import train_meta_learner
from src.models.ensemble.stacking import (PredictionSet, StackMode, build_features,
                                          stack_predict)
from src.models.evaluation.metrics import evaluate
from src.simulation.replication import run_replications
from src.simulation.simulation_model import run_experiment
from src.utils.config import Config, ConfigError
from src.utils.errors import DataFormatError, DataIntegrityError, InvalidArgumentError
from src.utils.export import (RunManifest, load_manifest, write_json, write_manifest,
                              write_trajectory_csv)
from src.utils.logging_config import configure_logging, get_logger

logger = get_logger()

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

USAGE_ERRORS = (ConfigError, InvalidArgumentError, DataIntegrityError, DataFormatError,
                ValidationError, FileNotFoundError)

MAX_LISTED_IDS = 10

# parsed arguments that are not recorded as manifest options
NON_OPTIONS = {"handler", "command_name", "group", "action", "config", "seed", "log_level", "log_file"}


def _load_config(args: argparse.Namespace) -> Config:
    config = Config(args.config)
    if args.seed is not None:
        config.apply_seed(args.seed)
    return config


def _manifest(args: argparse.Namespace, seed: int, output_dir: str) -> RunManifest:
    options = {key: value for key, value in vars(args).items() if key not in NON_OPTIONS}
    return RunManifest(command=args.command_name, config_path=args.config, seed=seed,
                       output_dir=output_dir, options=options)


def manifest_argv(manifest: RunManifest) -> List[str]:
    """
    Rebuild the command line that produced a manifest's outputs.

    Args:
        manifest: Manifest written by a previous run

    Returns:
        Arguments for main(), with the recorded seed passed explicitly
    """
    argv = manifest.command.split()
    if manifest.config_path is not None:
        argv += ["--config", manifest.config_path]
    argv += ["--seed", str(manifest.seed)]
    for name, value in sorted(manifest.options.items()):
        if value is None:
            continue
        flag = "--" + name.replace("_", "-")
        argv += [flag, *map(str, value)] if isinstance(value, list) else [flag, str(value)]
    return argv


def cmd_bandit_run(args: argparse.Namespace) -> int:
    """Run one bandit experiment and write its trajectory and summary."""
    config = _load_config(args)
    experiment = config.config.experiment
    result = run_experiment(config.config.arms, experiment)

    out = Path(args.out)
    write_trajectory_csv(result, out / "trajectory.csv")
    write_json(result.summary(), out / "summary.json")
    write_manifest(_manifest(args, experiment.seed, args.out), out)

    state = "terminated" if result.terminated_early else "stopped at max_iterations"
    logger.success(f"Winner {result.winner_id}, {state} after {result.iterations_run} iterations, "
                   f"traffic {result.traffic}")
    return EXIT_OK


def cmd_bandit_replicate(args: argparse.Namespace) -> int:
    """Run seeded replications and write their aggregate."""
    config = _load_config(args)
    experiment = config.config.experiment
    summary = run_replications(config.config.arms, experiment, args.runs,
                               base_seed=experiment.seed, workers=args.workers)

    out = Path(args.out)
    write_json(summary.to_dict(), out / "replications.json")
    write_manifest(_manifest(args, experiment.seed, args.out), out)
    logger.success(f"{summary.n_runs} runs, win counts {summary.win_counts}")
    return EXIT_OK


def cmd_data_prep(args: argparse.Namespace) -> int:
    """Balance and split a review dataset."""
    config = _load_config(args)
    data = config.config.data
    test_fraction = args.test_fraction if args.test_fraction is not None else data.test_fraction

    examples = load_reviews(args.input)
    balanced = downsample_balance(examples, data.seed)
    split = stratified_split(balanced, test_fraction, data.seed)

    out = Path(args.out)
    write_examples(split.train, out / "train.csv")
    write_examples(split.test, out / "test.csv")
    write_manifest(_manifest(args, data.seed, args.out), out)
    logger.success(f"Prepared {len(split.train)} train and {len(split.test)} test examples in {out}")
    return EXIT_OK


def _single_model_id(records: List[PredictionRecord], path: str) -> str:
    model_ids = sorted({record.model_id for record in records})
    if len(model_ids) != 1:
        raise DataFormatError(f"{path} must hold predictions of exactly one model, found {model_ids}")
    return model_ids[0]


def _check_id_sets(truth_ids: Sequence[str], per_file: Dict[str, List[PredictionRecord]]) -> None:
    expected = set(truth_ids)
    offending = set()
    for records in per_file.values():
        offending |= expected.symmetric_difference(record.example_id for record in records)
    if offending:
        listed = sorted(offending)[:MAX_LISTED_IDS]
        raise DataIntegrityError(
            f"prediction files do not cover the same example ids; {len(offending)} offending: "
            f"{', '.join(listed)}", listed,
        )


def cmd_ensemble_eval(args: argparse.Namespace) -> int:
    """Evaluate Stack1 or Stack2 and every base model on the test partition."""
    config = _load_config(args)
    ensemble = config.config.ensemble
    data = config.config.data
    mode = StackMode.parse(args.mode)
    test_fraction = args.test_fraction if args.test_fraction is not None else data.test_fraction

    examples = load_reviews(args.truth)
    per_file: Dict[str, List[PredictionRecord]] = {}
    for position, path in enumerate(args.predictions, start=1):
        records = load_predictions(path)
        model_id = _single_model_id(records, path)
        if model_id in per_file:
            # same model in several files, e.g. identical copies; key the later ones by position
            keyed = f"{model_id}#{position}"
            logger.warning(f"model {model_id} appears in more than one prediction file, "
                           f"using {keyed} for {path}")
            records = [replace(record, model_id=keyed) for record in records]
            model_id = keyed
        per_file[model_id] = records
    _check_id_sets([e.example_id for e in examples], per_file)

    # configured order when it names the same models, else the order of the prediction files
    file_order = list(per_file)
    model_order = ensemble.model_order if set(ensemble.model_order) == set(file_order) else file_order
    predictions = PredictionSet(record for records in per_file.values() for record in records)

    split = stratified_split(examples, test_fraction, data.seed)
    test_ids = [e.example_id for e in split.test]
    truth = [e.label for e in split.test]

    report = {
        "mode": mode.value,
        "model_order": model_order,
        "test_size": len(split.test),
        "base_models": {
            model_id: evaluate(truth, [predictions.get(i, model_id).label for i in test_ids]).to_dict()
            for model_id in model_order
        },
    }

    meta_model = None
    if mode is StackMode.STACK2:
        _, meta_partition = stacking_split(split.train, data.stacking_fraction, data.seed)
        features = build_features(predictions, [e.example_id for e in meta_partition], model_order,
                                  ensemble.feature_encoding)
        meta_model = train_meta_learner(features, [e.label for e in meta_partition],
                                        ensemble.meta_learner)
        report["meta_learner"] = meta_model.to_dict()
        report["meta_training_size"] = len(meta_partition)

    predicted = stack_predict(mode, predictions, test_ids, model_order, model=meta_model,
                              tiebreaker_index=ensemble.tiebreaker_index,
                              encoding=ensemble.feature_encoding)
    result = evaluate(truth, predicted)
    report["ensemble"] = result.to_dict()

    out_file = Path(args.out)
    write_json(report, out_file)
    write_manifest(_manifest(args, data.seed, str(out_file.parent)), out_file.parent)
    logger.success(f"{mode.name}: accuracy {result.accuracy:.4f}, f1 {result.f1:.4f} "
                   f"on {len(test_ids)} test examples")
    return EXIT_OK


def cmd_synth_gen(args: argparse.Namespace) -> int:
    """Generate a synthetic review set and one prediction file per synthetic model."""
    config = _load_config(args)
    synthetic = config.config.synthetic

    examples = generate_synthetic_reviews(synthetic.class_counts, synthetic.seed)
    records = generate_synthetic_predictions(examples, synthetic.models, synthetic.seed,
                                             emit_probabilities=synthetic.emit_probabilities)

    out = Path(args.out)
    write_examples(examples, out / "reviews.csv")
    for spec in synthetic.models:
        write_predictions([r for r in records if r.model_id == spec.id],
                          out / f"predictions_{spec.id}.csv")
    write_manifest(_manifest(args, synthetic.seed, args.out), out)
    logger.success(f"Generated {len(examples)} reviews and {len(synthetic.models)} prediction files in {out}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    """Re-run the command recorded in a manifest."""
    manifest = load_manifest(args.manifest)
    argv = manifest_argv(manifest)
    logger.info(f"Replaying: {' '.join(argv)}")
    replayed = build_parser().parse_args(argv)
    return replayed.handler(replayed)


def _add_common(
parser: argparse.ArgumentParser, out_default: str) -> None:
    parser.add_argument('--config', '-c', type=str, default=None,
                        help='Path to configuration file (YAML or TOML)')
    parser.add_argument('--seed', type=int, default=None,
                        help='Master seed, overrides config and NUDGEBANDIT_SEED')
    parser.add_argument('--out', '-o', type=str, default=out_default,
                        help='Output location')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='nudgebandit',
                                     description='Bandit experiments and stacked sentiment ensembles')
    parser.add_argument('--log-level', type=str.upper, default='INFO',
                        choices=['TRACE', 'DEBUG', 'INFO', 'SUCCESS', 'WARNING', 'ERROR'],
                        help='Logging level')
    parser.add_argument('--log-file', type=str, default=None,
                        help='Also write DEBUG logs to this file under ~/.nudge_bandit/logs')
    groups = parser.add_subparsers(dest='group', required=True)

    bandit = groups.add_parser('bandit', help='Thompson-sampling bandit experiments')
    bandit_cmds = bandit.add_subparsers(dest='action', required=True)
    run = bandit_cmds.add_parser('run', help='Run one experiment')
    _add_common(run, 'results/bandit_run')
    run.set_defaults(handler=cmd_bandit_run, command_name='bandit run')

    replicate = bandit_cmds.add_parser('replicate', help='Run seeded replications')
    _add_common(replicate, 'results/bandit_replicate')
    replicate.add_argument('--runs', '-n', type=int, required=True, help='Number of runs')
    replicate.add_argument('--workers', type=int, default=1, help='Worker processes')
    replicate.set_defaults(handler=cmd_bandit_replicate, command_name='bandit replicate')

    data = groups.add_parser('data', help='Dataset preparation')
    data_cmds = data.add_subparsers(dest='action', required=True)
    prep = data_cmds.add_parser('prep', help='Down-sample to balance and split train/test')
    _add_common(prep, 'results/data')
    prep.add_argument('--input', '-i', type=str, required=True, help='Review CSV')
    prep.add_argument('--test-fraction', type=float, default=None, help='Test share per class')
    prep.set_defaults(handler=cmd_data_prep, command_name='data prep')

    ensemble = groups.add_parser('ensemble', help='Stacked ensembles')
    ensemble_cmds = ensemble.add_subparsers(dest='action', required=True)
    evaluate_cmd = ensemble_cmds.add_parser('eval', help='Evaluate Stack1 or Stack2')
    _add_common(evaluate_cmd, 'results/ensemble/report.json')
    evaluate_cmd.add_argument('--truth', type=str, required=True, help='Labelled review CSV')
    evaluate_cmd.add_argument('--predictions', type=str, nargs=3, required=True,
                              help='Three prediction CSVs, one per base model')
    evaluate_cmd.add_argument('--mode', type=str, choices=['stack1', 'stack2'], default='stack1')
    evaluate_cmd.add_argument('--test-fraction', type=float, default=None, help='Test share per class')
    evaluate_cmd.set_defaults(handler=cmd_ensemble_eval, command_name='ensemble eval')

    synth = groups.add_parser('synth', help='Synthetic data')
    synth_cmds = synth.add_subparsers(dest='action', required=True)
    gen = synth_cmds.add_parser('gen', help='Generate reviews and base-model predictions')
    _add_common(gen, 'results/synthetic')
    gen.set_defaults(handler=cmd_synth_gen, command_name='synth gen')

    replay = groups.add_parser('replay', help='Re-run the command recorded in a manifest')
    replay.add_argument('manifest', type=str, help='manifest.json written by a previous run')
    replay.set_defaults(handler=cmd_replay)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse command line arguments and run the selected command."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level, args.log_file)

    try:
        return args.handler(args)
    except USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logger.exception(f"Command failed: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
