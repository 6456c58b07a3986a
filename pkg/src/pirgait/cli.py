"""Command-line front end: one subcommand per pipeline stage."""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from itertools import product
from pathlib import Path

from . import __version__
from .errors import ConvergenceError, InsufficientDataError, ParseError, PirgaitError
from .events import apply_exclusions, parse_event_log, parse_exclusions, serialize_event_log, serialize_exclusions
from .features import FEATURES, build_dataset, parse_dataset
from .groundtruth import (
    daily_mean_targets,
    line_velocities,
    qq_normality,
    qq_to_csv,
    remove_outliers,
    targets_to_csv,
)
from .pipeline import RunConfig, evaluate_cohort, profile_summary, report_files, write_report
from .simulator import SimScenario, cohort, simulate
from .svr import SvrParams, default_grid, grid_search, train_svr
from .transitions import extract_transitions, filter_room_pairs, transitions_to_csv

EVENTS_FILE = "events.csv"
EXCLUSIONS_FILE = "exclusions.csv"


def _read(path):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _write(out_dir, name, text):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _load_home(events_path, exclusions_path=None):
    """Parse an event log and its calendar; a sibling exclusions.csv is picked up."""
    try:
        stream = parse_event_log(_read(events_path))
    except ParseError as exc:
        raise ParseError(f"{events_path}: {exc}") from None
    if exclusions_path is None:
        sibling = Path(events_path).with_name(EXCLUSIONS_FILE)
        exclusions_path = sibling if sibling.is_file() else None
    calendar = None
    if exclusions_path is not None:
        try:
            calendar = parse_exclusions(_read(exclusions_path))
        except ParseError as exc:
            raise ParseError(f"{exclusions_path}: {exc}") from None
    return stream, calendar


def _prepared_stream(args):
    stream, calendar = _load_home(args.input, args.exclusions)
    return apply_exclusions(stream, calendar) if calendar is not None else stream


def load_grid(path):
    """A grid file is a JSON list of parameter objects, or an object of value lists."""
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc.msg}", exc.lineno) from None
    try:
        if isinstance(doc, dict):
            kernel = doc.get("kernel", "rbf")
            return [
                SvrParams(C=c, gamma=g, epsilon=e, kernel=kernel)
                for c, g, e in product(doc["C"], doc["gamma"], doc["epsilon"])
            ]
        return [SvrParams(**g) for g in doc]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad grid: {exc}") from None


def _parse_pair(text):
    parts = text.split(":")
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"pair must look like FROM:TO, got {text!r}")
    return tuple(parts)


# ---- subcommands -------------------------------------------------------------

def cmd_simulate(args):
    if args.config:
        scenarios = [SimScenario.loads(_read(args.config))]
    else:
        scenarios = cohort(args.homes, args.seed)
    for sc in scenarios:
        stream, truth = simulate(sc, args.days)
        home_dir = os.path.join(args.output_dir, sc.home_id)
        _write(home_dir, EVENTS_FILE, serialize_event_log(stream))
        _write(home_dir, EXCLUSIONS_FILE, serialize_exclusions(truth.calendar))
        _write(home_dir, "truth.csv", truth.to_csv())
        _write(home_dir, "scenario.json", sc.dumps() + "\n")
        print(f"{sc.home_id}: {len(stream)} events over {args.days} days, "
              f"{len(truth.calendar)} excluded days -> {home_dir}")
    return 0


def cmd_ingest(args):
    stream, calendar = _load_home(args.input, args.exclusions)
    _write(args.output_dir, EVENTS_FILE, serialize_event_log(stream))
    if calendar is not None:
        _write(args.output_dir, EXCLUSIONS_FILE, serialize_exclusions(calendar))
    days = len(stream.dates)
    print(f"{stream.home_id}: {len(stream)} valid events on {days} days; "
          f"{len(calendar) if calendar else 0} excluded days")
    return 0


def cmd_extract(args):
    stream = _prepared_stream(args)
    transitions = extract_transitions(stream, args.refractory_s)
    pairs = filter_room_pairs(transitions, args.min_pair_count)
    _write(args.output_dir, "transitions.csv", transitions_to_csv(transitions))
    rows = ["from_room,to_room,count"]
    rows += [f"{a},{b},{n}" for (a, b), n in
             ((p, len(pairs[p])) for p in pairs.by_frequency())]
    _write(args.output_dir, "pairs.csv", "\n".join(rows) + "\n")
    if not len(pairs):
        raise InsufficientDataError(f"no room pair has more than {args.min_pair_count} transitions")
    print(f"{len(transitions)} transitions, {len(pairs)} pairs above {args.min_pair_count}")
    return 0


def cmd_groundtruth(args):
    stream = _prepared_stream(args)
    samples = line_velocities(stream)
    if len(samples) < 2:
        raise InsufficientDataError("fewer than 2 usable line walks")
    kept = remove_outliers(samples, args.outlier_sd)
    targets = daily_mean_targets(kept)
    _write(args.output_dir, "targets.csv", targets_to_csv(targets))
    msg = f"{len(samples)} line walks, {len(samples) - len(kept)} outliers, {len(targets)} target days"
    if len(kept) >= 10:
        _write(args.output_dir, "qq.csv", qq_to_csv([s.velocity for s in kept]))
        msg += f", Q-Q r^2 {qq_normality([s.velocity for s in kept]):.4f}"
    print(msg)
    return 0


def cmd_features(args):
    stream = _prepared_stream(args)
    pairs = filter_room_pairs(extract_transitions(stream, args.refractory_s), args.min_pair_count)
    if not len(pairs):
        raise InsufficientDataError(f"no room pair has more than {args.min_pair_count} transitions")
    targets = daily_mean_targets(remove_outliers(line_velocities(stream)))
    pair = args.pair or pairs.by_frequency()[0]
    if pair not in pairs:
        raise InsufficientDataError(f"pair {pair[0]}:{pair[1]} has too few transitions")
    ds = build_dataset(pairs, targets, args.feature, pair, args.min_daily_transitions)
    path = _write(args.output_dir, "dataset.csv", ds.to_csv())
    if not len(ds):
        raise InsufficientDataError(f"no date has both {pair[0]}:{pair[1]} transitions and a velocity target")
    print(f"{len(ds)} rows for {pair[0]}->{pair[1]} ({args.feature}) -> {path}")
    return 0


def cmd_train(args):
    try:
        ds = parse_dataset(_read(args.input))
    except ParseError as exc:
        raise ParseError(f"{args.input}: {exc}") from None
    if len(ds) < args.folds:
        raise InsufficientDataError(f"{len(ds)} rows is fewer than {args.folds} folds")
    grid = load_grid(args.grid) if args.grid else default_grid()
    params = grid_search(ds.x, ds.y, grid, args.folds, args.seed)
    model = train_svr(ds.x, ds.y, params)
    _write(args.output_dir, "model.json", model.dumps() + "\n")
    print(f"C={params.C} gamma={params.gamma} epsilon={params.epsilon}: "
          f"{len(model.dual_coef)} support vectors, {model.n_iter} iterations")
    if not model.converged:
        raise ConvergenceError(f"SMO stopped at max_iter with KKT gap {model.kkt_gap:.3g}")
    return 0


def _home_inputs(path):
    p = Path(path)
    if p.is_file():
        return [_load_home(p)]
    if not p.is_dir():
        raise FileNotFoundError(f"no such file or directory: {path}")
    logs = sorted(p.glob(f"*/{EVENTS_FILE}")) or sorted(p.glob(EVENTS_FILE))
    if not logs:
        raise FileNotFoundError(f"no {EVENTS_FILE} under {path}")
    return [_load_home(f) for f in logs]


def run_config(args):
    """Defaults, then a config file (or a report's echoed config), then explicit flags."""
    base = {}
    if args.config:
        try:
            doc = json.loads(_read(args.config))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.config}: invalid JSON: {exc.msg}", exc.lineno) from None
        base = dict(doc.get("config", doc))
    flags = {
        "seed": args.seed, "refractory_s": args.refractory_s, "min_pair_count": args.min_pair_count,
        "folds": args.folds, "reps": args.reps, "max_pairs": args.max_pairs,
    }
    base.update({k: v for k, v in flags.items() if v is not None})
    if args.feature:
        base["features"] = list(args.feature)
    if args.grid:
        base["grid"] = [vars_params(g) for g in load_grid(args.grid)]
    try:
        return RunConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad run config: {exc}") from None


def vars_params(p):
    return {"C": p.C, "gamma": p.gamma, "epsilon": p.epsilon, "kernel": p.kernel}


def cmd_evaluate(args):
    config = run_config(args)
    homes = _home_inputs(args.input)
    report = evaluate_cohort(homes, config, jobs=args.jobs)
    write_report(report, args.output_dir)
    print(profile_summary(report))
    return 0


def cmd_report(args):
    try:
        report = json.loads(_read(args.input))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.input}: invalid JSON: {exc.msg}", exc.lineno) from None
    if report.get("format") != "pirgait.report":
        raise ParseError(f"{args.input}: not a pirgait report")
    if args.output_dir:
        for name, text in report_files(report).items():
            if name != "report.json":
                _write(args.output_dir, name, text)
    print(profile_summary(report))
    return 0


# ---- parser ----------------------------------------------------------------------

def _add_input(p, help_text):
    p.add_argument("--input", required=True, help=help_text)


def _add_home_filters(p):
    p.add_argument("--exclusions", help="exclusion calendar CSV (default: sibling exclusions.csv)")
    p.add_argument("--refractory-s", type=float, default=6.0, help="per-sensor debounce in seconds")
    p.add_argument("--min-pair-count", type=int, default=50,
                   help="keep room pairs with more than this many transitions")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pirgait", description="Gait velocity from in-home motion-sensor transition times."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    p = sub.add_parser("simulate", help="generate synthetic homes")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--homes", type=int, default=1, help="cohort size")
    p.add_argument("--days", type=int, default=200)
    p.add_argument("--config", help="scenario JSON for a single home (overrides --homes)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", help="validate and normalise an event log")
    _add_input(p, "event-log CSV")
    p.add_argument("--exclusions", help="exclusion calendar CSV")
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("extract", help="room transitions and frequent pairs")
    _add_input(p, "event-log CSV")
    _add_home_filters(p)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("groundtruth", help="daily line-walk velocity targets")
    _add_input(p, "event-log CSV")
    p.add_argument("--exclusions", help="exclusion calendar CSV")
    p.add_argument("--outlier-sd", type=float, default=2.0)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_groundtruth)

    p = sub.add_parser("features", help="per-day feature dataset for one pair")
    _add_input(p, "event-log CSV")
    _add_home_filters(p)
    p.add_argument("--feature", choices=FEATURES, default="p25")
    p.add_argument("--pair", type=_parse_pair, help="FROM:TO (default: most frequent pair)")
    p.add_argument("--min-daily-transitions", type=int, default=3)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="grid-search and fit an SVR on a dataset CSV")
    _add_input(p, "dataset CSV from 'features'")
    p.add_argument("--grid", help="hyperparameter grid JSON")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="cross-validated evaluation of one home or a cohort")
    _add_input(p, "event-log CSV, or a directory of <home>/events.csv")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--config", help="run config JSON, or a report whose config to reuse")
    p.add_argument("--seed", type=int)
    p.add_argument("--refractory-s", type=float)
    p.add_argument("--min-pair-count", type=int)
    p.add_argument("--feature", choices=FEATURES, action="append",
                   help="restrict to this feature (repeatable; default: all)")
    p.add_argument("--folds", type=int)
    p.add_argument("--reps", type=int, help="cross-validation repetitions (default 100)")
    p.add_argument("--max-pairs", type=int, help="evaluate only the most frequent pairs")
    p.add_argument("--grid", help="hyperparameter grid JSON")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="summarise a report and re-emit its figure CSVs")
    _add_input(p, "report.json")
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    stage = args.command
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("default")
            warnings.simplefilter("ignore", RuntimeWarning)
            try:
                return args.func(args)
            finally:
                for w in caught:
                    print(f"pirgait {stage}: warning: {w.message}", file=sys.stderr)
    except FileNotFoundError as exc:
        print(f"pirgait {stage}: error: {exc}", file=sys.stderr)
        return 2
    except PirgaitError as exc:
        print(f"pirgait {stage}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"pirgait {stage}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
