"""End-to-end evaluation of one or many homes and the run report."""

from __future__ import annotations

import json
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InsufficientDataError
from .evaluation import (
    CvResult,
    best_pair_per_feature,
    cohort_curve,
    feature_error_profile,
    regress_pred_vs_true,
    repeated_cv,
    sub_seeds,
    training_period_curve,
)
from .events import apply_exclusions
from .features import DEFAULT_MIN_DAILY_TRANSITIONS, FEATURES, build_dataset
from .groundtruth import (
    DEFAULT_GAP_S,
    DEFAULT_SPACING_CM,
    daily_mean_targets,
    line_velocities,
    remove_outliers,
)
from .svr import SvrParams, cv_predictions, default_grid, grid_search
from .transitions import (
    DEFAULT_MIN_PAIR_COUNT,
    DEFAULT_REFRACTORY_S,
    extract_transitions,
    filter_room_pairs,
)

REPORT_FORMAT = "pirgait.report"
REPORT_VERSION = 1
DEFAULT_WINDOWS = (10, 20, 30, 45, 60, 80, 100, 120, 140, 160)


@dataclass(frozen=True)
class RunConfig:
    """Every threshold of an evaluation run, echoed verbatim into the report."""

    seed: int = 0
    refractory_s: float = DEFAULT_REFRACTORY_S
    min_pair_count: int = DEFAULT_MIN_PAIR_COUNT
    min_daily_transitions: int = DEFAULT_MIN_DAILY_TRANSITIONS
    outlier_sd: float = 2.0
    spacing_cm: float = DEFAULT_SPACING_CM
    line_gap_s: float = DEFAULT_GAP_S
    features: tuple = FEATURES
    folds: int = 5
    reps: int = 100
    grid: tuple = field(default_factory=lambda: tuple(default_grid()))
    max_pairs: int | None = None  # most frequent pairs evaluated per home
    min_rows: int = 20  # smallest dataset evaluated
    curve_feature: str = "p25"
    windows: tuple = DEFAULT_WINDOWS
    min_test_fraction: float = 0.3  # windows must leave this share of the span for testing
    tol: float = 1e-3

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not self.grid:
            raise ValueError("empty hyperparameter grid")
        for f in self.features:
            if f not in FEATURES:
                raise ValueError(f"unknown feature {f!r}")
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "windows", tuple(int(w) for w in self.windows))
        object.__setattr__(self, "grid", tuple(
            g if isinstance(g, SvrParams) else SvrParams(**g) for g in self.grid
        ))

    def to_dict(self):
        d = asdict(self)
        d["features"] = list(self.features)
        d["windows"] = list(self.windows)
        d["grid"] = [asdict(g) for g in self.grid]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "grid" in d:
            d["grid"] = tuple(SvrParams(**g) for g in d["grid"])
        for key in ("features", "windows"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass(frozen=True)
class HomeData:
    """Stage outputs shared by every feature of one home."""

    home_id: str
    pairs: object  # PairMap
    targets: tuple  # DailyTarget
    n_events: int
    n_line_samples: int
    n_outliers: int


def prepare_home(stream, calendar, config):
    """Exclusions, transitions, pair filter and daily line-speed targets."""
    if calendar is not None:
        stream = apply_exclusions(stream, calendar)
    transitions = extract_transitions(stream, config.refractory_s)
    pairs = filter_room_pairs(transitions, config.min_pair_count)
    samples = line_velocities(stream, config.spacing_cm, config.line_gap_s)
    kept = remove_outliers(samples, config.outlier_sd)
    targets = tuple(daily_mean_targets(kept))
    return HomeData(
        stream.home_id, pairs, targets, len(stream), len(samples), len(samples) - len(kept),
    )


def home_seed(seed, home_id):
    """Seed of one home derived from the run seed and its id, independent of order."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(home_id.encode())])
    return int(ss.generate_state(1)[0])


def evaluate_home(home, config):
    """Cross-validate every (pair, feature) dataset of one prepared home."""
    seed = home_seed(config.seed, home.home_id)
    grid_seed, cv_seed = sub_seeds(seed, 2)
    candidates = home.pairs.by_frequency()
    if config.max_pairs is not None:
        candidates = candidates[: config.max_pairs]
    results = []
    datasets = {}
    for pair in candidates:
        for feature in config.features:
            ds = build_dataset(
                home.pairs, home.targets, feature, pair, config.min_daily_transitions
            )
            if len(ds) < max(config.min_rows, config.folds):
                continue
            if len(config.grid) == 1:
                params = config.grid[0]
            else:
                params = grid_search(ds.x, ds.y, config.grid, config.folds, grid_seed)
            results.append(repeated_cv(ds, params, config.folds, config.reps, cv_seed, config.tol))
            datasets[(pair, feature)] = ds
    if not results:
        raise InsufficientDataError(f"{home.home_id}: no room pair yields {config.min_rows} usable days")
    best = best_pair_per_feature(results)

    summary = {
        "home_id": home.home_id,
        "n_events": home.n_events,
        "n_target_days": len(home.targets),
        "n_line_samples": home.n_line_samples,
        "n_line_outliers": home.n_outliers,
        "pair_counts": [[a, b, n] for (a, b), n in sorted(home.pairs.counts().items())],
        "results": [r.to_dict() for r in results],
        "best": {f: best[f].to_dict() for f in config.features if f in best},
    }
    cf = config.curve_feature
    if cf in best:
        b = best[cf]
        ds = datasets[(tuple(b.pair), cf)]
        pred = cv_predictions(ds.x, ds.y, b.params, config.folds, sub_seeds(cv_seed, 1)[0], config.tol)
        summary["fig8"] = {"true_mean": float(ds.y.mean()), "pred_mean": float(pred.mean())}
        span = (max(ds.dates) - min(ds.dates)).days + 1
        limit = min(span - 3, math.floor(span * (1.0 - config.min_test_fraction)))
        windows = [w for w in config.windows if w <= limit]
        curve = []
        for w in windows:
            try:
                curve += training_period_curve(ds, [w], b.params, seed, tol=config.tol)
            except InsufficientDataError:
                continue
        summary["curve"] = [[w, r2] for w, r2 in curve]
    return summary


def _job(args):
    stream, calendar, config = args
    return evaluate_home(prepare_home(stream, calendar, config), config)


def evaluate_cohort(homes, config, jobs=1):
    """Evaluate ``homes`` (``(stream, calendar)`` pairs) and aggregate the cohort.

    Homes are merged in home-id order, so the report does not depend on
    ``jobs`` or on scheduling.
    """
    homes = sorted(homes, key=lambda h: h[0].home_id)
    tasks = [(s, c, config) for s, c in homes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as ex:
            summaries = list(ex.map(_job, tasks))
    else:
        summaries = [_job(t) for t in tasks]
    return build_report(summaries, config)


def _cv_from_dict(d):
    return CvResult(
        d["feature"], tuple(d["pair"]), d["rmse_mean"], d["rmse_sd"],
        d["repetitions"], d["folds"], d["seed"], n_rows=d["n_rows"],
    )


def build_report(summaries, config):
    best = [_cv_from_dict(d) for s in summaries for d in s["best"].values()]
    profile = feature_error_profile(best, config.features) if best else []
    report = {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "config": config.to_dict(),
        "homes": summaries,
        "profile": [
            {"feature": f, "rmse_mean": m, "rmse_sd": sd,
             "n_homes": sum(1 for r in best if r.feature == f)}
            for f, m, sd in profile
        ],
    }
    if profile:
        report["profile_minimum"] = min(profile, key=lambda t: t[1])[0]
    points = [(s["fig8"]["true_mean"], s["fig8"]["pred_mean"]) for s in summaries if "fig8" in s]
    if len(points) >= 3 and len({p[0] for p in points}) > 1:
        report["regression"] = regress_pred_vs_true(points).to_dict()
    curves = [s.get("curve", []) for s in summaries]
    report["curve"] = [
        {"days": w, "r_squared": r2, "n_homes": n} for w, r2, n in cohort_curve(curves)
    ]
    return report


def _fmt(v):
    return repr(float(v))


def report_files(report):
    """File name -> text for the JSON report and the figure-analogue CSVs."""
    files = {"report.json": json.dumps(report, indent=2, sort_keys=True) + "\n"}
    rows = ["# units: rmse_mean=cm/s, rmse_sd=cm/s", "feature,rmse_mean,rmse_sd,n_homes"]
    rows += [f"{p['feature']},{_fmt(p['rmse_mean'])},{_fmt(p['rmse_sd'])},{p['n_homes']}"
             for p in report["profile"]]
    files["fig7_profile.csv"] = "\n".join(rows) + "\n"
    rows = ["# units: true_mean=cm/s, pred_mean=cm/s", "home_id,true_mean,pred_mean"]
    rows += [f"{s['home_id']},{_fmt(s['fig8']['true_mean'])},{_fmt(s['fig8']['pred_mean'])}"
             for s in report["homes"] if "fig8" in s]
    files["fig8_points.csv"] = "\n".join(rows) + "\n"
    rows = ["# units: days=d, r_squared=1", "days,r_squared,n_homes"]
    rows += [f"{c['days']},{_fmt(c['r_squared'])},{c['n_homes']}" for c in report["curve"]]
    files["fig9_curve.csv"] = "\n".join(rows) + "\n"
    return files


def write_report(report, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, text in report_files(report).items():
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)
    return written


def profile_summary(report):
    """Plain-text table of the feature profile and regression."""
    lines = ["feature  rmse_mean  rmse_sd  homes"]
    for p in report["profile"]:
        mark = " *" if p["feature"] == report.get("profile_minimum") else ""
        lines.append(f"{p['feature']:<8} {p['rmse_mean']:9.3f} {p['rmse_sd']:8.3f} {p['n_homes']:6d}{mark}")
    reg = report.get("regression")
    if reg:
        lines.append(
            f"predicted vs true: slope {reg['slope']:.3f}, intercept {reg['intercept']:.2f} cm/s, "
            f"r^2 {reg['r_squared']:.3f} (n={reg['n']})"
        )
    if report["curve"]:
        lines.append("training days -> r^2: " + ", ".join(
            f"{c['days']}:{c['r_squared']:.3f}" for c in report["curve"]
        ))
    return "\n".join(lines)


