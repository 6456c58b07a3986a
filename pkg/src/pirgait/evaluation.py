"""Cross-validation protocol, best-pair selection, regression of predicted on true
velocity, and the training-period curve."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from datetime import timedelta

import numpy as np
from scipy import stats

from ._stats import pearson_r2
from .errors import InsufficientDataError
from .features import FEATURES
from .svr import SvrParams, cv_predictions, default_grid, grid_search, predict, rmse, train_svr


def _xy(data):
    if hasattr(data, "rows"):
        return data.x, data.y
    x, y = data
    return np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)


@dataclass(frozen=True)
class CvResult:
    feature: str
    pair: tuple
    rmse_mean: float  # cm/s
    rmse_sd: float  # cm/s
    repetitions: int
    folds: int
    seed: int
    params: SvrParams | None = None
    n_rows: int = 0

    def __post_init__(self):
        if not (self.rmse_mean >= 0 and self.rmse_sd >= 0):
            raise ValueError("RMSE statistics must be non-negative")

    def to_dict(self):
        out = {
            "feature": self.feature,
            "pair": list(self.pair) if self.pair is not None else None,
            "rmse_mean": self.rmse_mean,
            "rmse_sd": self.rmse_sd,
            "repetitions": self.repetitions,
            "folds": self.folds,
            "seed": self.seed,
            "n_rows": self.n_rows,
        }
        if self.params is not None:
            out["params"] = {
                "C": self.params.C, "gamma": self.params.gamma,
                "epsilon": self.params.epsilon, "kernel": self.params.kernel,
            }
        return out


@dataclass(frozen=True)
class RegressionSummary:
    slope: float
    intercept: float  # cm/s
    r_squared: float
    ci95_slope: tuple
    ci95_intercept: tuple
    n: int = 0

    def to_dict(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "ci95_slope": list(self.ci95_slope),
            "ci95_intercept": list(self.ci95_intercept),
            "n": self.n,
        }


def sub_seeds(seed, n):
    """``n`` independent integer seeds fanned out from one top-level seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def kfold_cv(data, params, k=5, seed=0, tol=1e-3):
    """Pooled out-of-fold RMSE of one seeded k-fold split."""
    x, y = _xy(data)
    if len(x) < k:
        raise InsufficientDataError(f"dataset of {len(x)} rows is smaller than {k} folds")
    return rmse(y, cv_predictions(x, y, params, k, seed, tol=tol))


def repeated_cv(data, params, k=5, reps=100, seed=0, tol=1e-3):
    """Mean and sd (ddof=0) of ``reps`` k-fold RMSEs on derived sub-seeds."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    x, y = _xy(data)
    scores = np.array([kfold_cv((x, y), params, k, s, tol) for s in sub_seeds(seed, reps)])
    feature = getattr(data, "feature", None)
    pair = getattr(data, "pair", None)
    return CvResult(
        feature, pair, float(scores.mean()), float(scores.std()), reps, k, seed,
        params=params, n_rows=len(x),
    )


def best_pair_per_feature(results):
    """Per feature, the result with the lowest mean RMSE; ties go to the smaller pair name."""
    results = list(results)
    if not results:
        raise ValueError("no CV results")
    best = {}
    for r in results:
        cur = best.get(r.feature)
        if cur is None or (r.rmse_mean, tuple(r.pair)) < (cur.rmse_mean, tuple(cur.pair)):
            best[r.feature] = r
    return best


def feature_error_profile(results, features=FEATURES):
    """``(feature, rmse_mean, rmse_sd)`` in canonical feature order.

    Several results for one feature (one per participant, say) are averaged
    unweighted; the sd is the root mean of their variances.
    """
    grouped = {}
    for r in results:
        grouped.setdefault(r.feature, []).append(r)
    out = []
    for f in features:
        rs = grouped.get(f)
        if not rs:
            warnings.warn(f"feature {f} missing from results; omitted from profile", stacklevel=2)
            continue
        mean = math.fsum(r.rmse_mean for r in rs) / len(rs)
        sd = math.sqrt(math.fsum(r.rmse_sd ** 2 for r in rs) / len(rs))
        out.append((f, mean, sd))
    return out


def regress_pred_vs_true(points):
    """OLS of predicted on true velocity with t-based 95% intervals (n - 2 df)."""
    pts = np.asarray(list(points), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise InsufficientDataError("regression needs at least 3 points")
    t, p = pts[:, 0], pts[:, 1]
    n = t.shape[0]
    dt = t - t.mean()
    stt = float(dt @ dt)
    if stt == 0.0:
        raise ValueError("all true values are equal; regression is degenerate")
    slope = float(dt @ (p - p.mean())) / stt
    intercept = float(p.mean() - slope * t.mean())
    resid = p - (intercept + slope * t)
    dp = p - p.mean()
    spp = float(dp @ dp)
    r2 = 1.0 if spp == 0.0 else min(1.0, max(0.0, (slope * slope * stt) / spp))
    if n > 2:
        s2 = float(resid @ resid) / (n - 2)
        se_slope = math.sqrt(s2 / stt)
        se_int = math.sqrt(s2 * (1.0 / n + t.mean() ** 2 / stt))
        q = float(stats.t.ppf(0.975, n - 2))
    else:
        se_slope = se_int = q = 0.0
    return RegressionSummary(
        slope, intercept, r2,
        (slope - q * se_slope, slope + q * se_slope),
        (intercept - q * se_int, intercept + q * se_int),
        n,
    )


def _window_split(dates, w):
    first = min(dates)
    cut = first + timedelta(days=w)
    train = np.array([d < cut for d in dates])
    return train, ~train


def training_period_curve(data, window_lengths, params=None, seed=0, grid=None, folds=5, tol=1e-3):
    """``(w, r^2)`` for chronological prefix windows of ``w`` calendar days.

    Train on rows dated within the first ``w`` days, predict every later row
    and report the squared Pearson correlation of predicted against true.
    When ``params`` is None they are chosen by ``grid_search`` on each
    training prefix with ``seed``.
    """
    x, y = data.x, data.y
    dates = data.dates
    if not dates:
        raise InsufficientDataError("empty dataset")
    span = (max(dates) - min(dates)).days + 1
    out = []
    for w in sorted(set(int(v) for v in window_lengths)):
        if w < 1 or w > span:
            raise ValueError(f"window of {w} days outside dataset span of {span} days")
        train, test = _window_split(dates, w)
        if test.sum() < 3:
            raise InsufficientDataError(f"window of {w} days leaves {int(test.sum())} test days (< 3)")
        if train.sum() < 2:
            raise InsufficientDataError(f"window of {w} days holds {int(train.sum())} training days")
        p = params
        if p is None:
            p = grid_search(x[train], y[train], grid or default_grid(), folds=min(folds, int(train.sum())), seed=seed)
        model = train_svr(x[train], y[train], p, tol=tol)
        pred = predict(model, x[test])
        if np.ptp(pred) == 0.0 or np.ptp(y[test]) == 0.0:
            r2 = 0.0
        else:
            r2 = pearson_r2(pred, y[test])
        out.append((w, float(r2)))
    return out


def cohort_curve(curves):
    """Average per-home curves at each window length present in any of them."""
    by_w = {}
    for curve in curves:
        for w, r2 in curve:
            by_w.setdefault(w, []).append(r2)
    return [(w, math.fsum(v) / len(v), len(v)) for w, v in sorted(by_w.items())]


def spearman(a, b):
    """Spearman rank correlation with average ranks for ties."""
    return float(stats.spearmanr(a, b).statistic)
