"""Per-day transition-time statistics joined with daily velocity targets."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from datetime import date

import numpy as np

from .errors import ParseError

FEATURES = ("p10", "p15", "p20", "p25", "mean", "median")
DEFAULT_MIN_DAILY_TRANSITIONS = 3
DATASET_HEADER = "date,from_room,to_room,statistic,x_seconds,y_cm_s,n_transitions"


def percentile(values, p):
    """Linear-interpolation percentile: rank h = (n-1)p/100 on the sorted sample."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = v.shape[0]
    if n == 0:
        raise ValueError("percentile of an empty sample")
    if not 0 <= p <= 100:
        raise ValueError(f"percent must be in [0, 100], got {p}")
    h = (n - 1) * p / 100.0
    lo = math.floor(h)
    if lo + 1 >= n:
        return float(v[lo])
    return float(v[lo] + (h - lo) * (v[lo + 1] - v[lo]))


def statistic(values, feature):
    """Evaluate one of FEATURES on a sample of durations."""
    if feature == "mean":
        if len(values) == 0:
            raise ValueError("mean of an empty sample")
        return math.fsum(values) / len(values)
    if feature == "median":
        return percentile(values, 50)
    if feature in ("p10", "p15", "p20", "p25"):
        return percentile(values, int(feature[1:]))
    raise ValueError(f"unknown feature {feature!r}; expected one of {FEATURES}")


@dataclass(frozen=True, slots=True)
class DailyFeatureRow:
    date: object
    pair: tuple
    x: float  # seconds
    y: float  # cm/s
    n_transitions: int


@dataclass(frozen=True)
class Dataset:
    pair: tuple
    feature: str
    rows: tuple = ()
    empty_warning: bool = False

    def __len__(self):
        return len(self.rows)

    @property
    def x(self):
        return np.array([r.x for r in self.rows], dtype=np.float64)

    @property
    def y(self):
        return np.array([r.y for r in self.rows], dtype=np.float64)

    @property
    def dates(self):
        return [r.date for r in self.rows]

    def to_csv(self):
        out = [
            "# units: x_seconds=s, y_cm_s=cm/s",
            DATASET_HEADER,
        ]
        fr, to = self.pair
        for r in self.rows:
            out.append(
                f"{r.date.isoformat()},{fr},{to},{self.feature},{r.x!r},{r.y!r},{r.n_transitions}"
            )
        return "\n".join(out) + "\n"


def build_dataset(pairs, targets, feature, pair, min_daily_transitions=DEFAULT_MIN_DAILY_TRANSITIONS):
    """One row per date with enough ``pair`` transitions and a daily target."""
    if feature not in FEATURES:
        raise ValueError(f"unknown feature {feature!r}; expected one of {FEATURES}")
    if pair not in pairs:
        raise KeyError(f"room pair {pair} not in PairMap")
    by_day = {}
    for t in pairs[pair]:
        by_day.setdefault(t.date, []).append(t.duration)
    target_by_day = {t.date: t for t in targets}
    rows = []
    for day in sorted(by_day):
        durations = by_day[day]
        target = target_by_day.get(day)
        if target is None or len(durations) < min_daily_transitions:
            continue
        x = statistic(durations, feature)
        if not x > 0 or not target.mean_velocity > 0:
            continue
        rows.append(DailyFeatureRow(day, pair, x, target.mean_velocity, len(durations)))
    if not rows:
        warnings.warn(f"no overlapping dates for pair {pair} / {feature}", stacklevel=2)
    return Dataset(pair, feature, tuple(rows), empty_warning=not rows)


def parse_dataset(text):
    """Inverse of ``Dataset.to_csv``; all rows must share one pair and statistic."""
    body = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not body or body[0][1] != DATASET_HEADER:
        raise ParseError(f"expected header {DATASET_HEADER!r}", body[0][0] if body else None)
    pair = feature = None
    rows = []
    for lineno, raw in body[1:]:
        parts = raw.split(",")
        if len(parts) != 7:
            raise ParseError(f"expected 7 fields, got {len(parts)}", lineno)
        try:
            day = date.fromisoformat(parts[0])
            x, y, n = float(parts[4]), float(parts[5]), int(parts[6])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        p, f = (parts[1], parts[2]), parts[3]
        if f not in FEATURES:
            raise ParseError(f"unknown statistic {f!r}", lineno)
        if pair is None:
            pair, feature = p, f
        elif (p, f) != (pair, feature):
            raise ParseError("rows mix room pairs or statistics", lineno)
        if not (x > 0 and y > 0):
            raise ParseError("x and y must be positive", lineno)
        rows.append(DailyFeatureRow(day, p, x, y, n))
    return Dataset(pair, feature, tuple(rows), empty_warning=not rows)
