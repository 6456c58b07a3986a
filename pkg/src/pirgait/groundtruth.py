"""Ground-truth walking speed from the four-sensor ceiling line."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._stats import norm_ppf, pearson_r2
from .events import LINE_SEGMENT, ms_to_date

DEFAULT_SPACING_CM = 60.96  # 2 ft
DEFAULT_GAP_S = 3.0
TARGET_HEADER = "date,mean_velocity_cm_s,n_walks"
QQ_HEADER = "theoretical,empirical"


@dataclass(frozen=True)
class LineWalk:
    """One pass under the line. ``firings`` are (segment, seconds after ``start_ms``)."""

    start_ms: int
    firings: tuple

    @property
    def direction(self):
        return "forward" if self.firings[-1][0] > self.firings[0][0] else "backward"

    @property
    def date(self):
        return ms_to_date(self.start_ms)


@dataclass(frozen=True, slots=True)
class VelocitySample:
    velocity: float  # cm/s
    t_ms: int

    @property
    def date(self):
        return ms_to_date(self.t_ms)


@dataclass(frozen=True, slots=True)
class DailyTarget:
    date: object
    mean_velocity: float
    n_walks: int


def _strictly_monotone(segs):
    inc = all(b > a for a, b in zip(segs, segs[1:]))
    dec = all(b < a for a, b in zip(segs, segs[1:]))
    return inc or dec


def segment_line_walks(stream, gap_threshold=DEFAULT_GAP_S):
    """Group line firings closer than ``gap_threshold`` seconds into passes.

    Groups with fewer than two firings or non-monotone segment order are
    dropped as unusable.
    """
    limit = gap_threshold * 1000.0
    line = [e for e in stream.events if e.kind == LINE_SEGMENT]
    groups = []
    for e in line:
        if groups and e.t_ms - groups[-1][-1].t_ms < limit:
            groups[-1].append(e)
        else:
            groups.append([e])
    walks = []
    for g in groups:
        segs = [e.segment for e in g]
        if len(g) < 2 or not _strictly_monotone(segs):
            continue
        t0 = g[0].t_ms
        walks.append(LineWalk(t0, tuple((e.segment, (e.t_ms - t0) / 1000.0) for e in g)))
    return walks


def estimate_line_velocity(walk, spacing=DEFAULT_SPACING_CM):
    """Least-squares slope of position against firing time, as a speed in cm/s."""
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    pos = np.array([s for s, _ in walk.firings], dtype=np.float64) * spacing
    t = np.array([s for _, s in walk.firings], dtype=np.float64)
    dt = t - t.mean()
    stt = float(dt @ dt)
    if stt == 0.0:
        raise ValueError("line walk has zero time span")
    slope = float(dt @ (pos - pos.mean())) / stt
    return VelocitySample(abs(slope), walk.start_ms)


def line_velocities(stream, spacing=DEFAULT_SPACING_CM, gap_threshold=DEFAULT_GAP_S):
    return [estimate_line_velocity(w, spacing) for w in segment_line_walks(stream, gap_threshold)]


def remove_outliers(samples, n_sd=2.0):
    """Single pass keeping samples within ``n_sd`` sample standard deviations of the mean."""
    samples = list(samples)
    if len(samples) < 2:
        warnings.warn("fewer than 2 velocity samples; outlier removal skipped", stacklevel=2)
        return samples
    v = np.array([s.velocity for s in samples])
    mean = float(v.mean())
    sd = float(v.std(ddof=1))
    keep = np.abs(v - mean) <= n_sd * sd
    return [s for s, k in zip(samples, keep) if k]


def daily_mean_targets(samples, min_walks=1):
    """Arithmetic mean velocity per local date, for dates with at least ``min_walks`` samples."""
    by_day = {}
    for s in samples:
        by_day.setdefault(s.date, []).append(s.velocity)
    return [
        DailyTarget(d, math.fsum(vs) / len(vs), len(vs))
        for d, vs in sorted(by_day.items())
        if len(vs) >= min_walks
    ]


def qq_points(velocities):
    """(standard-normal quantile, sorted sample) at plotting positions (i - 0.5) / n."""
    v = np.sort(np.asarray(list(velocities), dtype=np.float64))
    n = v.shape[0]
    theo = np.array([norm_ppf((i + 0.5) / n) for i in range(n)])
    return theo, v


def qq_normality(velocities):
    """Squared correlation of the normal Q-Q plot; near 1 for normal samples."""
    theo, emp = qq_points(velocities)
    if emp.shape[0] < 10:
        raise ValueError("Q-Q diagnostic needs at least 10 samples")
    if emp[0] == emp[-1]:
        raise ValueError("Q-Q correlation undefined for constant input")
    return pearson_r2(theo, emp)


def targets_to_csv(targets):
    out = [TARGET_HEADER]
    out += [f"{t.date.isoformat()},{t.mean_velocity:.6f},{t.n_walks}" for t in targets]
    return "\n".join(out) + "\n"


def qq_to_csv(velocities):
    theo, emp = qq_points(velocities)
    out = ["# units: theoretical=standard-normal quantile, empirical=cm/s", QQ_HEADER]
    out += [f"{a:.9f},{b:.6f}" for a, b in zip(theo, emp)]
    return "\n".join(out) + "\n"
