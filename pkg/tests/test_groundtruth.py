import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from pirgait._stats import norm_ppf
from pirgait.events import EventStream, SensorEvent
from pirgait.groundtruth import (
    LineWalk,
    VelocitySample,
    daily_mean_targets,
    estimate_line_velocity,
    qq_normality,
    qq_points,
    remove_outliers,
    segment_line_walks,
    targets_to_csv,
)

T0 = 1_262_649_600_000


def line_stream(firings):
    evs = [SensorEvent(T0 + int(round(t * 1000)), f"line{s}", "hall", "line_segment", s) for s, t in firings]
    return EventStream("h", tuple(sorted(evs, key=lambda e: (e.t_ms, e.sensor_id))))


def test_forward_pass():
    (w,) = segment_line_walks(line_stream([(0, 0), (1, 1), (2, 2), (3, 3)]))
    assert w.direction == "forward"
    assert len(w.firings) == 4


def test_backward_pass():
    (w,) = segment_line_walks(line_stream([(3, 0), (2, 1), (1, 2), (0, 3)]))
    assert w.direction == "backward"


def test_non_monotone_rejected():
    assert segment_line_walks(line_stream([(0, 0), (2, 1), (1, 2), (3, 3)])) == []


def test_gap_splits_passes_and_singletons_drop():
    walks = segment_line_walks(line_stream([(0, 0), (1, 1), (3, 10), (2, 10.5), (0, 30)]))
    assert [w.direction for w in walks] == ["forward", "backward"]


def test_velocity_examples():
    w = LineWalk(T0, ((0, 0.0), (1, 1.0), (2, 2.0), (3, 3.0)))
    assert estimate_line_velocity(w).velocity == pytest.approx(60.96, abs=1e-12)
    w2 = LineWalk(T0, ((0, 0.0), (1, 0.5)))
    assert estimate_line_velocity(w2).velocity == pytest.approx(121.92, abs=1e-12)
    with pytest.raises(ValueError):
        estimate_line_velocity(LineWalk(T0, ((0, 0.0), (1, 0.0))))


@given(st.lists(st.floats(0.05, 3.0), min_size=1, max_size=3))
def test_velocity_direction_invariant(gaps):
    t = np.concatenate([[0.0], np.cumsum(gaps)])
    fwd = LineWalk(T0, tuple((k, float(s)) for k, s in enumerate(t)))
    back = LineWalk(T0, tuple((k, float(t[-1] - s)) for k, s in reversed(list(enumerate(t)))))
    assert estimate_line_velocity(back).velocity == pytest.approx(estimate_line_velocity(fwd).velocity, rel=1e-12)


def samples(vs):
    return [VelocitySample(float(v), T0 + k * 1000) for k, v in enumerate(vs)]


def test_planted_450_removed():
    rng = np.random.default_rng(0)
    vs = list(rng.uniform(40, 80, 60)) + [450.0]
    kept = remove_outliers(samples(vs))
    assert 450.0 not in [s.velocity for s in kept]


def test_identical_samples_all_kept():
    assert len(remove_outliers(samples([55.0] * 7))) == 7


def test_single_sample_warns():
    with pytest.warns(UserWarning):
        assert len(remove_outliers(samples([5.0]))) == 1


def test_normal_retention_fraction():
    vs = np.random.default_rng(1).normal(55, 10, 1000)
    frac = len(remove_outliers(samples(vs))) / 1000
    assert abs(frac - 0.954) <= 0.02


@given(st.lists(st.floats(1, 200), min_size=3, max_size=40))
def test_median_never_removed(vs):
    kept = {s.velocity for s in remove_outliers(samples(vs))}
    srt = sorted(vs)
    assert srt[(len(vs) - 1) // 2] in kept and srt[len(vs) // 2] in kept


def test_daily_means():
    day = 86_400_000
    ss = [VelocitySample(v, T0 + 1000 * k) for k, v in enumerate([50.0, 60.0, 70.0])]
    ss.append(VelocitySample(80.0, T0 + 2 * day))
    ts = daily_mean_targets(ss)
    assert [(t.mean_velocity, t.n_walks) for t in ts] == [(60.0, 3), (80.0, 1)]
    assert len(daily_mean_targets(ss, min_walks=2)) == 1
    assert targets_to_csv(ts).splitlines()[1] == "2010-01-05,60.000000,3"


def test_norm_ppf_accuracy():
    p = np.concatenate([np.linspace(1e-6, 1 - 1e-6, 2001), [1e-12, 0.5, 1 - 1e-12]])
    ours = np.array([norm_ppf(v) for v in p])
    assert np.max(np.abs(ours - stats.norm.ppf(p))) < 1e-8


def test_qq_examples():
    rng = np.random.default_rng(2)
    full = rng.normal(55.3, 33.8, 2000)
    assert qq_normality(full[:500]) > 0.99
    # cutting the ~5% lower tail at zero bends the plot; probplot gives the same ~0.98
    v = full[full > 0][:500]
    assert qq_normality(v) > 0.975
    bimodal = np.concatenate([rng.normal(30, 3, 250), rng.normal(100, 3, 250)])
    assert qq_normality(bimodal) < qq_normality(v)
    theo, _ = qq_points(np.zeros(50))
    assert qq_normality(theo) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        qq_normality([3.0] * 20)
    with pytest.raises(ValueError):
        qq_normality([1.0, 2.0])


def test_no_warning_on_normal_path():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        remove_outliers(samples([1.0, 2.0, 3.0]))
