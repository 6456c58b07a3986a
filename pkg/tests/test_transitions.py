import pytest
from hypothesis import given
from hypothesis import strategies as st

from pirgait.events import EventStream, SensorEvent
from pirgait.transitions import (
    Transition,
    debounce,
    extract_transitions,
    filter_room_pairs,
    pair_frequency,
    transitions_to_csv,
)

T0 = 1_262_649_600_000  # 2010-01-05 local midnight


def stream(*firings):
    """(seconds, room) firings, one sensor per room."""
    evs = [SensorEvent(T0 + int(round(s * 1000)), f"{r}_pir", r) for s, r in firings]
    return EventStream("h", tuple(sorted(evs, key=lambda e: (e.t_ms, e.sensor_id))))


def test_direct_difference():
    (t,) = extract_transitions(stream((0, "kitchen"), (4.2, "living")))
    assert t.pair == ("kitchen", "living")
    assert t.duration_ms == 4200
    assert t.duration == 4.2


def test_same_room_firings_emit_nothing():
    ts = extract_transitions(stream((0, "kitchen"), (8, "kitchen"), (12, "living")))
    assert [(t.pair, t.duration) for t in ts] == [(("kitchen", "living"), 4.0)]


def test_debounce_uses_refractory():
    s = stream((0, "kitchen"), (3, "kitchen"), (7, "kitchen"))
    assert [e.seconds - T0 / 1000 for e in debounce(s.events, 6.0)] == [0.0, 7.0]
    assert len(debounce(s.events, 0.0)) == 3


def test_no_transition_across_missing_day():
    day = 86_400
    s = stream((0, "kitchen"), (2 * day + 5, "living"), (2 * day + 9, "bedroom"))
    ts = extract_transitions(s)
    assert [t.pair for t in ts] == [("living", "bedroom")]


def test_midnight_crossing_belongs_to_start_date():
    s = stream((86_399.5, "kitchen"), (86_402.0, "living"))
    (t,) = extract_transitions(s)
    assert t.date.isoformat() == "2010-01-05"


def test_max_duration_cap():
    s = stream((0, "kitchen"), (4, "living"), (600, "kitchen"))
    assert len(extract_transitions(s)) == 2
    assert len(extract_transitions(s, max_duration=60)) == 1


def _many(pair, n):
    return [Transition(pair[0], pair[1], T0 + k, 1000) for k in range(n)]


def test_filter_boundary_at_50():
    pm = filter_room_pairs(_many(("A", "B"), 51) + _many(("A", "C"), 50))
    assert list(pm.pairs) == [("A", "B")]
    assert pm.counts() == {("A", "B"): 51}


def test_filter_direction_matters_and_zero_threshold():
    pm = filter_room_pairs(_many(("A", "B"), 3) + _many(("B", "A"), 1), min_count=0)
    assert set(pm.pairs) == {("A", "B"), ("B", "A")}
    assert pm.by_frequency() == [("A", "B"), ("B", "A")]


def test_filter_everything_warns():
    with pytest.warns(UserWarning):
        pm = filter_room_pairs(_many(("A", "B"), 5))
    assert pm.empty_warning and len(pm) == 0


def test_pair_frequency():
    pm = filter_room_pairs(_many(("A", "B"), 75) + _many(("B", "A"), 25), min_count=0)
    assert pair_frequency(pm) == {("A", "B"): 75.0, ("B", "A"): 25.0}
    one = filter_room_pairs(_many(("A", "B"), 3), min_count=0)
    assert pair_frequency(one) == {("A", "B"): 100.0}
    with pytest.warns(UserWarning):
        empty = filter_room_pairs([], min_count=0)
    with pytest.raises(ValueError):
        pair_frequency(empty)


def test_csv_export():
    text = transitions_to_csv(extract_transitions(stream((0, "kitchen"), (4.2, "living"))))
    assert text.splitlines() == [
        "from_room,to_room,start_timestamp,duration_s",
        "kitchen,living,2010-01-05T00:00:00.000,4.200",
    ]


firing_lists = st.lists(
    st.tuples(st.integers(0, 80_000), st.sampled_from(["a", "b", "c", "d"])), max_size=60
)


@given(firing_lists)
def test_extraction_invariants(fs):
    s = stream(*[(ms / 1000, r) for ms, r in fs])
    kept = debounce(s.events, 6.0)
    ts = extract_transitions(s)
    assert len(ts) <= max(0, len(kept) - 1)
    idx = {e.t_ms: e for e in kept}
    for t in ts:
        assert t.from_room != t.to_room
        assert t.duration_ms >= 0
        assert t.start_ms in idx and t.start_ms + t.duration_ms in idx


@pytest.mark.filterwarnings("ignore:no room pair")
@given(firing_lists)
def test_reversal_swaps_pair_direction(fs):
    # distinct times so the reversed order is well defined
    seen = {}
    for ms, r in fs:
        seen.setdefault(ms, r)
    fwd = stream(*[(ms / 1000, r) for ms, r in seen.items()])
    end = max(seen, default=0)
    rev = stream(*[((end - ms) / 1000, r) for ms, r in seen.items()])
    fc = filter_room_pairs(extract_transitions(fwd, refractory=0), 0).counts() if seen else {}
    rc = filter_room_pairs(extract_transitions(rev, refractory=0), 0).counts() if seen else {}
    assert rc == {(b, a): n for (a, b), n in fc.items()}
