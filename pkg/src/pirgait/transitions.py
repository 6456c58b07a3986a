"""Room-to-room transition times from area-motion firings."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field

from .events import AREA_MOTION, MS_PER_DAY, format_ms, ms_to_date

TRANSITION_HEADER = "from_room,to_room,start_timestamp,duration_s"
DEFAULT_REFRACTORY_S = 6.0
DEFAULT_MIN_PAIR_COUNT = 50


@dataclass(frozen=True, slots=True)
class Transition:
    from_room: str
    to_room: str
    start_ms: int
    duration_ms: int

    @property
    def pair(self):
        return (self.from_room, self.to_room)

    @property
    def duration(self):
        """Seconds."""
        return self.duration_ms / 1000.0

    @property
    def date(self):
        # a transition crossing midnight belongs to the day it started on
        return ms_to_date(self.start_ms)


@dataclass(frozen=True)
class PairMap:
    """Ordered room pair -> transitions, after count filtering."""

    pairs: dict = field(default_factory=dict)
    min_count: int = DEFAULT_MIN_PAIR_COUNT
    empty_warning: bool = False

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        return pair in self.pairs

    def __getitem__(self, pair):
        return self.pairs[pair]

    def counts(self):
        return {p: len(ts) for p, ts in self.pairs.items()}

    def by_frequency(self):
        """Pairs sorted by descending count, then by name."""
        return sorted(self.pairs, key=lambda p: (-len(self.pairs[p]), p))


def debounce(events, refractory_s):
    """Drop firings that repeat a sensor within ``refractory_s`` of its last kept firing."""
    limit = int(round(refractory_s * 1000))
    if limit <= 0:
        return list(events)
    last = {}
    out = []
    for e in events:
        prev = last.get(e.sensor_id)
        if prev is not None and e.t_ms - prev < limit:
            continue
        last[e.sensor_id] = e.t_ms
        out.append(e)
    return out


def extract_transitions(stream, refractory=DEFAULT_REFRACTORY_S, max_duration=None):
    """Transitions between consecutive area-motion firings in different rooms.

    Same-room consecutive firings emit nothing. A pair of firings on dates
    more than one day apart (a missing or excluded day between them) is
    never joined. ``max_duration`` (seconds) optionally drops long gaps.
    """
    events = debounce((e for e in stream.events if e.kind == AREA_MOTION), refractory)
    cap = None if max_duration is None else int(round(max_duration * 1000))
    out = []
    for a, b in zip(events, events[1:]):
        if a.room == b.room:
            continue
        if b.t_ms // MS_PER_DAY - a.t_ms // MS_PER_DAY > 1:
            continue
        d = b.t_ms - a.t_ms
        if cap is not None and d > cap:
            continue
        out.append(Transition(a.room, b.room, a.t_ms, d))
    return out


def filter_room_pairs(transitions, min_count=DEFAULT_MIN_PAIR_COUNT):
    """Keep ordered pairs observed strictly more than ``min_count`` times."""
    if min_count < 0:
        raise ValueError("min_count must be non-negative")
    grouped = {}
    for t in transitions:
        grouped.setdefault(t.pair, []).append(t)
    kept = {p: tuple(ts) for p, ts in sorted(grouped.items()) if len(ts) > min_count}
    if not kept:
        warnings.warn(f"no room pair has more than {min_count} transitions", stacklevel=2)
    return PairMap(kept, min_count, empty_warning=not kept)


def pair_frequency(pairs):
    """Percentage of retained transitions falling in each pair."""
    if not len(pairs):
        raise ValueError("empty PairMap")
    counts = pairs.counts()
    total = sum(counts.values())
    return {p: 100.0 * c / total for p, c in counts.items()}


def pair_counts(transitions):
    return Counter(t.pair for t in transitions)


def transitions_to_csv(transitions):
    out = [TRANSITION_HEADER]
    for t in transitions:
        out.append(f"{t.from_room},{t.to_room},{format_ms(t.start_ms)},{t.duration_ms / 1000:.3f}")
    return "\n".join(out) + "\n"
