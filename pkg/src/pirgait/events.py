"""Sensor event logs: parsing, validation, serialization and day exclusions.

Timestamps are held as integer milliseconds of home-local wall-clock time
since 1970-01-01T00:00 local, so every duration derived from them is exact
on the millisecond grid. The log's fixed UTC offset is kept alongside.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from functools import cached_property

from .errors import ParseError

EVENT_HEADER = "home_id,timestamp,sensor_id,room,kind,segment"
EXCLUSION_HEADER = "date,reason"
AREA_MOTION = "area_motion"
LINE_SEGMENT = "line_segment"
KINDS = (AREA_MOTION, LINE_SEGMENT)
EXCLUSION_REASONS = ("visitor", "staff_visit", "sensor_outage")

MS_PER_DAY = 86_400_000
_EPOCH = datetime(1970, 1, 1)
_LABEL = re.compile(r"^[A-Za-z0-9_]+$")
_TIMESTAMP = re.compile(
    r"^(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}\.\d{3})(Z|[+-]\d{2}:\d{2})?$"
)
_OFFSET_COMMENT = re.compile(r"^#\s*utc_offset\s*[=:]\s*([+-]\d{2}:\d{2}|Z)\s*$")


def ms_to_datetime(t_ms):
    return _EPOCH + timedelta(milliseconds=t_ms)


def datetime_to_ms(dt):
    delta = dt - _EPOCH
    return (delta.days * 86_400 + delta.seconds) * 1000 + delta.microseconds // 1000


def ms_to_date(t_ms):
    return date(1970, 1, 1) + timedelta(days=t_ms // MS_PER_DAY)


def date_to_ms(d):
    return (d - date(1970, 1, 1)).days * MS_PER_DAY


def format_ms(t_ms):
    return ms_to_datetime(t_ms).isoformat(timespec="milliseconds")


def format_offset(minutes):
    sign = "-" if minutes < 0 else "+"
    minutes = abs(minutes)
    return f"{sign}{minutes // 60:02d}:{minutes % 60:02d}"


def parse_offset(text):
    if text == "Z":
        return 0
    sign = -1 if text[0] == "-" else 1
    hh, mm = text[1:].split(":")
    if int(mm) >= 60 or int(hh) > 18:
        raise ValueError(f"bad UTC offset {text!r}")
    return sign * (int(hh) * 60 + int(mm))


@dataclass(frozen=True, slots=True, order=True)
class SensorEvent:
    t_ms: int
    sensor_id: str
    room: str
    kind: str = AREA_MOTION
    segment: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind == LINE_SEGMENT:
            if self.segment not in (0, 1, 2, 3):
                raise ValueError(f"line segment index must be 0..3, got {self.segment!r}")
        elif self.segment is not None:
            raise ValueError("segment is only valid for line_segment events")

    @property
    def timestamp(self):
        return ms_to_datetime(self.t_ms)

    @property
    def date(self):
        return ms_to_date(self.t_ms)

    @property
    def seconds(self):
        return self.t_ms / 1000.0


@dataclass(frozen=True)
class EventStream:
    """Time-ordered, immutable firings of one home."""

    home_id: str
    events: tuple = ()
    utc_offset_min: int = 0

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        for prev, cur in zip(events, events[1:]):
            if cur.t_ms < prev.t_ms:
                raise ValueError("events must be non-decreasing in time")

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @cached_property
    def day_boundaries(self):
        """``(date, start, stop)`` index ranges partitioning events at local midnight."""
        out = []
        start = 0
        events = self.events
        for k in range(1, len(events) + 1):
            if k == len(events) or events[k].t_ms // MS_PER_DAY != events[start].t_ms // MS_PER_DAY:
                out.append((events[start].date, start, k))
                start = k
        return tuple(out)

    @property
    def dates(self):
        return tuple(d for d, _, _ in self.day_boundaries)

    def of_kind(self, kind):
        return EventStream(
            self.home_id, tuple(e for e in self.events if e.kind == kind), self.utc_offset_min
        )


@dataclass(frozen=True)
class ExclusionCalendar:
    reasons: dict = field(default_factory=dict)

    @property
    def excluded_days(self):
        return frozenset(self.reasons)

    def __len__(self):
        return len(self.reasons)

    def __contains__(self, day):
        return day in self.reasons


def _parse_timestamp(text, log_offset):
    m = _TIMESTAMP.match(text)
    if not m:
        raise ValueError(f"timestamp {text!r} is not ISO-8601 with milliseconds")
    dt = datetime.fromisoformat(m.group(1))
    if m.group(2) is not None:
        offset = parse_offset(m.group(2))
        if log_offset is not None and offset != log_offset:
            dt = dt - timedelta(minutes=offset) + timedelta(minutes=log_offset)
        return dt, offset
    return dt, None


def parse_event_log(text):
    """Parse an event-log CSV document into a sorted, de-duplicated EventStream.

    Raises ParseError naming the offending line for malformed rows, mixed
    home ids or bad timestamps.
    """
    lines = text.splitlines()
    log_offset = None
    n = 0
    while n < len(lines) and (not lines[n].strip() or lines[n].lstrip().startswith("#")):
        m = _OFFSET_COMMENT.match(lines[n].strip())
        if m:
            try:
                log_offset = parse_offset(m.group(1))
            except ValueError as exc:
                raise ParseError(str(exc), n + 1) from None
        n += 1
    if n >= len(lines):
        raise ParseError("missing header", n or None)
    if lines[n].strip() != EVENT_HEADER:
        raise ParseError(f"expected header {EVENT_HEADER!r}", n + 1)

    home_id = None
    seen = {}
    for lineno in range(n + 2, len(lines) + 1):
        raw = lines[lineno - 1].strip()
        if not raw or raw.startswith("#"):
            continue
        parts = raw.split(",")
        if len(parts) != 6:
            raise ParseError(f"expected 6 fields, got {len(parts)}", lineno)
        hid, ts, sensor_id, room, kind, seg = parts
        for name, value in (("home_id", hid), ("sensor_id", sensor_id), ("room", room)):
            if not _LABEL.match(value):
                raise ParseError(f"invalid {name} {value!r}", lineno)
        if home_id is None:
            home_id = hid
        elif hid != home_id:
            raise ParseError(f"mixed home_id: {hid!r} after {home_id!r}", lineno)
        try:
            dt, offset = _parse_timestamp(ts, log_offset)
        except ValueError as exc:
            raise ParseError(f"unparseable timestamp {ts!r}: {exc}", lineno) from None
        if log_offset is None and offset is not None:
            log_offset = offset
        if kind not in KINDS:
            raise ParseError(f"unknown kind {kind!r}", lineno)
        if kind == LINE_SEGMENT:
            if seg not in ("0", "1", "2", "3"):
                raise ParseError(f"line_segment needs segment 0..3, got {seg!r}", lineno)
            segment = int(seg)
        else:
            if seg != "":
                raise ParseError("segment must be empty unless kind=line_segment", lineno)
            segment = None
        event = SensorEvent(datetime_to_ms(dt), sensor_id, room, kind, segment)
        key = (event.t_ms, sensor_id)
        prior = seen.get(key)
        if prior is None:
            seen[key] = event
        elif prior != event:
            raise ParseError(f"conflicting duplicate row for sensor {sensor_id!r} at {ts}", lineno)

    events = sorted(seen.values(), key=lambda e: (e.t_ms, e.sensor_id))
    return EventStream(home_id or "", tuple(events), log_offset or 0)


def serialize_event_log(stream):
    out = [f"# utc_offset={format_offset(stream.utc_offset_min)}", EVENT_HEADER]
    for e in stream.events:
        seg = "" if e.segment is None else str(e.segment)
        out.append(f"{stream.home_id},{format_ms(e.t_ms)},{e.sensor_id},{e.room},{e.kind},{seg}")
    return "\n".join(out) + "\n"


def parse_exclusions(text):
    lines = [ln for ln in text.splitlines()]
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ParseError("missing header")
    lineno, header = rows[0]
    if header != EXCLUSION_HEADER:
        raise ParseError(f"expected header {EXCLUSION_HEADER!r}", lineno)
    reasons = {}
    for lineno, raw in rows[1:]:
        parts = raw.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 2 fields, got {len(parts)}", lineno)
        try:
            day = date.fromisoformat(parts[0])
        except ValueError:
            raise ParseError(f"invalid date {parts[0]!r}", lineno) from None
        if parts[1] not in EXCLUSION_REASONS:
            raise ParseError(f"unknown reason {parts[1]!r}", lineno)
        if day in reasons:
            raise ParseError(f"duplicate date {day}", lineno)
        reasons[day] = parts[1]
    return ExclusionCalendar(reasons)


def serialize_exclusions(cal):
    out = [EXCLUSION_HEADER]
    out += [f"{d.isoformat()},{cal.reasons[d]}" for d in sorted(cal.reasons)]
    return "\n".join(out) + "\n"


def apply_exclusions(stream, cal):
    """Drop every event whose local date is on the calendar."""
    if not cal.reasons:
        return stream
    excluded = {date_to_ms(d) // MS_PER_DAY for d in cal.reasons}
    kept = tuple(e for e in stream.events if e.t_ms // MS_PER_DAY not in excluded)
    return EventStream(stream.home_id, kept, stream.utc_offset_min)
