from datetime import date

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pirgait.errors import ParseError
from pirgait.events import (
    EVENT_HEADER,
    EventStream,
    ExclusionCalendar,
    SensorEvent,
    apply_exclusions,
    datetime_to_ms,
    format_ms,
    ms_to_datetime,
    parse_event_log,
    parse_exclusions,
    serialize_event_log,
    serialize_exclusions,
)

ROWS = [
    "h1,2010-01-05T08:00:04.200,living_pir,living,area_motion,",
    "h1,2010-01-05T08:00:00.000,kitchen_pir,kitchen,area_motion,",
    "h1,2010-01-05T08:00:02.125,line1,hallway,line_segment,1",
]


def doc(*rows, header=EVENT_HEADER, offset="# utc_offset=-08:00"):
    return "\n".join([offset, header, *rows]) + "\n"


def test_shuffled_rows_are_sorted():
    s = parse_event_log(doc(*ROWS))
    assert len(s) == 3
    assert [e.sensor_id for e in s] == ["kitchen_pir", "line1", "living_pir"]
    assert s.home_id == "h1"
    assert s.utc_offset_min == -480
    assert s.events[1].segment == 1


def test_header_only_is_empty():
    s = parse_event_log(doc())
    assert len(s) == 0


def test_invalid_calendar_date_names_row():
    bad = "h1,2010-02-30T00:00:00.000,kitchen_pir,kitchen,area_motion,"
    with pytest.raises(ParseError) as err:
        parse_event_log(doc(ROWS[0], bad))
    assert err.value.line == 4
    assert "line 4" in str(err.value)


@pytest.mark.parametrize(
    "row, fragment",
    [
        ("h2,2010-01-05T08:00:00.000,k,kitchen,area_motion,", "mixed home_id"),
        ("h1,2010-01-05T08:00:00,k,kitchen,area_motion,", "milliseconds"),
        ("h1,2010-01-05T08:00:00.000,k,kitchen,pressure,", "unknown kind"),
        ("h1,2010-01-05T08:00:00.000,l,hall,line_segment,4", "segment"),
        ("h1,2010-01-05T08:00:00.000,k,kitchen,area_motion,2", "segment"),
        ("h1,2010-01-05T08:00:00.000,k,kit chen,area_motion,", "invalid room"),
        ("h1,2010-01-05T08:00:00.000,k,kitchen,area_motion", "6 fields"),
    ],
)
def test_malformed_rows(row, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_event_log(doc(ROWS[0], row))


def test_bad_header():
    with pytest.raises(ParseError, match="header"):
        parse_event_log(doc(header="a,b,c"))


def test_duplicates_collapse_and_conflicts_fail():
    s = parse_event_log(doc(ROWS[0], ROWS[0]))
    assert len(s) == 1
    clash = "h1,2010-01-05T08:00:04.200,living_pir,kitchen,area_motion,"
    with pytest.raises(ParseError, match="conflicting"):
        parse_event_log(doc(ROWS[0], clash))


def test_other_offsets_are_converted_to_log_local_time():
    a = parse_event_log(doc("h1,2010-01-05T16:00:00.000Z,k,kitchen,area_motion,"))
    b = parse_event_log(doc("h1,2010-01-05T08:00:00.000,k,kitchen,area_motion,"))
    assert a.events[0].t_ms == b.events[0].t_ms


def test_millisecond_clock_round_trip():
    dt = ms_to_datetime(1_262_678_400_123)
    assert datetime_to_ms(dt) == 1_262_678_400_123
    assert format_ms(1_262_678_400_123).endswith(".123")


def test_day_boundaries_split_at_midnight():
    rows = [
        "h1,2010-01-05T23:59:59.999,k,kitchen,area_motion,",
        "h1,2010-01-06T00:00:00.000,l,living,area_motion,",
        "h1,2010-01-06T09:00:00.000,k,kitchen,area_motion,",
    ]
    s = parse_event_log(doc(*rows))
    assert s.day_boundaries == ((date(2010, 1, 5), 0, 1), (date(2010, 1, 6), 1, 3))


def test_stream_rejects_unsorted():
    e1 = SensorEvent(1000, "a", "kitchen")
    e0 = SensorEvent(0, "b", "living")
    with pytest.raises(ValueError):
        EventStream("h", (e1, e0))


@st.composite
def streams(draw):
    n = draw(st.integers(0, 30))
    times = sorted(draw(st.lists(st.integers(1_262_000_000_000, 1_263_000_000_000), min_size=n, max_size=n)))
    events = []
    for k, t in enumerate(times):
        if draw(st.booleans()):
            events.append(SensorEvent(t, f"s{k}", draw(st.sampled_from(["kitchen", "living"]))))
        else:
            events.append(SensorEvent(t, f"l{k}", "hall", "line_segment", draw(st.integers(0, 3))))
    return EventStream("h9", tuple(sorted(events, key=lambda e: (e.t_ms, e.sensor_id))), -300)


@given(streams())
def test_serialize_parse_round_trip(s):
    back = parse_event_log(serialize_event_log(s))
    assert back.events == s.events
    assert back.utc_offset_min == s.utc_offset_min


def _two_days():
    evs = [SensorEvent(k * 3_600_000 + 1_262_649_600_000, f"s{k}", "kitchen") for k in range(10)]
    evs += [SensorEvent(86_400_000 + e.t_ms, e.sensor_id, "living") for e in evs[:4]]
    return EventStream("h", tuple(sorted(evs, key=lambda e: (e.t_ms, e.sensor_id))))


def test_apply_exclusions_drops_day():
    s = _two_days()
    day2 = s.dates[1]
    out = apply_exclusions(s, ExclusionCalendar({day2: "visitor"}))
    assert len(out) == len(s) - 4
    assert out.dates == (s.dates[0],)
    assert apply_exclusions(out, ExclusionCalendar({day2: "visitor"})).events == out.events


def test_apply_exclusions_identity_and_annihilator():
    s = _two_days()
    assert apply_exclusions(s, ExclusionCalendar()).events == s.events
    cal = ExclusionCalendar({d: "sensor_outage" for d in s.dates})
    assert len(apply_exclusions(s, cal)) == 0


def test_exclusion_csv_round_trip_and_errors():
    cal = ExclusionCalendar({date(2010, 1, 6): "visitor", date(2010, 1, 2): "staff_visit"})
    text = serialize_exclusions(cal)
    assert parse_exclusions(text).reasons == cal.reasons
    with pytest.raises(ParseError, match="duplicate"):
        parse_exclusions("date,reason\n2010-01-02,visitor\n2010-01-02,visitor\n")
    with pytest.raises(ParseError, match="reason"):
        parse_exclusions("date,reason\n2010-01-02,holiday\n")
    with pytest.raises(ParseError, match="date"):
        parse_exclusions("date,reason\n2010-13-02,visitor\n")
