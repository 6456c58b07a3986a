"""Synthetic single-resident homes emitting motion-sensor event streams.

A resident moves through a floor plan following a room-to-room Markov
model. Each room's PIR sensor sees motion *attempts* (entry, sparse
in-room motion, an optional get-up bout shortly before leaving, and the
departure itself) and fires only when it is out of its refractory window,
so dwell contamination of transition times emerges from the sensor
mechanics rather than being injected. A four-sensor ceiling line in one
room records passes at the resident's gait speed and supplies the ground
truth. All times are integer milliseconds.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from datetime import date, timedelta

import numpy as np
from scipy import stats

from .events import (
    AREA_MOTION,
    LINE_SEGMENT,
    MS_PER_DAY,
    EventStream,
    ExclusionCalendar,
    SensorEvent,
    date_to_ms,
    format_ms,
)
from .groundtruth import DEFAULT_SPACING_CM, LineWalk

SCENARIO_VERSION = 1
TRUTH_HEADER = "record_id,kind,timestamp,from_room,to_room,speed_cm_s,duration_s,dwell_s"


@dataclass(frozen=True)
class Room:
    name: str
    kind: str = "other"
    dwell_shift_s: float = 2.0
    dwell_mean_s: float = 300.0
    motion_rate_hz: float = 1.0 / 240.0  # in-room motion attempts while staying


@dataclass(frozen=True)
class SpeedModel:
    base_cm_s: float = 60.0
    walk_sigma: float = 0.05  # per-walk lognormal jitter
    day_sigma: float = 0.15  # stationary sd of the daily log-speed factor
    day_ar: float = 0.5  # AR(1) coefficient of the daily factor
    drift_per_day: float = 0.0  # fractional change of base speed per day
    diurnal_amplitude: float = 0.04  # peak-to-mean modulation, peaking mid afternoon
    hurry_prob: float = 0.0  # room transitions made in a hurry
    hurry_factor: tuple = (1.3, 2.2)


@dataclass(frozen=True)
class SensorModel:
    refractory_s: float = 6.0
    latency_max_ms: int = 200
    miss_prob: float = 0.0  # entry not detected
    prep_prob: float = 0.0  # get-up motion before leaving a room
    prep_max_s: float = 8.0


@dataclass(frozen=True)
class LineModel:
    room: str | None = None
    spacing_cm: float = DEFAULT_SPACING_CM
    pass_prob: float = 0.1  # chance an entry into the line room crosses the line
    glitch_prob: float = 0.0  # corrupted pass (near-simultaneous firings)
    pause_prob: float = 0.0  # resident stops part way through


@dataclass(frozen=True)
class Schedule:
    wake_hour: float = 7.0
    sleep_hour: float = 22.5
    jitter_h: float = 0.5
    night_trip_prob: float = 0.6
    transit_dwell_s: float = 2.0  # mean extra dwell in rooms passed through on a route
    sleep_motion_rate_hz: float = 1.0 / 3600.0


@dataclass(frozen=True)
class SimScenario:
    home_id: str
    rooms: tuple
    distances: dict  # (from, to) -> cm, for every ordered adjacent pair
    routing: dict  # from -> {to: probability}
    speed: SpeedModel = field(default_factory=SpeedModel)
    sensor: SensorModel = field(default_factory=SensorModel)
    line: LineModel = field(default_factory=LineModel)
    schedule: Schedule = field(default_factory=Schedule)
    bedroom: str | None = None
    bathroom: str | None = None
    visitor_day_rate: float = 0.0
    outage_day_rate: float = 0.0
    start_date: date = date(2010, 1, 4)
    utc_offset_min: int = -480
    seed: int = 0

    def __post_init__(self):
        validate_scenario(self)

    @property
    def room_names(self):
        return tuple(r.name for r in self.rooms)

    def room(self, name):
        for r in self.rooms:
            if r.name == name:
                return r
        raise KeyError(name)

    def neighbors(self, name):
        return tuple(sorted(self.routing.get(name, {})))

    def to_dict(self):
        return {
            "format": "pirgait.scenario",
            "version": SCENARIO_VERSION,
            "home_id": self.home_id,
            "rooms": [asdict(r) for r in self.rooms],
            "distances": {f"{a}->{b}": d for (a, b), d in sorted(self.distances.items())},
            "routing": {a: dict(sorted(v.items())) for a, v in sorted(self.routing.items())},
            "speed": {**asdict(self.speed), "hurry_factor": list(self.speed.hurry_factor)},
            "sensor": asdict(self.sensor),
            "line": asdict(self.line),
            "schedule": asdict(self.schedule),
            "bedroom": self.bedroom,
            "bathroom": self.bathroom,
            "visitor_day_rate": self.visitor_day_rate,
            "outage_day_rate": self.outage_day_rate,
            "start_date": self.start_date.isoformat(),
            "utc_offset_min": self.utc_offset_min,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc):
        if doc.get("format") != "pirgait.scenario":
            raise ValueError("not a pirgait scenario document")
        if doc.get("version") != SCENARIO_VERSION:
            raise ValueError(f"unsupported scenario version {doc.get('version')!r}")
        speed = dict(doc.get("speed", {}))
        if "hurry_factor" in speed:
            speed["hurry_factor"] = tuple(speed["hurry_factor"])
        return cls(
            home_id=doc["home_id"],
            rooms=tuple(Room(**r) for r in doc["rooms"]),
            distances={tuple(k.split("->")): float(v) for k, v in doc["distances"].items()},
            routing={a: {b: float(p) for b, p in v.items()} for a, v in doc["routing"].items()},
            speed=SpeedModel(**speed),
            sensor=SensorModel(**doc.get("sensor", {})),
            line=LineModel(**doc.get("line", {})),
            schedule=Schedule(**doc.get("schedule", {})),
            bedroom=doc.get("bedroom"),
            bathroom=doc.get("bathroom"),
            visitor_day_rate=float(doc.get("visitor_day_rate", 0.0)),
            outage_day_rate=float(doc.get("outage_day_rate", 0.0)),
            start_date=date.fromisoformat(doc.get("start_date", "2010-01-04")),
            utc_offset_min=int(doc.get("utc_offset_min", 0)),
            seed=int(doc.get("seed", 0)),
        )

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


def validate_scenario(sc):
    names = [r.name for r in sc.rooms]
    if not names:
        raise ValueError("scenario needs at least one room")
    if len(set(names)) != len(names):
        raise ValueError("duplicate room names")
    known = set(names)
    for (a, b), d in sc.distances.items():
        if a not in known or b not in known:
            raise ValueError(f"distance for unknown room pair {a}->{b}")
        if not d > 0:
            raise ValueError(f"distance {a}->{b} must be positive")
    for a, row in sc.routing.items():
        if a not in known:
            raise ValueError(f"routing from unknown room {a}")
        if row:
            if abs(sum(row.values()) - 1.0) > 1e-9:
                raise ValueError(f"routing probabilities from {a} must sum to 1")
            for b, p in row.items():
                if p < 0:
                    raise ValueError("negative routing probability")
                if (a, b) not in sc.distances:
                    raise ValueError(f"no distance for routed pair {a}->{b}")
    for r in sc.rooms:
        if r.dwell_shift_s < 0 or r.dwell_mean_s < r.dwell_shift_s:
            raise ValueError(f"room {r.name}: need 0 <= dwell_shift_s <= dwell_mean_s")
    if sc.sensor.refractory_s < 0 or sc.sensor.latency_max_ms < 0:
        raise ValueError("sensor timings must be non-negative")
    if sc.line.room is not None and sc.line.room not in known:
        raise ValueError(f"line room {sc.line.room!r} not in floor plan")
    for name in (sc.bedroom, sc.bathroom):
        if name is not None and name not in known:
            raise ValueError(f"room {name!r} not in floor plan")
    if sc.speed.base_cm_s <= 0:
        raise ValueError("base speed must be positive")


@dataclass(frozen=True, slots=True)
class TruthRecord:
    record_id: int
    kind: str  # stay | walk | line | guest
    t_ms: int
    from_room: str = ""
    to_room: str = ""
    speed_cm_s: float = math.nan
    duration_s: float = math.nan
    dwell_s: float = math.nan


@dataclass(frozen=True)
class SimTruthLog:
    records: tuple
    event_source: tuple  # record_id for each event of the stream, aligned by index
    calendar: ExclusionCalendar
    line_walks: tuple = ()  # (record_id, exact LineWalk before ms quantization)

    def of_kind(self, kind):
        return [r for r in self.records if r.kind == kind]

    def to_csv(self):
        out = [TRUTH_HEADER]
        for r in self.records:
            out.append(
                f"{r.record_id},{r.kind},{format_ms(r.t_ms)},{r.from_room},{r.to_room},"
                f"{_fmt(r.speed_cm_s)},{_fmt(r.duration_s)},{_fmt(r.dwell_s)}"
            )
        return "\n".join(out) + "\n"


def _fmt(v):
    return "" if math.isnan(v) else repr(float(v))


def stationary_distribution(sc):
    names = sc.room_names
    n = len(names)
    pos = {r: i for i, r in enumerate(names)}
    P = np.zeros((n, n))
    for a, row in sc.routing.items():
        for b, p in row.items():
            P[pos[a], pos[b]] = p
    for i in range(n):
        if P[i].sum() == 0:
            P[i, i] = 1.0
    w, v = np.linalg.eig(P.T)
    k = int(np.argmin(np.abs(w - 1.0)))
    pi = np.abs(np.real(v[:, k]))
    return dict(zip(names, pi / pi.sum()))


def shortest_path(sc, src, dst):
    if src == dst:
        return [src]
    prev = {src: None}
    frontier = [src]
    while frontier:
        nxt = []
        for a in frontier:
            for b in sc.neighbors(a):
                if b not in prev:
                    prev[b] = a
                    if b == dst:
                        path = [b]
                        while prev[path[-1]] is not None:
                            path.append(prev[path[-1]])
                        return path[::-1]
                    nxt.append(b)
        frontier = nxt
    return None


def line_walk_times(speed_cm_s, spacing_cm=DEFAULT_SPACING_CM, forward=True, n=4):
    """Exact (segment, seconds) firings of a constant-speed pass under the line."""
    segs = range(n) if forward else range(n - 1, -1, -1)
    return tuple((s, k * spacing_cm / speed_cm_s) for k, s in enumerate(segs))


class _Sim:
    def __init__(self, sc, days):
        self.sc = sc
        self.days = days
        self.rng = np.random.default_rng(sc.seed)
        self.refr = int(round(sc.sensor.refractory_s * 1000))
        self.last_fire = {}
        self.raw = []  # (t_ms, sensor_id, room, kind, segment, record_id)
        self.records = []
        self.line_walks = []
        self.day0_ms = date_to_ms(sc.start_date)
        self.line_rooms = {sc.line.room} if sc.line.room else set()
        self.dist_cache = dict(sc.distances)
        self.route_cache = {
            a: (list(row), np.cumsum(list(row.values()))) for a, row in sc.routing.items() if row
        }
        self.bedroom = sc.bedroom or sc.rooms[0].name
        self.bathroom = sc.bathroom
        self.pending_line_speed = None

    # ---- bookkeeping -------------------------------------------------
    def record(self, **kw):
        rid = len(self.records)
        self.records.append(TruthRecord(rid, **kw))
        return rid

    def latency(self):
        hi = self.sc.sensor.latency_max_ms
        return int(self.rng.integers(0, hi + 1)) if hi > 0 else 0

    def attempt(self, sensor_id, room, t_ms, rid, kind=AREA_MOTION, segment=None, refractory=True):
        t = t_ms + self.latency()
        last = self.last_fire.get(sensor_id)
        if refractory and last is not None and t - last < self.refr:
            return False
        self.last_fire[sensor_id] = t
        self.raw.append((t, sensor_id, room, kind, segment, rid))
        return True

    # ---- speed model -------------------------------------------------
    def gait_speed(self, t_ms):
        sp = self.sc.speed
        day = (t_ms - self.day0_ms) // MS_PER_DAY
        hour = ((t_ms - self.day0_ms) % MS_PER_DAY) / 3_600_000.0
        diurnal = 1.0 + sp.diurnal_amplitude * math.cos(2 * math.pi * (hour - 15.0) / 24.0)
        drift = (1.0 + sp.drift_per_day) ** day
        jitter = math.exp(sp.walk_sigma * self.rng.standard_normal()) if sp.walk_sigma > 0 else 1.0
        return sp.base_cm_s * drift * self.day_factor[day] * diurnal * jitter

    # ---- resident behaviour ------------------------------------------
    def dwell_ms(self, room, transit=False):
        r = self.sc.room(room)
        if transit:
            extra = self.sc.schedule.transit_dwell_s
            s = r.dwell_shift_s + (self.rng.exponential(extra) if extra > 0 else 0.0)
        else:
            mean = r.dwell_mean_s - r.dwell_shift_s
            s = r.dwell_shift_s + (self.rng.exponential(mean) if mean > 0 else 0.0)
        return int(round(s * 1000))

    def next_room(self, room):
        names, cum = self.route_cache[room]
        k = int(np.searchsorted(cum, self.rng.random() * cum[-1], side="right"))
        return names[min(k, len(names) - 1)]

    def stay(self, room, t_enter, t_leave, rid, asleep=False):
        """Generate the PIR attempts of one stay; entry was attempted by the caller."""
        sid = f"{room}_pir"
        r = self.sc.room(room)
        rate = self.sc.schedule.sleep_motion_rate_hz if asleep else r.motion_rate_hz
        times = []
        if rate > 0 and t_leave > t_enter:
            t = t_enter
            while True:
                t += int(round(self.rng.exponential(1.0 / rate) * 1000))
                if t >= t_leave:
                    break
                times.append(t)
        if not asleep and self.sc.sensor.prep_prob > 0 and self.rng.random() < self.sc.sensor.prep_prob:
            tau = int(round(self.rng.uniform(0.0, self.sc.sensor.prep_max_s) * 1000))
            if t_leave - tau > t_enter:
                times.append(t_leave - tau)
        for t in sorted(times):
            self.attempt(sid, room, t, rid)

    def enter(self, room, t_ms, rid):
        if self.sc.sensor.miss_prob > 0 and self.rng.random() < self.sc.sensor.miss_prob:
            return
        self.attempt(f"{room}_pir", room, t_ms, rid)

    def depart(self, room, t_ms, rid):
        self.attempt(f"{room}_pir", room, t_ms, rid)

    def walk(self, src, dst, t_leave):
        """Move src->dst starting at t_leave; returns arrival time."""
        v = self.gait_speed(t_leave)
        sp = self.sc.speed
        v_move = v
        if sp.hurry_prob > 0 and self.rng.random() < sp.hurry_prob:
            v_move = v * self.rng.uniform(*sp.hurry_factor)
        move_ms = int(round(self.dist_cache[(src, dst)] / v_move * 1000))
        self.record(kind="walk", t_ms=t_leave, from_room=src, to_room=dst,
                    speed_cm_s=v_move, duration_s=move_ms / 1000.0)
        self.pending_line_speed = v
        return t_leave + move_ms

    def line_pass(self, t_start, v):
        ln = self.sc.line
        forward = bool(self.rng.random() < 0.5)
        rid = self.record(kind="line", t_ms=t_start, from_room=ln.room, to_room=ln.room, speed_cm_s=v)
        exact = line_walk_times(v, ln.spacing_cm, forward)
        offsets = [s for _, s in exact]
        if ln.glitch_prob > 0 and self.rng.random() < ln.glitch_prob:
            offsets = [k * self.rng.uniform(0.05, 0.15) for k in range(len(offsets))]
        elif ln.pause_prob > 0 and self.rng.random() < ln.pause_prob:
            cut = int(self.rng.integers(1, len(offsets)))
            pause = self.rng.uniform(0.5, 2.5)
            offsets = [s + (pause if k >= cut else 0.0) for k, s in enumerate(offsets)]
        else:
            self.line_walks.append((rid, LineWalk(t_start, exact)))
        for (seg, _), off in zip(exact, offsets):
            self.attempt(f"line{seg}", ln.room, t_start + int(round(off * 1000)), rid,
                         kind=LINE_SEGMENT, segment=seg)
        return t_start + int(round(offsets[-1] * 1000))

    def arrive_and_stay(self, room, t_arrive, dwell_ms, asleep=False):
        rid = self.record(kind="stay", t_ms=t_arrive, from_room=room, to_room=room,
                          dwell_s=dwell_ms / 1000.0)
        self.enter(room, t_arrive, rid)
        t_leave = t_arrive + dwell_ms
        v = self.pending_line_speed
        if room in self.line_rooms and v is not None and not asleep:
            if self.rng.random() < self.sc.line.pass_prob:
                t_start = t_arrive + int(round(self.rng.uniform(0.3, 1.0) * 1000))
                t_end = self.line_pass(t_start, v)
                t_leave = max(t_leave, t_end + 500)
        self.pending_line_speed = None
        self.stay(room, t_arrive, t_leave, rid, asleep=asleep)
        return t_leave, rid

    def route(self, src, dst, t):
        """Walk a shortest path with brief transit stays; returns (room, arrival time)."""
        path = shortest_path(self.sc, src, dst) or [src]
        room = src
        for k, nxt in enumerate(path[1:], start=1):
            self.depart(room, t, self.current_rid)
            t = self.walk(room, nxt, t)
            room = nxt
            if k < len(path) - 1:
                t, self.current_rid = self.arrive_and_stay(room, t, self.dwell_ms(room, transit=True))
        return room, t

    def run(self):
        sc = self.sc
        sch = sc.schedule
        sp = sc.speed
        d = self.days
        # one spare day: the last night's activity runs past the final midnight
        logf = np.empty(d + 1)
        if sp.day_sigma > 0:
            innov = self.rng.standard_normal(d + 1)
            logf[0] = sp.day_sigma * innov[0]
            scale = sp.day_sigma * math.sqrt(max(0.0, 1.0 - sp.day_ar ** 2))
            for k in range(1, d + 1):
                logf[k] = sp.day_ar * logf[k - 1] + scale * innov[k]
        else:
            logf[:] = 0.0
        self.day_factor = np.exp(logf)

        special = {}
        for k in range(d):
            u = self.rng.random()
            if u < sc.outage_day_rate:
                special[k] = "sensor_outage"
            elif u < sc.outage_day_rate + sc.visitor_day_rate:
                special[k] = "visitor"

        mobile = bool(self.route_cache)
        room = self.bedroom
        self.current_rid = self.record(kind="stay", t_ms=self.day0_ms, from_room=room, to_room=room)
        self.enter(room, self.day0_ms, self.current_rid)
        t = self.day0_ms
        for k in range(d):
            day_start = self.day0_ms + k * MS_PER_DAY
            wake = day_start + int(round((sch.wake_hour + sch.jitter_h * self.rng.standard_normal()) * 3_600_000))
            sleep = day_start + int(round((sch.sleep_hour + sch.jitter_h * self.rng.standard_normal()) * 3_600_000))
            wake = max(wake, t + 1000)
            # asleep in the bedroom until wake
            self.stay(room, t, wake, self.current_rid, asleep=True)
            t = wake
            if not mobile:
                self.stay(room, t, sleep, self.current_rid)
                t = max(t, sleep)
                continue
            while True:
                nxt = self.next_room(room)
                self.depart(room, t, self.current_rid)
                t = self.walk(room, nxt, t)
                room = nxt
                t, self.current_rid = self.arrive_and_stay(room, t, self.dwell_ms(room))
                if t >= sleep:
                    break
            if room != self.bedroom:
                room, t = self.route(room, self.bedroom, t)
                self.current_rid = self.record(kind="stay", t_ms=t, from_room=room, to_room=room)
                self.enter(room, t, self.current_rid)
            # optional night bathroom trip
            next_wake = day_start + MS_PER_DAY + int(round(sch.wake_hour * 3_600_000))
            if self.bathroom and self.bathroom != self.bedroom and self.rng.random() < sch.night_trip_prob:
                t_trip = int(round(self.rng.uniform(t + 1_800_000, max(t + 1_800_001, next_wake - 3_600_000))))
                self.stay(room, t, t_trip, self.current_rid, asleep=True)
                room, t = self.route(room, self.bathroom, t_trip)
                t, self.current_rid = self.arrive_and_stay(room, t, self.dwell_ms(room))
                room, t = self.route(room, self.bedroom, t)
                self.current_rid = self.record(kind="stay", t_ms=t, from_room=room, to_room=room)
                self.enter(room, t, self.current_rid)

        end_ms = self.day0_ms + d * MS_PER_DAY
        guests = self._guest_events(special)
        raw = [e for e in self.raw + guests if e[0] < end_ms]
        outage = {k for k, why in special.items() if why == "sensor_outage"}
        raw = [e for e in raw if (e[0] - self.day0_ms) // MS_PER_DAY not in outage]
        raw.sort(key=lambda e: (e[0], e[1]))
        if guests:
            raw = _enforce_refractory(raw, self.refr)
        events = tuple(SensorEvent(t, s, r, kind, seg) for t, s, r, kind, seg, _ in raw)
        stream = EventStream(sc.home_id, events, sc.utc_offset_min)
        calendar = ExclusionCalendar(
            {sc.start_date + timedelta(days=k): why for k, why in sorted(special.items())}
        )
        truth = SimTruthLog(
            records=tuple(self.records),
            event_source=tuple(e[5] for e in raw),
            calendar=calendar,
            line_walks=tuple(self.line_walks),
        )
        return stream, truth

    def _guest_events(self, special):
        """Firings caused by a visitor in random rooms on visitor days (calendar-excluded)."""
        out = []
        names = self.sc.room_names
        for k, why in sorted(special.items()):
            if why != "visitor":
                continue
            start = self.day0_ms + k * MS_PER_DAY + 8 * 3_600_000
            rid = self.record(kind="guest", t_ms=start)
            t = start
            while t < start + 12 * 3_600_000:
                t += int(round(self.rng.exponential(180.0) * 1000))
                room = names[int(self.rng.integers(len(names)))]
                out.append((t, f"{room}_pir", room, AREA_MOTION, None, rid))
        return out


def _enforce_refractory(raw, refr_ms):
    """Drop firings that land within the refractory window of the same sensor's previous one."""
    last = {}
    out = []
    for e in raw:
        prev = last.get(e[1])
        if prev is not None and e[0] - prev < refr_ms:
            continue
        last[e[1]] = e[0]
        out.append(e)
    return out


def simulate(scenario, days):
    """Run ``scenario`` for ``days`` days; returns (EventStream, SimTruthLog)."""
    if days < 1:
        raise ValueError("days must be >= 1")
    validate_scenario(scenario)
    return _Sim(scenario, int(days)).run()


# ---- cohort generation ----------------------------------------------------

# (dwell shift s, dwell mean s, routing attractiveness)
ROOM_KINDS = {
    "bedroom": (5.0, 600.0, 2.0),
    "bathroom": (20.0, 300.0, 2.5),
    "kitchen": (5.0, 500.0, 3.0),
    "living": (5.0, 900.0, 3.0),
    "hallway": (1.0, 4.0, 2.0),
    "dining": (5.0, 400.0, 1.5),
    "other": (5.0, 400.0, 1.0),
    "guest": (5.0, 300.0, 0.4),
}
EXTRA_ROOMS = (
    ("dining", "dining"), ("office", "other"), ("guest", "guest"), ("laundry", "other"),
    ("closet", "other"), ("den", "other"), ("bedroom2", "guest"), ("bathroom2", "other"),
    ("porch", "other"), ("pantry", "other"), ("sunroom", "other"), ("garage", "guest"),
)
TARGET_TRANSITIONS_PER_DAY = 121.0
TARGET_LINE_WALKS_PER_DAY = 6.0
COHORT_MEAN_SPEED = 55.3
COHORT_SD_SPEED = 33.8
MIN_BASE_SPEED = 25.0
MAX_BASE_SPEED = 115.0


def _stratified(rng, n, ppf):
    """n draws from a distribution via stratified quantiles, in shuffled order."""
    u = (rng.permutation(n) + rng.random(n)) / n
    return ppf(u)


def room_counts(rng, n):
    """Room counts in [3, 16]; stratified so the cohort mean lands near 5.7."""
    x = _stratified(rng, n, lambda u: stats.gamma.ppf(u, a=1.5, scale=1.8))
    return np.clip(np.rint(3.0 + x), 3, 16).astype(int)


def base_speeds(rng, n):
    """Per-resident base speeds, right-skewed on [25, 115] cm/s."""
    x = _stratified(rng, n, lambda u: stats.gamma.ppf(u, a=1.1, scale=29.0))
    return np.clip(MIN_BASE_SPEED + x, MIN_BASE_SPEED, MAX_BASE_SPEED)


def floor_plan(rng, n_rooms):
    """Room list and undirected adjacency for a home with ``n_rooms`` rooms."""
    if n_rooms == 3:
        rooms = [("bedroom", "bedroom"), ("bathroom", "bathroom"), ("living", "living")]
        edges = [("living", "bedroom"), ("living", "bathroom")]
        return rooms, edges
    rooms = [("bedroom", "bedroom"), ("bathroom", "bathroom"), ("kitchen", "kitchen"), ("living", "living")]
    if n_rooms == 4:
        edges = [("living", "bedroom"), ("living", "bathroom"), ("living", "kitchen")]
        return rooms, edges
    rooms.append(("hallway", "hallway"))
    edges = [("hallway", "bedroom"), ("hallway", "bathroom"), ("hallway", "living"), ("living", "kitchen")]
    if rng.random() < 0.5:
        edges.append(("bedroom", "bathroom"))
    hubs = ["hallway", "living", "kitchen"]
    for name, kind in EXTRA_ROOMS[: n_rooms - 5]:
        if name == "dining":
            anchor = "kitchen"
        else:
            anchor = hubs[int(rng.integers(len(hubs)))]
        rooms.append((name, kind))
        edges.append((anchor, name))
    return rooms, edges


def make_scenario(home_id, n_rooms, base_speed, seed, rng=None, **overrides):
    """Build a calibrated scenario: dwell means are scaled so the resident makes
    about 121 room transitions per waking day, and the line pass probability
    gives about 6 line walks per day."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    kinds, edges = floor_plan(rng, n_rooms)
    distances = {}
    for a, b in edges:
        d = float(np.round(rng.uniform(200.0, 450.0), 1))
        distances[(a, b)] = d
        distances[(b, a)] = d
    attract = {name: ROOM_KINDS[kind][2] for name, kind in kinds}
    routing = {}
    for name, _ in kinds:
        nb = sorted(b for (a, b) in distances if a == name)
        w = np.array([attract[b] for b in nb])
        w = w / w.sum()
        routing[name] = {b: float(p) for b, p in zip(nb, w)}
        # exact unit sum
        last = nb[-1]
        routing[name][last] = 1.0 - sum(v for k, v in routing[name].items() if k != last)
    rooms = [
        Room(name, kind, ROOM_KINDS[kind][0], ROOM_KINDS[kind][1]) for name, kind in kinds
    ]
    line_room = "hallway" if n_rooms >= 5 else "living"
    sched = overrides.pop("schedule", Schedule())
    speed = overrides.pop("speed", SpeedModel(
        base_cm_s=float(base_speed), walk_sigma=0.05, day_sigma=0.15, day_ar=0.5,
        diurnal_amplitude=0.04, hurry_prob=0.15,
    ))
    sensor = overrides.pop("sensor", SensorModel(
        refractory_s=6.0, latency_max_ms=200, miss_prob=0.02, prep_prob=0.8, prep_max_s=8.0,
    ))
    sc = SimScenario(
        home_id=home_id, rooms=tuple(rooms), distances=distances, routing=routing,
        speed=speed, sensor=sensor, schedule=sched,
        line=LineModel(room=line_room), bedroom="bedroom", bathroom="bathroom", seed=seed,
    )
    pi = stationary_distribution(sc)
    awake_s = (sched.sleep_hour - sched.wake_hour) * 3600.0
    mean_move = float(np.mean(list(distances.values()))) / base_speed
    budget = awake_s / TARGET_TRANSITIONS_PER_DAY - mean_move
    fixed = sum(pi[r.name] * r.dwell_mean_s for r in rooms if r.kind == "hallway")
    scalable = sum(pi[r.name] * r.dwell_mean_s for r in rooms if r.kind != "hallway")
    scale = max(0.05, (budget - fixed) / scalable)
    rooms = tuple(
        r if r.kind == "hallway" else replace(r, dwell_mean_s=max(r.dwell_shift_s, r.dwell_mean_s * scale))
        for r in rooms
    )
    pass_prob = min(1.0, TARGET_LINE_WALKS_PER_DAY / (pi[line_room] * TARGET_TRANSITIONS_PER_DAY))
    line = overrides.pop("line", LineModel(room=line_room, pass_prob=pass_prob,
                                           glitch_prob=0.02, pause_prob=0.02))
    defaults = dict(visitor_day_rate=0.02, outage_day_rate=0.01)
    defaults.update(overrides)
    return replace(sc, rooms=rooms, line=line, **defaults)


def cohort(scenarios, base_seed=0, **overrides):
    """Deterministic family of ``scenarios`` homes with varied floor plans and speeds."""
    if scenarios < 1:
        raise ValueError("scenarios must be >= 1")
    seq = np.random.SeedSequence(base_seed)
    rng = np.random.default_rng(seq.spawn(1)[0])
    counts = room_counts(rng, scenarios)
    speeds = base_speeds(rng, scenarios)
    seeds = [int(s.generate_state(1)[0]) for s in seq.spawn(scenarios + 1)[1:]]
    return [
        make_scenario(f"home{k:03d}", int(counts[k]), float(speeds[k]), seeds[k], **overrides)
        for k in range(scenarios)
    ]


def default_scenario(seed=0, n_rooms=6, base_speed=60.0, **overrides):
    return make_scenario("home000", n_rooms, base_speed, seed, **overrides)


def noise_free(sc, speed=None):
    """Copy of ``sc`` with every stochastic confound switched off.

    Constant walking speed, no latency, misses, in-room motion, get-up
    firings, hurried walks, line corruption, guests or outages, and every
    dwell at least one refractory period plus a second, so each departure
    fires and each extracted transition is exactly one scripted walk.
    """
    floor = sc.sensor.refractory_s + 1.0
    rooms = tuple(
        replace(r, motion_rate_hz=0.0, dwell_shift_s=max(r.dwell_shift_s, floor),
                dwell_mean_s=max(r.dwell_mean_s, floor))
        for r in sc.rooms
    )
    base = sc.speed.base_cm_s if speed is None else float(speed)
    return replace(
        sc,
        rooms=rooms,
        speed=SpeedModel(base_cm_s=base, walk_sigma=0.0, day_sigma=0.0, drift_per_day=0.0,
                         diurnal_amplitude=0.0, hurry_prob=0.0),
        sensor=replace(sc.sensor, latency_max_ms=0, miss_prob=0.0, prep_prob=0.0),
        line=replace(sc.line, glitch_prob=0.0, pause_prob=0.0),
        schedule=replace(sc.schedule, sleep_motion_rate_hz=0.0),
        visitor_day_rate=0.0,
        outage_day_rate=0.0,
    )
