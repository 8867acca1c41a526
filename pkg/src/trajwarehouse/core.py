"""Domain types shared by every module: places, fixes, stops, moves, trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .errors import AlternationViolation, EmptyTrajectory, InvariantViolation

EARTH_RADIUS_M = 6_371_008.8


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise InvariantViolation(f"non-finite coordinate {self.lat}, {self.lon}")
        if not -90.0 <= self.lat <= 90.0:
            raise InvariantViolation(f"latitude {self.lat} out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise InvariantViolation(f"longitude {self.lon} out of range")


@dataclass(frozen=True)
class TimeInterval:
    """Closed interval of integer UTC seconds."""

    t_begin: int
    t_end: int

    def __post_init__(self) -> None:
        if self.t_begin > self.t_end:
            raise InvariantViolation(f"interval begins after it ends: {self.t_begin} > {self.t_end}")

    def duration(self) -> int:
        return self.t_end - self.t_begin

    def overlaps(self, other: TimeInterval) -> bool:
        return self.t_begin <= other.t_end and other.t_begin <= self.t_end


def duration(interval: TimeInterval) -> int:
    """Life cycle of an interval: ``t_end - t_begin`` in seconds."""
    return interval.t_end - interval.t_begin


def geo_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in metres (haversine, spherical Earth)."""
    lat1, lat2 = math.radians(a.lat), math.radians(b.lat)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def geo_distances(origin: GeoPoint, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    """Vectorised haversine from one point to many."""
    lat1 = np.radians(origin.lat)
    lat2 = np.radians(np.asarray(lats, dtype=float))
    dlat = lat2 - lat1
    dlon = np.radians(np.asarray(lons, dtype=float) - origin.lon)
    h = np.sin(dlat / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_M * np.arcsin(np.minimum(1.0, np.sqrt(h)))


@dataclass(frozen=True)
class GpsFix:
    mic_id: str
    t: int
    pos: GeoPoint


class StopKind(str, Enum):
    PLANNED = "Planned"
    PRIVATE = "Private"
    UNFORESEEN = "Unforeseen"


@dataclass(frozen=True)
class Stop:
    stop_id: str
    interval: TimeInterval
    centroid: GeoPoint
    kind: StopKind = StopKind.PRIVATE
    delegation_id: Optional[str] = None
    nearby_poi_ids: frozenset[str] = frozenset()
    # zero-dwell stop closing a trace that starts or ends mid-move
    synthetic: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.nearby_poi_ids, frozenset):
            object.__setattr__(self, "nearby_poi_ids", frozenset(self.nearby_poi_ids))


@dataclass(frozen=True)
class Move:
    move_id: str
    interval: TimeInterval
    path: tuple[GpsFix, ...]

    def __post_init__(self) -> None:
        path = tuple(self.path)
        object.__setattr__(self, "path", path)
        if not path:
            raise InvariantViolation(f"move {self.move_id} has an empty path")
        for prev, nxt in zip(path, path[1:]):
            if nxt.t <= prev.t:
                raise InvariantViolation(f"move {self.move_id} path is not time-ordered")
        if path[0].t != self.interval.t_begin or path[-1].t != self.interval.t_end:
            raise InvariantViolation(f"move {self.move_id} path does not span its interval")

    @property
    def duration(self) -> int:
        return self.interval.duration()


@dataclass(frozen=True)
class TrajectorySection:
    section_id: str
    from_stop: Stop
    move: Move
    to_stop: Stop
    interval: TimeInterval

    def __post_init__(self) -> None:
        a, m, b = self.from_stop.interval, self.move.interval, self.to_stop.interval
        if not (a.t_end <= m.t_begin <= m.t_end <= b.t_begin):
            raise AlternationViolation(
                f"section {self.section_id}: stop/move/stop timestamps overlap "
                f"({a.t_end}, {m.t_begin}, {m.t_end}, {b.t_begin})"
            )


@dataclass(frozen=True)
class Trajectory:
    """Ordered alternation of stops and moves, stored as sections sharing boundary stops.

    A trace where nothing but a single stop was observed has no sections; its
    stop is kept in ``lone_stop``.
    """

    trajectory_id: int
    mic_id: str
    sections: tuple[TrajectorySection, ...]
    interval: TimeInterval
    lone_stop: Optional[Stop] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "sections", tuple(self.sections))
        if self.sections and self.lone_stop is not None:
            raise InvariantViolation("a trajectory with sections cannot carry a lone stop")
        if not self.sections and self.lone_stop is None:
            raise EmptyTrajectory(f"trajectory {self.trajectory_id} has neither sections nor a stop")
        for left, right in zip(self.sections, self.sections[1:]):
            if left.to_stop != right.from_stop:
                raise AlternationViolation(
                    f"trajectory {self.trajectory_id}: sections {left.section_id} and "
                    f"{right.section_id} do not share a boundary stop"
                )
        stops = self.stops
        if self.interval != TimeInterval(stops[0].interval.t_begin, stops[-1].interval.t_end):
            raise InvariantViolation(f"trajectory {self.trajectory_id} interval does not span its stops")

    @property
    def stops(self) -> tuple[Stop, ...]:
        if not self.sections:
            return (self.lone_stop,)
        return (self.sections[0].from_stop,) + tuple(s.to_stop for s in self.sections)

    @property
    def moves(self) -> tuple[Move, ...]:
        return tuple(s.move for s in self.sections)

    def flatten(self) -> Iterator[Stop | Move]:
        stops = self.stops
        yield stops[0]
        for section in self.sections:
            yield section.move
            yield section.to_stop

    def map_stops(self, fn) -> Trajectory:
        """Return a copy with every stop replaced by ``fn(stop)`` (shared stops stay shared)."""
        new_stops = [fn(s) for s in self.stops]
        if not self.sections:
            return Trajectory(self.trajectory_id, self.mic_id, (), self.interval, lone_stop=new_stops[0])
        return assemble_trajectory(
            self.mic_id, new_stops, self.moves, trajectory_id=self.trajectory_id,
            section_ids=[s.section_id for s in self.sections],
        )


def assemble_trajectory(
    mic_id: str,
    stops: Sequence[Stop],
    moves: Sequence[Move],
    trajectory_id: int = 0,
    section_ids: Optional[Sequence[str]] = None,
) -> Trajectory:
    """Pair consecutive stops with the move between them.

    Section intervals tile the trajectory: each section runs from the start of
    its first stop to the start of its second, and the last section extends to
    the end of the final stop.
    """
    stops, moves = list(stops), list(moves)
    if not moves:
        raise EmptyTrajectory(f"trajectory {trajectory_id} has no moves")
    if len(stops) != len(moves) + 1:
        raise AlternationViolation(f"{len(stops)} stops cannot alternate with {len(moves)} moves")
    if section_ids is None:
        section_ids = [f"{trajectory_id}-sec{i}" for i in range(len(moves))]
    sections = []
    for i, move in enumerate(moves):
        a, b = stops[i], stops[i + 1]
        last = i == len(moves) - 1
        end = b.interval.t_end if last else b.interval.t_begin
        if a.interval.t_begin > end:
            raise AlternationViolation(f"stop {a.stop_id} begins after stop {b.stop_id}")
        sections.append(TrajectorySection(section_ids[i], a, move, b, TimeInterval(a.interval.t_begin, end)))
    interval = TimeInterval(stops[0].interval.t_begin, stops[-1].interval.t_end)
    return Trajectory(trajectory_id, mic_id, tuple(sections), interval)


# --- actors --------------------------------------------------------------

MAX_AUTH_ATTEMPTS = 3


@dataclass(frozen=True)
class AuthAttempt:
    t: int
    outcome: str  # "success" | "error"

    def __post_init__(self) -> None:
        if self.outcome not in ("success", "error"):
            raise InvariantViolation(f"unknown authentication outcome {self.outcome!r}")


@dataclass(frozen=True)
class Capability:
    """Scores from 0 to 100 assigned by the head of the mission."""

    moving: int = 0
    communication: int = 0
    knowledge: int = 0

    def __post_init__(self) -> None:
        for name in ("moving", "communication", "knowledge"):
            v = getattr(self, name)
            if not (isinstance(v, int) and 0 <= v <= 100):
                raise InvariantViolation(f"capability {name}={v!r} outside 0..100")


@dataclass(frozen=True)
class MeanOfTransport:
    transport_id: str
    color: str
    v_min: float
    v_max: float

    def __post_init__(self) -> None:
        if not 0 <= self.v_min <= self.v_max:
            raise InvariantViolation(f"transport {self.transport_id}: need 0 <= v_min <= v_max")


@dataclass(frozen=True)
class Mic:
    mic_id: str
    first_name: str
    last_name: str
    pda_id: str = ""
    auth_key: str = ""
    auth_history: tuple[AuthAttempt, ...] = ()
    capability: Capability = field(default_factory=Capability)
    transport: Optional[MeanOfTransport] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "auth_history", tuple(self.auth_history))
        run = 0
        for attempt in self.auth_history:
            run = run + 1 if attempt.outcome == "error" else 0
            if run > MAX_AUTH_ATTEMPTS:
                raise InvariantViolation(
                    f"mic {self.mic_id}: more than {MAX_AUTH_ATTEMPTS} consecutive failed authentications"
                )

    @property
    def locked_out(self) -> bool:
        tail = 0
        for attempt in reversed(self.auth_history):
            if attempt.outcome != "error":
                break
            tail += 1
        return tail >= MAX_AUTH_ATTEMPTS


# --- places --------------------------------------------------------------


@dataclass(frozen=True)
class Country:
    country_id: str
    name: str
    population: int = 0


@dataclass(frozen=True)
class RegionalGovernment:
    rg_id: str
    name: str


@dataclass(frozen=True)
class Delegation:
    delegation_id: str
    name: str
    surface_km2: float = 0.0
    population: int = 0
    climate: str = ""


@dataclass(frozen=True)
class AdminPlace:
    """One delegation with its regional government and country."""

    delegation: Delegation
    regional_government: RegionalGovernment
    country: Country


def check_admin_hierarchy(places: Sequence[AdminPlace]) -> None:
    """Each delegation sits in one regional government, each regional government in one country."""
    rg_country: dict[str, str] = {}
    deleg_rg: dict[str, str] = {}
    for p in places:
        d, rg, c = p.delegation.delegation_id, p.regional_government.rg_id, p.country.country_id
        if deleg_rg.setdefault(d, rg) != rg:
            raise InvariantViolation(f"delegation {d} belongs to two regional governments")
        if rg_country.setdefault(rg, c) != c:
            raise InvariantViolation(f"regional government {rg} belongs to two countries")


class PoiKind(str, Enum):
    SEA = "Sea"
    LAKE = "Lake"
    MOUNTAIN = "Mountain"
    DESERT = "Desert"
    EDUCATIONAL = "Educational"
    INDUSTRIAL = "Industrial"
    AGRICULTURAL = "Agricultural"
    TRANSPORTATION = "Transportation"
    HEALTHCARE = "Healthcare"
    TOURISTIC = "Touristic"
    CULT_ART = "CultArt"
    FINANCIAL = "Financial"

    @property
    def natural(self) -> bool:
        return self in NATURAL_KINDS

    @property
    def family(self) -> str:
        return "Natural" if self.natural else "Artificial"

    @classmethod
    def parse(cls, text: str) -> PoiKind:
        key = text.strip().replace("-", "").replace("_", "").replace(" ", "").casefold()
        for kind in cls:
            if kind.value.casefold() == key or kind.name.replace("_", "").casefold() == key:
                return kind
        raise ValueError(f"unknown point-of-interest kind {text!r}")


NATURAL_KINDS = frozenset({PoiKind.SEA, PoiKind.LAKE, PoiKind.MOUNTAIN, PoiKind.DESERT})
ARTIFICIAL_KINDS = frozenset(PoiKind) - NATURAL_KINDS


@dataclass(frozen=True)
class PointOfInterest:
    poi_id: str
    kind: PoiKind
    name: str
    pos: GeoPoint
    delegation_id: str
    attrs: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        # frozen + hashable: store attrs as a sorted tuple-backed dict copy
        object.__setattr__(self, "attrs", dict(sorted(dict(self.attrs).items())))

    def __hash__(self) -> int:
        return hash((self.poi_id, self.kind, self.name, self.pos, self.delegation_id, tuple(self.attrs.items())))
