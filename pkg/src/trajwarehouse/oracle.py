"""Brute-force twins of the warehouse queries.

These walk the pre-warehouse domain objects with plain nested loops and never
touch a bundle, so any drift between the loader/engine and the intended
semantics shows up as a mismatch.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

from .core import AdminPlace, Mic, PoiKind, PointOfInterest, Trajectory
from .errors import NegativeThreshold, QueryWarning
from .query import LOCATION, TRAJECTORY, Column, QueryResult, RollupResult, check_levels, norm, parse_kind


@dataclass(frozen=True)
class ObjectGraph:
    trajectories: Sequence[Trajectory] = ()
    gazetteer: Sequence[PointOfInterest] = ()
    admin_places: Sequence[AdminPlace] = ()
    mics: Sequence[Mic] = field(default=())


def _find_poi(graph: ObjectGraph, poi_id: str):
    for p in graph.gazetteer:
        if p.poi_id == poi_id:
            return p
    raise KeyError(poi_id)


def _admin_of(graph: ObjectGraph, delegation_id: str) -> AdminPlace:
    for place in graph.admin_places:
        if place.delegation.delegation_id == delegation_id:
            return place
    raise KeyError(delegation_id)


def _location(graph: ObjectGraph, poi: PointOfInterest) -> str:
    if "location" in poi.attrs and poi.attrs["location"]:
        return poi.attrs["location"]
    return _admin_of(graph, poi.delegation_id).delegation.name


def _pois_of(graph: ObjectGraph, traj: Trajectory) -> list[PointOfInterest]:
    seen = []
    for stop in traj.stops:
        for poi_id in sorted(stop.nearby_poi_ids):
            poi = _find_poi(graph, poi_id)
            if poi not in seen:
                seen.append(poi)
    return seen


def _trajectory(graph: ObjectGraph, trajectory_id):
    for t in graph.trajectories:
        if t.trajectory_id == trajectory_id:
            return t
    return None


def _places(graph, trajectory_id, kind, country_name=None) -> QueryResult:
    traj = _trajectory(graph, trajectory_id)
    if traj is None:
        warnings.warn(f"unknown trajectory {trajectory_id!r}", QueryWarning, stacklevel=3)
        return QueryResult(LOCATION, ())
    found = []
    for poi in _pois_of(graph, traj):
        if poi.kind != kind:
            continue
        if country_name is not None and norm(_admin_of(graph, poi.delegation_id).country.name) != norm(country_name):
            continue
        loc = _location(graph, poi)
        if (loc,) not in found:
            found.append((loc,))
    return QueryResult(LOCATION, tuple(found))


def oracle_q1(graph: ObjectGraph, trajectory_id: int, country_name: str) -> QueryResult:
    return _places(graph, trajectory_id, PoiKind.TOURISTIC, country_name)


def oracle_q2(graph: ObjectGraph, country_name: str, delegation_name: str) -> int:
    known = False
    for place in graph.admin_places:
        if norm(place.delegation.name) == norm(delegation_name) and norm(place.country.name) == norm(country_name):
            known = True
    if not known:
        warnings.warn(f"unknown delegation {delegation_name!r} in {country_name!r}", QueryWarning, stacklevel=2)
        return 0
    count = 0
    for poi in graph.gazetteer:
        if poi.kind is not PoiKind.AGRICULTURAL:
            continue
        place = _admin_of(graph, poi.delegation_id)
        if norm(place.delegation.name) == norm(delegation_name) and norm(place.country.name) == norm(country_name):
            count += 1
    return count


def oracle_q3(graph: ObjectGraph, trajectory_id: int) -> QueryResult:
    return _places(graph, trajectory_id, PoiKind.LAKE)


def oracle_q4(graph: ObjectGraph) -> QueryResult:
    ids = []
    for traj in graph.trajectories:
        kinds = [p.kind for p in _pois_of(graph, traj)]
        if PoiKind.SEA in kinds and PoiKind.TOURISTIC in kinds:
            ids.append(traj.trajectory_id)
    ids.sort()
    return QueryResult(TRAJECTORY, tuple((i,) for i in ids), ordering=("trajectory_id",))


def oracle_q5(graph: ObjectGraph, location_name: str, category: str = "hotel", star_type: str = "5stars") -> QueryResult:
    rows = []
    for poi in graph.gazetteer:
        if poi.kind is not PoiKind.TOURISTIC:
            continue
        if norm(poi.attrs.get("category", "")) != norm(category):
            continue
        if norm(poi.attrs.get("type", "")) != norm(star_type):
            continue
        if norm(_location(graph, poi)) != norm(location_name):
            continue
        rows.append((poi.name, poi.poi_id))
    return QueryResult((Column("name", "text"), Column("id", "text")), tuple(sorted(rows)), ordering=("name", "id"))


def oracle_q6(graph: ObjectGraph, threshold: int = 10) -> QueryResult:
    if threshold < 0:
        raise NegativeThreshold(f"threshold must be non-negative, got {threshold}")
    ids = []
    for traj in graph.trajectories:
        n = 0
        for poi in _pois_of(graph, traj):
            if poi.kind is PoiKind.TOURISTIC:
                n += 1
        if n > threshold:
            ids.append(traj.trajectory_id)
    return QueryResult(TRAJECTORY, tuple((i,) for i in sorted(ids)), ordering=("trajectory_id",))


def oracle_rollup(graph: ObjectGraph, levels: Sequence[str], kind: Union[PoiKind, str]) -> RollupResult:
    kind = parse_kind(kind)
    levels = check_levels(levels)

    def key_of(place: AdminPlace):
        ids, names = [], []
        for level in levels:
            if level == "country":
                ids.append(place.country.country_id)
                names.append(place.country.name)
            else:
                ids.append(place.delegation.delegation_id)
                names.append(place.delegation.name)
        return tuple(ids), tuple(names)

    groups, labels = {}, {}
    for place in graph.admin_places:
        key, names = key_of(place)
        if key not in groups:
            groups[key] = 0
            labels[key] = names
    for poi in graph.gazetteer:
        if poi.kind is kind:
            key, _ = key_of(_admin_of(graph, poi.delegation_id))
            groups[key] += 1
    total = 0
    for v in groups.values():
        total += v
    return RollupResult(levels, kind, groups, labels, total)
