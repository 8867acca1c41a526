"""Named analytical queries and the POI rollup, evaluated against a warehouse bundle.

A trajectory "contains" a point of interest when the POI sits near one of
its stops (the ``bridge_fact_poi`` link). Country, delegation and location
names match case-insensitively after trimming.
"""

from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

from .core import PoiKind
from .errors import NegativeThreshold, QueryWarning, UnknownKind
from .warehouse import SUBTYPE_TABLE, WarehouseBundle

LEVELS = ("country", "delegation")


def norm(name: str) -> str:
    return name.strip().casefold()


@dataclass(frozen=True)
class Column:
    name: str
    type: str  # text | integer | real


@dataclass(frozen=True)
class QueryResult:
    columns: tuple[Column, ...]
    rows: tuple[tuple, ...]
    ordering: Union[str, tuple[str, ...]] = "unordered"

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row {row!r} does not match {len(self.columns)} columns")

    def canonical(self) -> tuple[tuple, ...]:
        return tuple(sorted(self.rows))

    def column(self, name: str) -> list:
        i = [c.name for c in self.columns].index(name)
        return [r[i] for r in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class RollupResult:
    levels: tuple[str, ...]
    kind: PoiKind
    # group key (natural ids, one per level) -> count
    groups: dict[tuple[str, ...], int]
    # group key -> display names
    labels: dict[tuple[str, ...], tuple[str, ...]]
    grand_total: int


LOCATION = (Column("location", "text"),)
TRAJECTORY = (Column("trajectory_id", "integer"),)


def parse_kind(kind: Union[PoiKind, str]) -> PoiKind:
    if isinstance(kind, PoiKind):
        return kind
    try:
        return PoiKind.parse(kind)
    except ValueError as exc:
        raise UnknownKind(str(exc)) from exc


def check_levels(levels: Sequence[str]) -> tuple[str, ...]:
    levels = tuple(norm(level) for level in levels)
    if not levels:
        raise ValueError("rollup needs at least one level")
    positions = [LEVELS.index(level) if level in LEVELS else -1 for level in levels]
    if -1 in positions or positions != sorted(set(positions)):
        raise ValueError(f"levels must be an ordered subsequence of {LEVELS}, got {levels}")
    return levels


class _Index:
    """Hash lookups over the bundle's tables, built on first use."""

    def __init__(self, bundle: WarehouseBundle) -> None:
        self.b = bundle
        self._subtypes: dict[str, dict] = {}

    @cached_property
    def countries(self):
        return self.b["dim_country"].by_key()

    @cached_property
    def rgs(self):
        return self.b["dim_regional_government"].by_key()

    @cached_property
    def delegations(self):
        return self.b["dim_delegation"].by_key()

    @cached_property
    def pois(self):
        return self.b["dim_poi"].by_key()

    @cached_property
    def facts_by_trajectory(self):
        return {r["trajectory_id"]: r for r in self.b["fact_trajectory"].records()}

    @cached_property
    def fact_pois(self) -> dict[int, list[int]]:
        out = defaultdict(list)
        for fact_key, poi_key in self.b["bridge_fact_poi"].rows:
            out[fact_key].append(poi_key)
        return out

    def subtype(self, table: str) -> dict:
        if table not in self._subtypes:
            self._subtypes[table] = self.b[table].by_key()
        return self._subtypes[table]

    def country_of_delegation(self, delegation_key: int) -> dict:
        d = self.delegations[delegation_key]
        return self.countries[self.rgs[d["regional_government_key"]]["country_key"]]

    def subtype_row(self, poi: dict) -> dict:
        return self.subtype(poi["subtype_table"])[poi["subtype_key"]]

    def linked_pois(self, fact_key: int, kind: PoiKind) -> list[dict]:
        return [p for p in (self.pois[k] for k in self.fact_pois.get(fact_key, ())) if p["kind"] == kind.value]


def _places_on_trajectory(bundle, trajectory_id, kind: PoiKind, country_name=None) -> QueryResult:
    ix = _Index(bundle)
    fact = ix.facts_by_trajectory.get(trajectory_id)
    if fact is None:
        warnings.warn(f"unknown trajectory {trajectory_id!r}", QueryWarning, stacklevel=3)
        return QueryResult(LOCATION, ())
    locations = set()
    for poi in ix.linked_pois(fact["fact_key"], kind):
        if country_name is not None and norm(ix.country_of_delegation(poi["delegation_key"])["name"]) != norm(country_name):
            continue
        locations.add(ix.subtype_row(poi)["location"])
    return QueryResult(LOCATION, tuple((loc,) for loc in sorted(locations)))


def q1_touristic_places_on_trajectory(bundle: WarehouseBundle, trajectory_id: int, country_name: str) -> QueryResult:
    """Locations of touristic companies near the trajectory's stops, inside the named country."""
    return _places_on_trajectory(bundle, trajectory_id, PoiKind.TOURISTIC, country_name)


def q2_count_agriculture(bundle: WarehouseBundle, country_name: str, delegation_name: str) -> int:
    ix = _Index(bundle)
    wanted = {
        k for k, d in ix.delegations.items()
        if norm(d["name"]) == norm(delegation_name) and norm(ix.country_of_delegation(k)["name"]) == norm(country_name)
    }
    if not wanted:
        warnings.warn(f"unknown delegation {delegation_name!r} in {country_name!r}", QueryWarning, stacklevel=2)
        return 0
    return sum(
        1 for p in ix.pois.values()
        if p["kind"] == PoiKind.AGRICULTURAL.value and p["delegation_key"] in wanted
    )


def q3_lakes_on_trajectory(bundle: WarehouseBundle, trajectory_id: int) -> QueryResult:
    return _places_on_trajectory(bundle, trajectory_id, PoiKind.LAKE)


def q4_trajectories_with_sea_and_touristic(bundle: WarehouseBundle) -> QueryResult:
    ix = _Index(bundle)
    ids = [
        f["trajectory_id"] for f in bundle["fact_trajectory"].records()
        if ix.linked_pois(f["fact_key"], PoiKind.SEA) and ix.linked_pois(f["fact_key"], PoiKind.TOURISTIC)
    ]
    return QueryResult(TRAJECTORY, tuple((i,) for i in sorted(ids)), ordering=("trajectory_id",))


def q5_hotels(bundle: WarehouseBundle, location_name: str, category: str = "hotel", star_type: str = "5stars") -> QueryResult:
    """Touristic companies of the given category and type at a named location."""
    ix = _Index(bundle)
    table = SUBTYPE_TABLE[PoiKind.TOURISTIC]
    poi_of_row = {p["subtype_key"]: p["poi_id"] for p in ix.pois.values() if p["subtype_table"] == table}
    rows = sorted(
        (r["name"], poi_of_row[k]) for k, r in ix.subtype(table).items()
        if norm(r["category"]) == norm(category) and norm(r["type"]) == norm(star_type)
        and norm(r["location"]) == norm(location_name)
    )
    return QueryResult((Column("name", "text"), Column("id", "text")), tuple(rows), ordering=("name", "id"))


def q6_trajectories_min_touristic(bundle: WarehouseBundle, threshold: int = 10) -> QueryResult:
    """Trajectories linked to strictly more than ``threshold`` distinct touristic companies."""
    if threshold < 0:
        raise NegativeThreshold(f"threshold must be non-negative, got {threshold}")
    ix = _Index(bundle)
    ids = [
        f["trajectory_id"] for f in bundle["fact_trajectory"].records()
        if len(set(p["poi_key"] for p in ix.linked_pois(f["fact_key"], PoiKind.TOURISTIC))) > threshold
    ]
    return QueryResult(TRAJECTORY, tuple((i,) for i in sorted(ids)), ordering=("trajectory_id",))


def rollup_poi_count(bundle: WarehouseBundle, levels: Sequence[str], kind: Union[PoiKind, str]) -> RollupResult:
    """Count POIs of one kind per country and/or delegation.

    Every group present in the administrative dimensions is reported, with
    zero when it has no matching POI.
    """
    kind = parse_kind(kind)
    levels = check_levels(levels)
    ix = _Index(bundle)

    def group_of(delegation_key: int):
        d = ix.delegations[delegation_key]
        c = ix.country_of_delegation(delegation_key)
        parts = {"country": (c["country_id"], c["name"]), "delegation": (d["delegation_id"], d["name"])}
        return tuple(parts[level][0] for level in levels), tuple(parts[level][1] for level in levels)

    groups: dict[tuple, int] = {}
    labels: dict[tuple, tuple] = {}
    for dk in sorted(ix.delegations):
        key, label = group_of(dk)
        groups.setdefault(key, 0)
        labels.setdefault(key, label)
    for p in ix.pois.values():
        if p["kind"] == kind.value:
            groups[group_of(p["delegation_key"])[0]] += 1
    return RollupResult(levels, kind, groups, labels, sum(groups.values()))
