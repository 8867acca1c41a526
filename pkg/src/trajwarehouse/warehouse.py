"""Snowflake trajectory warehouse: schema, loader, integrity checks and CSV storage.

The fact table holds one row per trajectory. Stops, moves, sections and
points of interest hang off it through bridge tables because a trajectory
owns many of each. Dates snowflake into month/quarter/day-of-week,
countries into regional governments and delegations, and points of interest
into one table per kind.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator, Mapping, Optional, Sequence

from .core import (
    AdminPlace,
    Mic,
    PoiKind,
    PointOfInterest,
    Stop,
    Trajectory,
    check_admin_hierarchy,
)
from .errors import (
    DanglingReference,
    DuplicateNaturalId,
    InvariantViolation,
    IoFailure,
    ManifestMismatch,
    SchemaVersionMismatch,
)

SCHEMA_VERSION = 1

SUBTYPE_TABLE = {
    PoiKind.SEA: "dim_sea",
    PoiKind.LAKE: "dim_lake",
    PoiKind.MOUNTAIN: "dim_mountain",
    PoiKind.DESERT: "dim_desert",
    PoiKind.EDUCATIONAL: "dim_educational_company",
    PoiKind.TRANSPORTATION: "dim_transportation_company",
    PoiKind.INDUSTRIAL: "dim_industrial_company",
    PoiKind.HEALTHCARE: "dim_healthcare_company",
    PoiKind.TOURISTIC: "dim_touristic_company",
    PoiKind.CULT_ART: "dim_cult_art_company",
    PoiKind.AGRICULTURAL: "dim_agriculture_company",
    PoiKind.FINANCIAL: "dim_financial_company",
}
KIND_OF_SUBTYPE = {v: k for k, v in SUBTYPE_TABLE.items()}

_NATURAL_ATTRS = ("location", "surface", "length", "depth")
_ARTIFICIAL_ATTRS = ("location", "activity", "type")
_TOURISTIC_ATTRS = ("location", "activity", "category", "type")


def subtype_attrs(kind: PoiKind) -> tuple[str, ...]:
    if kind is PoiKind.TOURISTIC:
        return _TOURISTIC_ATTRS
    return _NATURAL_ATTRS if kind.natural else _ARTIFICIAL_ATTRS


def _subtype_columns(kind: PoiKind) -> tuple[tuple[str, str], ...]:
    key = SUBTYPE_TABLE[kind][len("dim_"):] + "_key"
    return ((key, "int"), ("name", "str")) + tuple((a, "str") for a in subtype_attrs(kind)) + (("extra", "str"),)


# column name -> type; "optint" is a nullable foreign key
SCHEMA: dict[str, tuple[tuple[str, str], ...]] = {
    "fact_trajectory": (
        ("fact_key", "int"), ("trajectory_id", "int"), ("mic_key", "int"), ("date_key", "int"),
        ("country_key", "optint"), ("t_begin_trajectory", "int"), ("t_end_trajectory", "int"),
        ("duration_trajectory", "int"), ("t_begin_iso", "str"), ("t_end_iso", "str"),
    ),
    "dim_mic": (
        ("mic_key", "int"), ("mic_id", "str"), ("first_name", "str"), ("last_name", "str"),
        ("pda_id", "str"), ("transport_id", "str"), ("transport_color", "str"),
        ("v_min_mps", "float"), ("v_max_mps", "float"),
        ("moving_capability", "int"), ("communication_capability", "int"), ("knowledge", "int"),
    ),
    "dim_date": (
        ("date_key", "int"), ("date_iso", "str"), ("year", "int"), ("day", "int"), ("hour", "int"),
        ("month_key", "int"), ("quarter_key", "int"), ("dow_key", "int"),
    ),
    "dim_month": (("month_key", "int"), ("year", "int"), ("month", "int")),
    "dim_quarter": (("quarter_key", "int"), ("year", "int"), ("quarter", "int")),
    "dim_day_of_week": (("dow_key", "int"), ("name", "str")),
    "dim_stop": (
        ("stop_key", "int"), ("stop_id", "str"), ("t_begin", "int"), ("t_end", "int"),
        ("t_begin_iso", "str"), ("t_end_iso", "str"), ("lat_deg", "float"), ("lon_deg", "float"),
        ("kind", "str"), ("synthetic", "bool"), ("delegation_key", "optint"),
    ),
    "dim_move": (
        ("move_key", "int"), ("move_id", "str"), ("t_begin", "int"), ("t_end", "int"),
        ("duration", "int"), ("t_begin_iso", "str"), ("t_end_iso", "str"), ("n_points", "int"),
    ),
    "dim_tr_section": (
        ("section_key", "int"), ("section_id", "str"), ("from_stop_key", "int"), ("move_key", "int"),
        ("to_stop_key", "int"), ("t_begin", "int"), ("t_end", "int"),
    ),
    "dim_country": (("country_key", "int"), ("country_id", "str"), ("name", "str"), ("population", "int")),
    "dim_regional_government": (
        ("regional_government_key", "int"), ("rg_id", "str"), ("name", "str"), ("country_key", "int"),
    ),
    "dim_delegation": (
        ("delegation_key", "int"), ("delegation_id", "str"), ("name", "str"), ("surface_km2", "float"),
        ("population", "int"), ("climate", "str"), ("regional_government_key", "int"),
    ),
    "dim_poi": (
        ("poi_key", "int"), ("poi_id", "str"), ("kind", "str"), ("family", "str"),
        ("lat_deg", "float"), ("lon_deg", "float"), ("delegation_key", "int"),
        ("subtype_table", "str"), ("subtype_key", "int"),
    ),
    **{SUBTYPE_TABLE[k]: _subtype_columns(k) for k in SUBTYPE_TABLE},
    "bridge_fact_stop": (("fact_key", "int"), ("seq", "int"), ("stop_key", "int")),
    "bridge_fact_move": (("fact_key", "int"), ("seq", "int"), ("move_key", "int")),
    "bridge_fact_section": (("fact_key", "int"), ("seq", "int"), ("section_key", "int")),
    "bridge_fact_poi": (("fact_key", "int"), ("poi_key", "int")),
}
TABLES = tuple(SCHEMA)

DAY_NAMES = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")


def iso_utc(t: int) -> str:
    return datetime.fromtimestamp(t, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def poi_location(poi: PointOfInterest, delegation_name: str) -> str:
    """Named location of a point of interest; falls back to its delegation's name."""
    return poi.attrs.get("location") or delegation_name


@dataclass(frozen=True)
class Table:
    name: str
    rows: tuple[tuple, ...]

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(c for c, _ in SCHEMA[self.name])

    def col(self, name: str) -> int:
        return self.columns.index(name)

    def records(self) -> Iterator[dict[str, Any]]:
        cols = self.columns
        for row in self.rows:
            yield dict(zip(cols, row))

    def by_key(self) -> dict[int, dict[str, Any]]:
        """Rows keyed by their surrogate key (first column)."""
        return {r[self.columns[0]]: r for r in self.records()}

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class WarehouseBundle:
    tables: Mapping[str, Table]
    manifest: Mapping[str, int]
    schema_version: int = SCHEMA_VERSION

    def __getitem__(self, name: str) -> Table:
        return self.tables[name]

    @property
    def load_id(self) -> str:
        """Content hash of every table; equal bundles share a load id."""
        h = hashlib.sha256()
        for name in TABLES:
            h.update(name.encode())
            h.update(_table_bytes(self.tables[name]))
        return h.hexdigest()[:16]

    def with_rows(self, name: str, rows: Sequence[tuple]) -> WarehouseBundle:
        tables = dict(self.tables)
        tables[name] = Table(name, tuple(tuple(r) for r in rows))
        return replace(self, tables=tables)

    def with_manifest(self, **counts: int) -> WarehouseBundle:
        return replace(self, manifest={**self.manifest, **counts})


class _KeyRegistry:
    """Dense surrogate keys from 1 in first-seen order, deduplicated by natural id."""

    def __init__(self, what: str) -> None:
        self.what = what
        self.keys: dict[Any, int] = {}
        self.values: dict[Any, Any] = {}
        self.rows: list[tuple] = []

    def __contains__(self, natural_id) -> bool:
        return natural_id in self.keys

    def get(self, natural_id) -> Optional[int]:
        return self.keys.get(natural_id)

    def add(self, natural_id, value, make_row, strict: bool = True) -> int:
        if natural_id in self.keys:
            if strict or self.values[natural_id] != value:
                raise DuplicateNaturalId(f"{self.what} {natural_id!r} appears twice")
            return self.keys[natural_id]
        key = len(self.rows) + 1
        self.keys[natural_id] = key
        self.values[natural_id] = value
        self.rows.append(make_row(key))
        return key


def _pack_extra(attrs: Mapping[str, str], used: Sequence[str]) -> str:
    return ";".join(f"{k}={v}" for k, v in sorted(attrs.items()) if k not in used)


def load(
    trajectories: Sequence[Trajectory],
    mics: Sequence[Mic],
    gazetteer: Sequence[PointOfInterest],
    admin_places: Sequence[AdminPlace],
) -> WarehouseBundle:
    """Materialise domain objects into the snowflake warehouse."""
    check_admin_hierarchy(admin_places)

    countries = _KeyRegistry("country")
    rgs = _KeyRegistry("regional government")
    delegations = _KeyRegistry("delegation")
    deleg_country: dict[str, int] = {}
    deleg_name: dict[str, str] = {}
    for place in admin_places:
        c, rg, d = place.country, place.regional_government, place.delegation
        try:
            ck = countries.add(c.country_id, c, lambda k: (k, c.country_id, c.name, c.population), strict=False)
            rk = rgs.add(rg.rg_id, rg, lambda k: (k, rg.rg_id, rg.name, ck), strict=False)
        except DuplicateNaturalId as exc:
            raise InvariantViolation(f"conflicting attributes: {exc}") from exc
        delegations.add(
            d.delegation_id, d,
            lambda k: (k, d.delegation_id, d.name, float(d.surface_km2), d.population, d.climate, rk),
        )
        deleg_country[d.delegation_id] = ck
        deleg_name[d.delegation_id] = d.name

    mic_keys = _KeyRegistry("mic")
    for m in mics:
        t = m.transport
        mic_keys.add(m.mic_id, m, lambda k: (
            k, m.mic_id, m.first_name, m.last_name, m.pda_id,
            t.transport_id if t else "", t.color if t else "",
            float(t.v_min) if t else 0.0, float(t.v_max) if t else 0.0,
            m.capability.moving, m.capability.communication, m.capability.knowledge,
        ))

    pois = _KeyRegistry("point of interest")
    subtype_rows: dict[str, list[tuple]] = {name: [] for name in SUBTYPE_TABLE.values()}
    for p in gazetteer:
        dk = delegations.get(p.delegation_id)
        if dk is None:
            raise DanglingReference(f"point of interest {p.poi_id} cites unknown delegation {p.delegation_id!r}")
        table = SUBTYPE_TABLE[p.kind]

        def poi_row(key, p=p, dk=dk, table=table):
            used = subtype_attrs(p.kind)
            values = [poi_location(p, deleg_name[p.delegation_id])] + [p.attrs.get(a, "") for a in used[1:]]
            sub_key = len(subtype_rows[table]) + 1
            subtype_rows[table].append((sub_key, p.name, *values, _pack_extra(p.attrs, used)))
            return (key, p.poi_id, p.kind.value, p.kind.family, float(p.pos.lat), float(p.pos.lon), dk, table, sub_key)

        pois.add(p.poi_id, p, poi_row)

    dates = _KeyRegistry("date")
    months = _KeyRegistry("month")
    quarters = _KeyRegistry("quarter")
    dows = _KeyRegistry("day of week")

    def date_key(t: int) -> int:
        dt = datetime.fromtimestamp(t, tz=timezone.utc)
        natural = (dt.date().isoformat(), dt.hour)
        if natural in dates:
            return dates.get(natural)
        q = (dt.month - 1) // 3 + 1
        mk = months.get((dt.year, dt.month)) or months.add((dt.year, dt.month), None, lambda k: (k, dt.year, dt.month))
        qk = quarters.get((dt.year, q)) or quarters.add((dt.year, q), None, lambda k: (k, dt.year, q))
        name = DAY_NAMES[dt.weekday()]
        wk = dows.get(name) or dows.add(name, None, lambda k: (k, name))
        return dates.add(natural, None, lambda k: (k, natural[0], dt.year, dt.day, dt.hour, mk, qk, wk))

    stops = _KeyRegistry("stop")
    moves = _KeyRegistry("move")
    sections = _KeyRegistry("trajectory section")
    facts = _KeyRegistry("trajectory")
    bridges: dict[str, list[tuple]] = {
        "bridge_fact_stop": [], "bridge_fact_move": [], "bridge_fact_section": [], "bridge_fact_poi": [],
    }

    def stop_key(s: Stop) -> int:
        if s.stop_id in stops:
            # shared boundary stop: must be the very same stop
            return stops.add(s.stop_id, s, None, strict=False)
        dk = None
        if s.delegation_id is not None:
            dk = delegations.get(s.delegation_id)
            if dk is None:
                raise DanglingReference(f"stop {s.stop_id} cites unknown delegation {s.delegation_id!r}")
        missing = sorted(i for i in s.nearby_poi_ids if i not in pois)
        if missing:
            raise DanglingReference(f"stop {s.stop_id} cites unknown points of interest {missing}")
        iv = s.interval
        return stops.add(s.stop_id, s, lambda k: (
            k, s.stop_id, iv.t_begin, iv.t_end, iso_utc(iv.t_begin), iso_utc(iv.t_end),
            float(s.centroid.lat), float(s.centroid.lon), s.kind.value, s.synthetic, dk,
        ))

    for traj in trajectories:
        mk = mic_keys.get(traj.mic_id)
        if mk is None:
            raise DanglingReference(f"trajectory {traj.trajectory_id} cites unknown mic {traj.mic_id!r}")
        if traj.trajectory_id in facts:
            raise DuplicateNaturalId(f"trajectory {traj.trajectory_id!r} appears twice")
        stop_keys = [stop_key(s) for s in traj.stops]
        move_keys = []
        for m in traj.moves:
            iv = m.interval
            move_keys.append(moves.add(m.move_id, m, lambda k: (
                k, m.move_id, iv.t_begin, iv.t_end, iv.t_end - iv.t_begin,
                iso_utc(iv.t_begin), iso_utc(iv.t_end), len(m.path)), strict=False))
        section_keys = []
        for sec in traj.sections:
            fk_, mk_, tk_ = stop_key(sec.from_stop), moves.get(sec.move.move_id), stop_key(sec.to_stop)
            iv = sec.interval
            section_keys.append(sections.add(sec.section_id, sec, lambda k: (
                k, sec.section_id, fk_, mk_, tk_, iv.t_begin, iv.t_end)))
        country_key = next(
            (deleg_country[s.delegation_id] for s in traj.stops if s.delegation_id is not None), None
        )
        iv = traj.interval
        dkey = date_key(iv.t_begin)
        fact = facts.add(traj.trajectory_id, traj, lambda k: (
            k, traj.trajectory_id, mk, dkey, country_key, iv.t_begin, iv.t_end,
            iv.t_end - iv.t_begin, iso_utc(iv.t_begin), iso_utc(iv.t_end),
        ))
        bridges["bridge_fact_stop"] += [(fact, i, k) for i, k in enumerate(stop_keys)]
        bridges["bridge_fact_move"] += [(fact, i, k) for i, k in enumerate(move_keys)]
        bridges["bridge_fact_section"] += [(fact, i, k) for i, k in enumerate(section_keys)]
        poi_keys = sorted({pois.get(i) for s in traj.stops for i in s.nearby_poi_ids})
        bridges["bridge_fact_poi"] += [(fact, k) for k in poi_keys]

    rows = {
        "fact_trajectory": facts.rows,
        "dim_mic": mic_keys.rows,
        "dim_date": dates.rows,
        "dim_month": months.rows,
        "dim_quarter": quarters.rows,
        "dim_day_of_week": dows.rows,
        "dim_stop": stops.rows,
        "dim_move": moves.rows,
        "dim_tr_section": sections.rows,
        "dim_country": countries.rows,
        "dim_regional_government": rgs.rows,
        "dim_delegation": delegations.rows,
        "dim_poi": pois.rows,
        **subtype_rows,
        **bridges,
    }
    tables = {name: Table(name, tuple(tuple(r) for r in rows[name])) for name in TABLES}
    return WarehouseBundle(tables, {name: len(t) for name, t in tables.items()})


# --- integrity -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # unresolved-key | duration-mismatch | hierarchy-break | manifest-drift | calendar-mismatch
    table: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} in {self.table}: {self.detail}"


# (table, column, referenced table, nullable)
FOREIGN_KEYS = (
    ("fact_trajectory", "mic_key", "dim_mic", False),
    ("fact_trajectory", "date_key", "dim_date", False),
    ("fact_trajectory", "country_key", "dim_country", True),
    ("dim_date", "month_key", "dim_month", False),
    ("dim_date", "quarter_key", "dim_quarter", False),
    ("dim_date", "dow_key", "dim_day_of_week", False),
    ("dim_stop", "delegation_key", "dim_delegation", True),
    ("dim_tr_section", "from_stop_key", "dim_stop", False),
    ("dim_tr_section", "move_key", "dim_move", False),
    ("dim_tr_section", "to_stop_key", "dim_stop", False),
    ("dim_regional_government", "country_key", "dim_country", False),
    ("dim_delegation", "regional_government_key", "dim_regional_government", False),
    ("dim_poi", "delegation_key", "dim_delegation", False),
    ("bridge_fact_stop", "fact_key", "fact_trajectory", False),
    ("bridge_fact_stop", "stop_key", "dim_stop", False),
    ("bridge_fact_move", "fact_key", "fact_trajectory", False),
    ("bridge_fact_move", "move_key", "dim_move", False),
    ("bridge_fact_section", "fact_key", "fact_trajectory", False),
    ("bridge_fact_section", "section_key", "dim_tr_section", False),
    ("bridge_fact_poi", "fact_key", "fact_trajectory", False),
    ("bridge_fact_poi", "poi_key", "dim_poi", False),
)


def integrity_check(bundle: WarehouseBundle) -> list[Violation]:
    """Every violation found in the bundle; an empty list means the bundle is valid."""
    out: list[Violation] = []
    present = {name for name in TABLES if name in bundle.tables}

    for name in TABLES:
        if name not in present:
            out.append(Violation("manifest-drift", name, "table missing"))
            continue
        actual, listed = len(bundle.tables[name]), bundle.manifest.get(name)
        if listed != actual:
            out.append(Violation("manifest-drift", name, f"manifest lists {listed} rows, table has {actual}"))
    for name in set(bundle.manifest) - set(TABLES):
        out.append(Violation("manifest-drift", name, "manifest lists an unknown table"))

    keysets = {name: {r[0] for r in bundle.tables[name].rows} for name in present}
    for name in present:
        if len(keysets[name]) != len(bundle.tables[name]) and not name.startswith("bridge_"):
            out.append(Violation("hierarchy-break", name, "duplicate surrogate keys"))

    for table, column, target, nullable in FOREIGN_KEYS:
        if table not in present or target not in present:
            continue
        t = bundle.tables[table]
        i = t.col(column)
        for row in t.rows:
            v = row[i]
            if v is None and nullable:
                continue
            if v not in keysets[target]:
                out.append(Violation("unresolved-key", table, f"{column}={v!r} (row {row[0]}) not in {target}"))

    if "dim_poi" in present:
        poi = bundle["dim_poi"]
        kind_i, table_i, key_i = poi.col("kind"), poi.col("subtype_table"), poi.col("subtype_key")
        claimed: set = set()
        for row in poi.rows:
            table = row[table_i]
            try:
                kind = PoiKind.parse(row[kind_i])
            except ValueError:
                out.append(Violation("hierarchy-break", "dim_poi", f"poi {row[0]} has unknown kind {row[kind_i]!r}"))
                continue
            if SUBTYPE_TABLE[kind] != table:
                out.append(Violation("hierarchy-break", "dim_poi", f"poi {row[0]} of kind {kind.value} points at {table}"))
                continue
            if table not in present or row[key_i] not in keysets[table]:
                out.append(Violation("unresolved-key", "dim_poi", f"subtype_key={row[key_i]!r} (row {row[0]}) not in {table}"))
            elif (table, row[key_i]) in claimed:
                out.append(Violation("hierarchy-break", "dim_poi", f"{table} row {row[key_i]} shared by several pois"))
            claimed.add((table, row[key_i]))

    if "fact_trajectory" in present:
        for r in bundle["fact_trajectory"].records():
            if r["duration_trajectory"] != r["t_end_trajectory"] - r["t_begin_trajectory"]:
                out.append(Violation("duration-mismatch", "fact_trajectory", f"fact {r['fact_key']}"))
    if "dim_move" in present:
        for r in bundle["dim_move"].records():
            if r["duration"] != r["t_end"] - r["t_begin"]:
                out.append(Violation("duration-mismatch", "dim_move", f"move {r['move_key']}"))

    if {"dim_tr_section", "dim_stop", "dim_move"} <= present:
        stops, moves = bundle["dim_stop"].by_key(), bundle["dim_move"].by_key()
        for r in bundle["dim_tr_section"].records():
            a, m, b = stops.get(r["from_stop_key"]), moves.get(r["move_key"]), stops.get(r["to_stop_key"])
            if a and m and b and not (a["t_end"] <= m["t_begin"] <= m["t_end"] <= b["t_begin"]):
                out.append(Violation("hierarchy-break", "dim_tr_section", f"section {r['section_key']} out of order"))

    if {"dim_date", "dim_month", "dim_quarter", "dim_day_of_week"} <= present:
        months, quarters = bundle["dim_month"].by_key(), bundle["dim_quarter"].by_key()
        dows = bundle["dim_day_of_week"].by_key()
        for r in bundle["dim_date"].records():
            m, q, w = months.get(r["month_key"]), quarters.get(r["quarter_key"]), dows.get(r["dow_key"])
            if not (m and q and w):
                continue
            day = datetime.strptime(r["date_iso"], "%Y-%m-%d")
            if (m["month"], m["year"]) != (day.month, day.year) or q["quarter"] != (m["month"] + 2) // 3 \
                    or w["name"] != DAY_NAMES[day.weekday()]:
                out.append(Violation("calendar-mismatch", "dim_date", f"date {r['date_key']}"))
    return out


# --- storage ---------------------------------------------------------------


def _fmt(value: Any, typ: str) -> str:
    if value is None:
        return ""
    if typ == "bool":
        return "true" if value else "false"
    if typ == "float":
        return repr(float(value))
    return str(value)


def _parse(text: str, typ: str) -> Any:
    if typ == "str":
        return text
    if typ == "optint":
        return None if text == "" else int(text)
    if typ == "int":
        return int(text)
    if typ == "float":
        return float(text)
    if typ == "bool":
        if text not in ("true", "false"):
            raise ValueError(f"bad boolean {text!r}")
        return text == "true"
    raise AssertionError(typ)


def _table_bytes(table: Table) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    schema = SCHEMA[table.name]
    w.writerow(c for c, _ in schema)
    for row in table.rows:
        w.writerow(_fmt(v, t) for v, (_, t) in zip(row, schema))
    return buf.getvalue().encode("utf-8")


def write_bundle(bundle: WarehouseBundle, directory) -> None:
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
        for name in TABLES:
            (d / f"{name}.csv").write_bytes(_table_bytes(bundle.tables[name]))
        lines = "".join(f"{name},{bundle.manifest[name]}\n" for name in TABLES)
        (d / "manifest.txt").write_bytes(lines.encode("utf-8"))
        (d / "schema_version.txt").write_bytes(f"{bundle.schema_version}\n".encode("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot write warehouse to {d}: {exc}") from exc


def read_bundle(directory) -> WarehouseBundle:
    d = Path(directory)
    if not d.is_dir():
        raise IoFailure(f"{d} is not a directory")
    version_file = d / "schema_version.txt"
    if not version_file.exists():
        raise SchemaVersionMismatch(f"{d} has no schema_version.txt")
    version = version_file.read_text(encoding="utf-8").strip()
    if version != str(SCHEMA_VERSION):
        raise SchemaVersionMismatch(f"schema version {version!r}, expected {SCHEMA_VERSION}")

    manifest_file = d / "manifest.txt"
    if not manifest_file.exists():
        raise ManifestMismatch(f"{d} has no manifest.txt")
    manifest: dict[str, int] = {}
    for line in manifest_file.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        name, _, count = line.partition(",")
        try:
            manifest[name] = int(count)
        except ValueError as exc:
            raise ManifestMismatch(f"bad manifest line {line!r}") from exc
    if set(manifest) != set(TABLES):
        raise ManifestMismatch(f"manifest tables differ from schema: {sorted(set(manifest) ^ set(TABLES))}")

    tables = {}
    for name in TABLES:
        path = d / f"{name}.csv"
        if not path.exists():
            raise ManifestMismatch(f"table file {path.name} is missing")
        schema = SCHEMA[name]
        try:
            with path.open(newline="", encoding="utf-8") as fh:
                reader = csv.reader(fh)
                header = next(reader, None)
                if header != [c for c, _ in schema]:
                    raise SchemaVersionMismatch(f"{path.name} header does not match schema version {SCHEMA_VERSION}")
                rows = []
                for rec in reader:
                    if len(rec) != len(schema):
                        raise ValueError(f"row has {len(rec)} fields, expected {len(schema)}")
                    rows.append(tuple(_parse(v, t) for v, (_, t) in zip(rec, schema)))
        except (ValueError, csv.Error) as exc:
            raise IoFailure(f"cannot parse {path.name}: {exc}") from exc
        except OSError as exc:
            raise IoFailure(f"cannot read {path.name}: {exc}") from exc
        if len(rows) != manifest[name]:
            raise ManifestMismatch(f"{name}: manifest says {manifest[name]} rows, file has {len(rows)}")
        tables[name] = Table(name, tuple(rows))
    return WarehouseBundle(tables, manifest, int(version))
