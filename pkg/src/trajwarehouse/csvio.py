"""Readers and writers for the delimited text inputs and the segmented trajectory directory.

All files are comma-delimited UTF-8 with a header row and LF line endings.
Floats are written with ``repr`` so that a read/write cycle is lossless.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .core import (
    AdminPlace,
    Country,
    Delegation,
    GeoPoint,
    GpsFix,
    MeanOfTransport,
    Mic,
    Move,
    PoiKind,
    PointOfInterest,
    RegionalGovernment,
    Stop,
    StopKind,
    TimeInterval,
    Trajectory,
    assemble_trajectory,
)
from .itinerary import Destination, ItineraryState, NavigationEvent, plan_static, standard_tasks

FIXES_HEADER = ("mic_id", "t_utc_s", "lat_deg", "lon_deg")
GAZETTEER_HEADER = ("poi_id", "kind", "name", "lat_deg", "lon_deg", "delegation_id", "attrs")
ADMIN_HEADER = (
    "delegation_id", "delegation_name", "surface_km2", "population", "climate",
    "regional_government_id", "rg_name", "country_id", "country_name", "country_population",
)
MICS_HEADER = ("mic_id", "first_name", "last_name", "pda_id", "transport_id", "transport_color", "v_min_mps", "v_max_mps")
ITINERARY_HEADER = (
    "mic_id", "destination_id", "delegation_id", "lat_deg", "lon_deg", "window_begin_s", "window_end_s", "equivalent_ids",
)
EVENTS_HEADER = ("event_id", "kind", "begin_s", "end_s", "at_destination_id")
GROUND_TRUTH_HEADER = ("mic_id", "t_utc_s", "label", "index", "stop_kind")

TRAJECTORIES_HEADER = ("trajectory_id", "mic_id", "t_begin_s", "t_end_s", "n_sections")
STOPS_HEADER = (
    "trajectory_id", "seq", "stop_id", "t_begin_s", "t_end_s", "lat_deg", "lon_deg", "kind", "synthetic",
    "delegation_id", "poi_ids",
)
MOVES_HEADER = ("trajectory_id", "seq", "move_id", "t_begin_s", "t_end_s", "duration_s")
MOVE_POINTS_HEADER = ("move_id", "seq", "t_utc_s", "lat_deg", "lon_deg")
SECTIONS_HEADER = ("trajectory_id", "seq", "section_id", "from_stop_id", "move_id", "to_stop_id", "t_begin_s", "t_end_s")


class CsvFormatError(ValueError):
    pass


def _f(x: float) -> str:
    return repr(float(x))


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def read_rows(path, header: Sequence[str]) -> list[dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or tuple(first) != tuple(header):
            raise CsvFormatError(f"{path}: expected header {','.join(header)}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise CsvFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            rows.append(dict(zip(header, rec)))
        return rows


def _num(row, key, path, conv):
    try:
        return conv(row[key])
    except ValueError as exc:
        raise CsvFormatError(f"{path}: bad {key} value {row[key]!r}") from exc


# --- fixes ---------------------------------------------------------------


def write_fixes(path, fixes: Iterable[GpsFix]) -> None:
    write_rows(path, FIXES_HEADER, ((f.mic_id, f.t, _f(f.pos.lat), _f(f.pos.lon)) for f in fixes))


def read_fixes(path) -> dict[str, list[GpsFix]]:
    """Fixes grouped by collector and sorted by time."""
    by_mic: dict[str, list[GpsFix]] = defaultdict(list)
    for r in read_rows(path, FIXES_HEADER):
        pos = GeoPoint(_num(r, "lat_deg", path, float), _num(r, "lon_deg", path, float))
        by_mic[r["mic_id"]].append(GpsFix(r["mic_id"], _num(r, "t_utc_s", path, int), pos))
    return {m: sorted(v, key=lambda f: f.t) for m, v in sorted(by_mic.items())}


# --- gazetteer / admin / mics ------------------------------------------------


def _pack_attrs(attrs: Mapping[str, str]) -> str:
    return ";".join(f"{k}={v}" for k, v in sorted(attrs.items()))


def _unpack_attrs(text: str) -> dict[str, str]:
    out = {}
    for part in filter(None, text.split(";")):
        key, sep, value = part.partition("=")
        if not sep:
            raise CsvFormatError(f"attribute {part!r} is not key=value")
        out[key.strip()] = value
    return out


def write_gazetteer(path, pois: Iterable[PointOfInterest]) -> None:
    write_rows(path, GAZETTEER_HEADER, (
        (p.poi_id, p.kind.value, p.name, _f(p.pos.lat), _f(p.pos.lon), p.delegation_id, _pack_attrs(p.attrs))
        for p in pois
    ))


def read_gazetteer(path) -> list[PointOfInterest]:
    out = []
    for r in read_rows(path, GAZETTEER_HEADER):
        try:
            kind = PoiKind.parse(r["kind"])
        except ValueError as exc:
            raise CsvFormatError(f"{path}: {exc}") from exc
        pos = GeoPoint(_num(r, "lat_deg", path, float), _num(r, "lon_deg", path, float))
        out.append(PointOfInterest(r["poi_id"], kind, r["name"], pos, r["delegation_id"], _unpack_attrs(r["attrs"])))
    return out


def write_admin(path, places: Iterable[AdminPlace]) -> None:
    write_rows(path, ADMIN_HEADER, (
        (p.delegation.delegation_id, p.delegation.name, _f(p.delegation.surface_km2), p.delegation.population,
         p.delegation.climate, p.regional_government.rg_id, p.regional_government.name, p.country.country_id,
         p.country.name, p.country.population)
        for p in places
    ))


def read_admin(path) -> list[AdminPlace]:
    return [
        AdminPlace(
            Delegation(r["delegation_id"], r["delegation_name"], _num(r, "surface_km2", path, float),
                       _num(r, "population", path, int), r["climate"]),
            RegionalGovernment(r["regional_government_id"], r["rg_name"]),
            Country(r["country_id"], r["country_name"], _num(r, "country_population", path, int)),
        )
        for r in read_rows(path, ADMIN_HEADER)
    ]


def write_mics(path, mics: Iterable[Mic]) -> None:
    rows = []
    for m in mics:
        t = m.transport
        rows.append((m.mic_id, m.first_name, m.last_name, m.pda_id, t.transport_id if t else "",
                     t.color if t else "", _f(t.v_min) if t else "", _f(t.v_max) if t else ""))
    write_rows(path, MICS_HEADER, rows)


def read_mics(path) -> list[Mic]:
    out = []
    for r in read_rows(path, MICS_HEADER):
        transport = None
        if r["transport_id"]:
            transport = MeanOfTransport(r["transport_id"], r["transport_color"],
                                        _num(r, "v_min_mps", path, float), _num(r, "v_max_mps", path, float))
        out.append(Mic(r["mic_id"], r["first_name"], r["last_name"], pda_id=r["pda_id"], transport=transport))
    return out


# --- itineraries and events ---------------------------------------------------


def write_itineraries(path, states: Mapping[str, ItineraryState]) -> None:
    """Planned destinations first, then each collector's equivalent places.

    Equivalent places carry the window of the destination they stand in for.
    """
    rows = []
    for mic_id, st in states.items():
        for d in st.destinations:
            eq = "|".join(st.equivalences.get(d.destination_id, ()))
            rows.append((mic_id, d.destination_id, d.delegation_id, _f(d.pos.lat), _f(d.pos.lon),
                         d.planned_window.t_begin, d.planned_window.t_end, eq))
        for a in st.alternates.values():
            eq = "|".join(st.equivalences.get(a.destination_id, ()))
            rows.append((mic_id, a.destination_id, a.delegation_id, _f(a.pos.lat), _f(a.pos.lon),
                         a.planned_window.t_begin, a.planned_window.t_end, eq))
    write_rows(path, ITINERARY_HEADER, rows)


def read_itineraries(path) -> dict[str, ItineraryState]:
    """One itinerary per collector.

    A row whose id appears in another row's ``equivalent_ids`` is an
    equivalent place rather than a planned stop.
    """
    by_mic: dict[str, list[dict]] = defaultdict(list)
    for r in read_rows(path, ITINERARY_HEADER):
        by_mic[r["mic_id"]].append(r)
    out = {}
    for mic_id, rows in by_mic.items():
        equivalences = {}
        for r in rows:
            eq = [e for e in r["equivalent_ids"].split("|") if e]
            if eq:
                equivalences[r["destination_id"]] = eq
        referenced = {e for eqs in equivalences.values() for e in eqs}
        planned, alternates = [], []
        for r in rows:
            did = r["destination_id"]
            d = Destination(
                did, r["delegation_id"],
                GeoPoint(_num(r, "lat_deg", path, float), _num(r, "lon_deg", path, float)),
                TimeInterval(_num(r, "window_begin_s", path, int), _num(r, "window_end_s", path, int)),
                standard_tasks(did),
            )
            (alternates if did in referenced else planned).append(d)
        planned.sort(key=lambda d: d.planned_window.t_begin)
        out[mic_id] = plan_static(mic_id, planned, equivalences, alternates)
    return out


def write_events(path, events: Iterable[NavigationEvent]) -> None:
    write_rows(path, EVENTS_HEADER, (
        (e.event_id, e.kind, e.interval.t_begin, e.interval.t_end, e.at_destination_id or "") for e in events
    ))


def read_events(path) -> list[NavigationEvent]:
    return [
        NavigationEvent(r["event_id"], r["kind"],
                        TimeInterval(_num(r, "begin_s", path, int), _num(r, "end_s", path, int)),
                        r["at_destination_id"] or None)
        for r in read_rows(path, EVENTS_HEADER)
    ]


def events_for(events: Sequence[NavigationEvent], itinerary: Optional[ItineraryState]) -> list[NavigationEvent]:
    """Global events plus those aimed at one of this collector's places."""
    own = {d.destination_id for d in itinerary.all_places()} if itinerary is not None else set()
    return [e for e in events if e.at_destination_id is None or e.at_destination_id in own]


# --- segmented trajectories -------------------------------------------------------


def write_trajectories(directory, trajectories: Sequence[Trajectory]) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    trajs, stops, moves, points, sections = [], [], [], [], []
    for tr in trajectories:
        trajs.append((tr.trajectory_id, tr.mic_id, tr.interval.t_begin, tr.interval.t_end, len(tr.sections)))
        for i, s in enumerate(tr.stops):
            stops.append((tr.trajectory_id, i, s.stop_id, s.interval.t_begin, s.interval.t_end, _f(s.centroid.lat),
                          _f(s.centroid.lon), s.kind.value, "true" if s.synthetic else "false",
                          s.delegation_id or "", "|".join(sorted(s.nearby_poi_ids))))
        for i, m in enumerate(tr.moves):
            moves.append((tr.trajectory_id, i, m.move_id, m.interval.t_begin, m.interval.t_end, m.duration))
            points.extend((m.move_id, j, f.t, _f(f.pos.lat), _f(f.pos.lon)) for j, f in enumerate(m.path))
        for i, sec in enumerate(tr.sections):
            sections.append((tr.trajectory_id, i, sec.section_id, sec.from_stop.stop_id, sec.move.move_id,
                             sec.to_stop.stop_id, sec.interval.t_begin, sec.interval.t_end))
    write_rows(d / "trajectories.csv", TRAJECTORIES_HEADER, trajs)
    write_rows(d / "stops.csv", STOPS_HEADER, stops)
    write_rows(d / "moves.csv", MOVES_HEADER, moves)
    write_rows(d / "move_points.csv", MOVE_POINTS_HEADER, points)
    write_rows(d / "sections.csv", SECTIONS_HEADER, sections)


def read_trajectories(directory) -> list[Trajectory]:
    d = Path(directory)
    stops_by = defaultdict(list)
    for r in read_rows(d / "stops.csv", STOPS_HEADER):
        stops_by[int(r["trajectory_id"])].append((int(r["seq"]), Stop(
            r["stop_id"], TimeInterval(int(r["t_begin_s"]), int(r["t_end_s"])),
            GeoPoint(float(r["lat_deg"]), float(r["lon_deg"])), StopKind(r["kind"]),
            r["delegation_id"] or None, frozenset(p for p in r["poi_ids"].split("|") if p),
            synthetic=r["synthetic"] == "true",
        )))
    points = defaultdict(list)
    for r in read_rows(d / "move_points.csv", MOVE_POINTS_HEADER):
        points[r["move_id"]].append((int(r["seq"]), r["move_id"], int(r["t_utc_s"]),
                                     GeoPoint(float(r["lat_deg"]), float(r["lon_deg"]))))
    moves_by = defaultdict(list)
    for r in read_rows(d / "moves.csv", MOVES_HEADER):
        moves_by[int(r["trajectory_id"])].append((int(r["seq"]), r))
    section_ids = defaultdict(list)
    for r in read_rows(d / "sections.csv", SECTIONS_HEADER):
        section_ids[int(r["trajectory_id"])].append((int(r["seq"]), r["section_id"]))

    out = []
    for r in read_rows(d / "trajectories.csv", TRAJECTORIES_HEADER):
        tid, mic_id = int(r["trajectory_id"]), r["mic_id"]
        stops = [s for _, s in sorted(stops_by[tid], key=lambda x: x[0])]
        moves = []
        for _, m in sorted(moves_by[tid], key=lambda x: x[0]):
            path = tuple(GpsFix(mic_id, t, pos) for _, _, t, pos in sorted(points[m["move_id"]], key=lambda x: x[0]))
            moves.append(Move(m["move_id"], TimeInterval(int(m["t_begin_s"]), int(m["t_end_s"])), path))
        if not moves:
            if len(stops) != 1:
                raise CsvFormatError(f"trajectory {tid} without moves must have exactly one stop")
            out.append(Trajectory(tid, mic_id, (), stops[0].interval, lone_stop=stops[0]))
            continue
        sids = [s for _, s in sorted(section_ids[tid])]
        out.append(assemble_trajectory(mic_id, stops, moves, trajectory_id=tid, section_ids=sids or None))
    return out


def write_ground_truth(path, truths) -> None:
    rows = []
    for mic_id, gt in truths.items():
        for fix, (label, k) in zip(gt.fixes, gt.labels):
            kind = gt.stops[k].kind.value if label == "stop" else ""
            rows.append((mic_id, fix.t, label, k, kind))
    write_rows(path, GROUND_TRUTH_HEADER, rows)
