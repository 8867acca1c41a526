"""Command-line pipeline: simulate -> segment -> load -> query / rollup / check.

Exit status is 0 on success, 1 on a usage error and 2 on a data or
integrity error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

from . import csvio
from .errors import InvalidParams, TrajWarehouseError
from .query import (
    QueryResult,
    q1_touristic_places_on_trajectory,
    q2_count_agriculture,
    q3_lakes_on_trajectory,
    q4_trajectories_with_sea_and_touristic,
    q5_hotels,
    q6_trajectories_min_touristic,
    rollup_poi_count,
)
from .segmentation import SegmentationParams, enrich, segment
from .trajgen import GenParams, NetworkSpec, gen_runs, gen_world
from .warehouse import integrity_check, load, read_bundle, write_bundle

log = logging.getLogger("trajwarehouse")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _require_files(*paths: Optional[Path]) -> None:
    for p in paths:
        if p is not None and not p.exists():
            raise FileNotFoundError(f"input not found: {p}")


# --- subcommands -------------------------------------------------------------


def cmd_simulate(args) -> int:
    spec = NetworkSpec(seed=args.seed, n_delegations=args.delegations, n_pois_per_delegation=args.pois_per_delegation,
                       n_countries=args.countries)
    params = GenParams(seed=args.seed, n_mics=args.mics, stops_per_itinerary=args.stops, dwell_s=args.dwell,
                       fix_period_s=args.fix_period, noise_m=args.noise, event_rate=args.event_rate,
                       private_rate=args.private_rate)
    world = gen_world(spec)
    runs = gen_runs(world, params)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    csvio.write_fixes(out / "fixes.csv", runs.fixes)
    csvio.write_itineraries(out / "itinerary.csv", runs.itineraries)
    csvio.write_events(out / "events.csv", runs.events)
    csvio.write_gazetteer(out / "gazetteer.csv", world.gazetteer)
    csvio.write_admin(out / "admin.csv", world.admin_places)
    csvio.write_mics(out / "mics.csv", runs.mics)
    csvio.write_ground_truth(out / "ground_truth.csv", runs.ground_truth)
    log.info("simulated %d fixes for %d collectors into %s", len(runs.fixes), len(runs.mics), out)
    return EXIT_OK


def cmd_segment(args) -> int:
    _require_files(args.fixes, args.itinerary, args.events, args.gazetteer)
    try:
        params = SegmentationParams(args.eps, args.tau, args.match_radius)
    except InvalidParams as exc:
        raise UsageError(str(exc)) from exc
    traces = csvio.read_fixes(args.fixes)
    itineraries = csvio.read_itineraries(args.itinerary) if args.itinerary else {}
    events = csvio.read_events(args.events) if args.events else []
    gazetteer = csvio.read_gazetteer(args.gazetteer) if args.gazetteer else []
    trajectories = []
    for tid, (mic_id, fixes) in enumerate(traces.items(), start=1):
        itinerary = itineraries.get(mic_id)
        traj = segment(fixes, params, trajectory_id=tid)
        trajectories.append(enrich(traj, itinerary, csvio.events_for(events, itinerary), gazetteer, params))
    csvio.write_trajectories(args.out, trajectories)
    log.info("wrote %d trajectories to %s", len(trajectories), args.out)
    return EXIT_OK


def cmd_load(args) -> int:
    _require_files(args.trajectories, args.gazetteer, args.admin, args.mics)
    bundle = load(
        csvio.read_trajectories(args.trajectories),
        csvio.read_mics(args.mics),
        csvio.read_gazetteer(args.gazetteer),
        csvio.read_admin(args.admin),
    )
    write_bundle(bundle, args.out)
    log.info("loaded warehouse %s into %s", bundle.load_id, args.out)
    return EXIT_OK


def _emit_table(columns: Sequence[str], rows: Sequence[Sequence], fmt: str) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
        return
    cells = [list(map(str, columns))] + [[str(v) for v in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    sys.stdout.write("\n".join(lines) + "\n")


def cmd_query(args) -> int:
    need = {
        "q1": ("trajectory", "country"), "q2": ("country", "delegation"), "q3": ("trajectory",),
        "q4": (), "q5": ("location",), "q6": (),
    }[args.name]
    missing = [f"--{n}" for n in need if getattr(args, n) is None]
    if missing:
        raise UsageError(f"query {args.name} needs {' '.join(missing)}")
    if args.threshold is not None and args.threshold < 0:
        raise UsageError("--threshold must be non-negative")
    _require_files(args.warehouse)
    bundle = read_bundle(args.warehouse)
    if args.name == "q2":
        n = q2_count_agriculture(bundle, args.country, args.delegation)
        _emit_table(["count"], [[n]], args.format)
        return EXIT_OK
    result: QueryResult = {
        "q1": lambda: q1_touristic_places_on_trajectory(bundle, args.trajectory, args.country),
        "q3": lambda: q3_lakes_on_trajectory(bundle, args.trajectory),
        "q4": lambda: q4_trajectories_with_sea_and_touristic(bundle),
        "q5": lambda: q5_hotels(bundle, args.location, args.category, args.type),
        "q6": lambda: q6_trajectories_min_touristic(bundle, 10 if args.threshold is None else args.threshold),
    }[args.name]()
    _emit_table([c.name for c in result.columns], result.rows, args.format)
    return EXIT_OK


def cmd_rollup(args) -> int:
    levels = [p for p in args.by.split(",") if p]
    _require_files(args.warehouse)
    bundle = read_bundle(args.warehouse)
    try:
        r = rollup_poi_count(bundle, levels, args.kind)
    except ValueError as exc:  # unknown kind or malformed --by
        raise UsageError(str(exc)) from exc
    rows = [list(r.labels[k]) + [n] for k, n in r.groups.items()]
    rows.append(["TOTAL"] + [""] * (len(r.levels) - 1) + [r.grand_total])
    _emit_table(list(r.levels) + [f"{r.kind.value.lower()}_count"], rows, args.format)
    return EXIT_OK


def cmd_check(args) -> int:
    _require_files(args.warehouse)
    violations = integrity_check(read_bundle(args.warehouse))
    for v in violations:
        print(v)
    print(f"{len(violations)} violations")
    return EXIT_OK if not violations else EXIT_DATA


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trajwarehouse", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="generate a synthetic world and collector runs")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mics", type=int, default=3)
    s.add_argument("--stops", type=int, default=5, help="destinations per itinerary")
    s.add_argument("--dwell", type=int, default=600, help="seconds spent at each stop")
    s.add_argument("--fix-period", type=int, default=30)
    s.add_argument("--noise", type=float, default=0.0, help="GPS jitter radius in metres")
    s.add_argument("--event-rate", type=float, default=0.2)
    s.add_argument("--private-rate", type=float, default=0.1)
    s.add_argument("--delegations", type=int, default=6)
    s.add_argument("--pois-per-delegation", type=int, default=12)
    s.add_argument("--countries", type=int, default=2)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_simulate)

    defaults = SegmentationParams()
    s = sub.add_parser("segment", help="split GPS traces into stops, moves and sections")
    s.add_argument("--fixes", type=Path, required=True)
    s.add_argument("--itinerary", type=Path)
    s.add_argument("--events", type=Path)
    s.add_argument("--gazetteer", type=Path)
    s.add_argument("--eps", type=float, default=defaults.eps_m, help="stop radius in metres")
    s.add_argument("--tau", type=int, default=defaults.tau_min_s, help="minimum dwell in seconds")
    s.add_argument("--match-radius", type=float, default=defaults.match_radius_m)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_segment)

    s = sub.add_parser("load", help="build the snowflake warehouse")
    s.add_argument("--trajectories", type=Path, required=True)
    s.add_argument("--gazetteer", type=Path, required=True)
    s.add_argument("--admin", type=Path, required=True)
    s.add_argument("--mics", type=Path, required=True)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_load)

    s = sub.add_parser("query", help="run one of the analytical queries")
    s.add_argument("name", choices=["q1", "q2", "q3", "q4", "q5", "q6"])
    s.add_argument("--warehouse", type=Path, required=True)
    s.add_argument("--trajectory", type=int)
    s.add_argument("--country")
    s.add_argument("--delegation")
    s.add_argument("--location")
    s.add_argument("--category", default="hotel")
    s.add_argument("--type", default="5stars")
    s.add_argument("--threshold", type=int)
    s.add_argument("--format", choices=["table", "csv"], default="table")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("rollup", help="count points of interest per country / delegation")
    s.add_argument("--warehouse", type=Path, required=True)
    s.add_argument("--by", default="country,delegation")
    s.add_argument("--kind", required=True)
    s.add_argument("--format", choices=["table", "csv"], default="table")
    s.set_defaults(func=cmd_rollup)

    s = sub.add_parser("check", help="report warehouse integrity violations")
    s.add_argument("--warehouse", type=Path, required=True)
    s.set_defaults(func=cmd_check)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s: %(message)s")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = args.func(args)
        except UsageError as exc:
            print(parser.format_usage().rstrip(), file=sys.stderr)
            print(f"trajwarehouse: error: {exc}", file=sys.stderr)
            code = EXIT_USAGE
        except (TrajWarehouseError, csvio.CsvFormatError, OSError) as exc:
            print(f"trajwarehouse: {type(exc).__name__}: {exc}", file=sys.stderr)
            code = EXIT_DATA
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
