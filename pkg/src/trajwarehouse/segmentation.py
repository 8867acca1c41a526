"""Stop/move segmentation of a single collector's GPS trace.

A stop is the longest run of consecutive fixes that all stay within
``eps_m`` of the run's first fix, provided the run lasts at least
``tau_min_s``. The scan is greedy from left to right; fixes outside any stop
belong to the move between the neighbouring stops.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (
    GeoPoint,
    GpsFix,
    Move,
    PointOfInterest,
    Stop,
    StopKind,
    TimeInterval,
    Trajectory,
    assemble_trajectory,
    geo_distance,
    geo_distances,
)
from .errors import EmptyInput, InvalidParams, MixedMicIds, NoStopsDetected, UnsortedInput

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SegmentationParams:
    eps_m: float = 50.0
    tau_min_s: int = 300
    match_radius_m: float = 200.0

    def __post_init__(self) -> None:
        if not self.eps_m > 0:
            raise InvalidParams(f"eps_m must be positive, got {self.eps_m}")
        if not self.tau_min_s > 0:
            raise InvalidParams(f"tau_min_s must be positive, got {self.tau_min_s}")
        if not self.match_radius_m >= self.eps_m:
            raise InvalidParams("match_radius_m must be at least eps_m")


def _validate(fixes: Sequence[GpsFix]) -> None:
    if not fixes:
        raise EmptyInput("no fixes to segment")
    mic = fixes[0].mic_id
    for prev, nxt in zip(fixes, fixes[1:]):
        if nxt.mic_id != mic:
            raise MixedMicIds(f"trace mixes mic ids {mic!r} and {nxt.mic_id!r}")
        if nxt.t <= prev.t:
            raise UnsortedInput(f"timestamps not strictly increasing at t={nxt.t}")


def detect_stop_runs(fixes: Sequence[GpsFix], params: SegmentationParams) -> list[tuple[int, int]]:
    """Index ranges ``(first, last)`` (inclusive) of the fixes forming each stop."""
    _validate(fixes)
    runs = []
    n = len(fixes)
    i = 0
    while i < n:
        anchor = fixes[i].pos
        j = i + 1
        while j < n and geo_distance(anchor, fixes[j].pos) <= params.eps_m:
            j += 1
        if fixes[j - 1].t - fixes[i].t >= params.tau_min_s:
            runs.append((i, j - 1))
            i = j
        else:
            i += 1
    return runs


def _centroid(fixes: Sequence[GpsFix]) -> GeoPoint:
    return GeoPoint(
        sum(f.pos.lat for f in fixes) / len(fixes),
        sum(f.pos.lon for f in fixes) / len(fixes),
    )


def _synthetic_stop(fix: GpsFix, stop_id: str) -> Stop:
    return Stop(stop_id, TimeInterval(fix.t, fix.t), fix.pos, synthetic=True)


def segment(
    fixes: Sequence[GpsFix],
    params: Optional[SegmentationParams] = None,
    trajectory_id: int = 0,
    on_no_stops: str = "move",
) -> Trajectory:
    """Split a time-ordered trace into stops, moves and sections.

    If the trace begins or ends while moving, a zero-dwell synthetic stop is
    placed on the first/last fix so the trajectory begins and ends with a
    stop. With ``on_no_stops="raise"`` a trace without any real stop raises
    :class:`NoStopsDetected`; by default it becomes a single move between two
    synthetic stops and a warning is emitted.
    """
    params = params or SegmentationParams()
    fixes = list(fixes)
    runs = detect_stop_runs(fixes, params)
    mic_id = fixes[0].mic_id
    prefix = f"{mic_id}-t{trajectory_id}"

    if not runs:
        if on_no_stops == "raise":
            raise NoStopsDetected(f"no stop found in the trace of {mic_id}")
        warnings.warn(f"no stop detected for {mic_id}; treating the trace as one move", RuntimeWarning, stacklevel=2)

    n = len(fixes)
    if n == 1:
        stop = _synthetic_stop(fixes[0], f"{prefix}-s0")
        return Trajectory(trajectory_id, mic_id, (), stop.interval, lone_stop=stop)

    # (first, last, synthetic) fix ranges for every stop, real or synthetic
    spans: list[tuple[int, int, bool]] = [(a, b, False) for a, b in runs]
    if not spans or spans[0][0] > 0:
        spans.insert(0, (0, 0, True))
    if spans[-1][1] < n - 1:
        spans.append((n - 1, n - 1, True))

    stops = []
    for k, (a, b, synthetic) in enumerate(spans):
        sid = f"{prefix}-s{k}"
        if synthetic:
            stops.append(_synthetic_stop(fixes[a], sid))
        else:
            run = fixes[a : b + 1]
            stops.append(Stop(sid, TimeInterval(run[0].t, run[-1].t), _centroid(run)))

    if len(stops) == 1:
        return Trajectory(trajectory_id, mic_id, (), stops[0].interval, lone_stop=stops[0])

    moves = []
    for k in range(len(spans) - 1):
        last_of_stop, first_of_next = spans[k][1], spans[k + 1][0]
        path = tuple(fixes[last_of_stop : first_of_next + 1])
        moves.append(Move(f"{prefix}-m{k}", TimeInterval(path[0].t, path[-1].t), path))
    return assemble_trajectory(
        mic_id, stops, moves, trajectory_id=trajectory_id,
        section_ids=[f"{prefix}-sec{k}" for k in range(len(moves))],
    )


def fix_labels(trajectory: Trajectory, fixes: Sequence[GpsFix]) -> list[tuple[str, int]]:
    """Assign every fix to the stop or move that owns it.

    Stop fixes are those timed inside the stop interval; a move owns the fixes
    strictly between its bounding stops. Raises ``ValueError`` if a fix is
    owned by zero or several parts.
    """
    stops = trajectory.stops
    moves = trajectory.moves
    labels = []
    for fix in fixes:
        owners = [("stop", k) for k, s in enumerate(stops) if s.interval.t_begin <= fix.t <= s.interval.t_end]
        owners += [("move", k) for k, m in enumerate(moves) if m.interval.t_begin < fix.t < m.interval.t_end]
        if len(owners) != 1:
            raise ValueError(f"fix at t={fix.t} has {len(owners)} owners")
        labels.append(owners[0])
    return labels


def classify_stop(stop: Stop, itinerary, events: Iterable, params: Optional[SegmentationParams] = None) -> StopKind:
    """Planned near a destination (or an equivalent), Unforeseen during a navigation event, else Private."""
    params = params or SegmentationParams()
    if itinerary is not None:
        for dest in itinerary.all_places():
            if geo_distance(stop.centroid, dest.pos) <= params.match_radius_m:
                return StopKind.PLANNED
    for event in events:
        if event.interval.overlaps(stop.interval):
            return StopKind.UNFORESEEN
    return StopKind.PRIVATE


def annotate_pois(stop: Stop, gazetteer: Sequence[PointOfInterest], params: Optional[SegmentationParams] = None) -> Stop:
    """Attach every POI within the match radius; the nearest one gives the stop's delegation."""
    params = params or SegmentationParams()
    if not gazetteer:
        return stop
    lats = np.fromiter((p.pos.lat for p in gazetteer), float, len(gazetteer))
    lons = np.fromiter((p.pos.lon for p in gazetteer), float, len(gazetteer))
    dist = geo_distances(stop.centroid, lats, lons)
    inside = np.flatnonzero(dist <= params.match_radius_m)
    if inside.size == 0:
        return replace(stop, nearby_poi_ids=frozenset())
    # stable argmin: ties go to the earlier gazetteer entry
    nearest = inside[np.argmin(dist[inside])]
    return replace(
        stop,
        nearby_poi_ids=frozenset(gazetteer[i].poi_id for i in inside),
        delegation_id=gazetteer[nearest].delegation_id,
    )


def enrich(trajectory: Trajectory, itinerary, events: Sequence, gazetteer: Sequence[PointOfInterest],
           params: Optional[SegmentationParams] = None) -> Trajectory:
    """Classify and POI-annotate every stop of a segmented trajectory."""
    params = params or SegmentationParams()

    def _one(stop: Stop) -> Stop:
        stop = annotate_pois(stop, gazetteer, params)
        return replace(stop, kind=classify_stop(stop, itinerary, events, params))

    return trajectory.map_stops(_one)
