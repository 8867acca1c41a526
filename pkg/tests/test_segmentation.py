import random
import warnings
from contextlib import contextmanager

import pytest

from builders import random_trace, shift, trace
from oracles import linear_scan, trajectory_violations, window_oracle
from trajwarehouse.core import GeoPoint, GpsFix, PoiKind, PointOfInterest, Stop, StopKind, TimeInterval, geo_distance
from trajwarehouse.errors import EmptyInput, InvalidParams, MixedMicIds, NoStopsDetected, UnsortedInput
from trajwarehouse.itinerary import Destination, NavigationEvent, plan_static
from trajwarehouse.segmentation import (
    SegmentationParams,
    annotate_pois,
    classify_stop,
    detect_stop_runs,
    enrich,
    fix_labels,
    segment,
)

P = SegmentationParams()


# --- parameters and preconditions ---------------------------------------------


@pytest.mark.parametrize("kw", [{"eps_m": 0}, {"tau_min_s": 0}, {"eps_m": 100, "match_radius_m": 50}])
def test_invalid_params(kw):
    with pytest.raises(InvalidParams):
        SegmentationParams(**kw)


def test_empty_input():
    with pytest.raises(EmptyInput):
        segment([], P)


def test_unsorted_and_duplicate_timestamps():
    fixes = trace([("dwell", 3)])
    with pytest.raises(UnsortedInput):
        segment([fixes[1], fixes[0]], P)
    with pytest.raises(UnsortedInput):
        segment([fixes[0], GpsFix("m1", fixes[0].t, fixes[0].pos)], P)


def test_mixed_mic_ids():
    fixes = trace([("dwell", 2)]) + trace([("dwell", 1)], mic="m2", t0=100)
    with pytest.raises(MixedMicIds):
        segment(fixes, P)


# --- examples -----------------------------------------------------------------


def test_single_cluster_is_one_stop_and_no_sections():
    # 10 fixes spanning 600 s
    fixes = trace([("dwell", 10)], period=600 // 9 + 1)
    traj = segment(fixes, P)
    assert traj.sections == ()
    assert len(traj.stops) == 1 and not traj.stops[0].synthetic
    assert traj.interval == TimeInterval(fixes[0].t, fixes[-1].t)


def test_two_clusters_one_move():
    fixes = trace([("dwell", 12), ("drive", 6, 500), ("dwell", 12)])
    traj = segment(fixes, P)
    assert [len(traj.stops), len(traj.moves), len(traj.sections)] == [2, 1, 1]
    a, b = traj.stops
    assert traj.moves[0].interval == TimeInterval(a.interval.t_end, b.interval.t_begin)
    assert detect_stop_runs(fixes, P) == window_oracle(fixes, P.eps_m, P.tau_min_s) == [(0, 11), (17, 29)]


def test_centroid_is_mean_of_run():
    base = GeoPoint(36.0, 10.0)
    pts = [base, shift(base, 10, 0), shift(base, 0, 20), shift(base, -10, -20)]
    fixes = [GpsFix("m", 100 * k, p) for k, p in enumerate(pts)]
    stop = segment(fixes, P).stops[0]
    assert stop.centroid.lat == pytest.approx(sum(p.lat for p in pts) / 4, abs=1e-12)
    assert stop.centroid.lon == pytest.approx(sum(p.lon for p in pts) / 4, abs=1e-12)


def test_boundary_distance_counts_as_inside():
    a = GeoPoint(36.0, 10.0)
    b = shift(a, 0, 50)
    eps = geo_distance(a, b)
    fixes = [GpsFix("m", 0, a), GpsFix("m", 200, b), GpsFix("m", 400, b)]
    assert detect_stop_runs(fixes, SegmentationParams(eps_m=eps)) == [(0, 2)]


def test_dwell_exactly_tau_is_a_stop():
    fixes = trace([("dwell", 11)])  # 10 periods of 30 s
    assert detect_stop_runs(fixes, P) == [(0, 10)]
    assert detect_stop_runs(fixes[:10], P) == []


def test_trace_starting_and_ending_mid_move_gets_synthetic_stops():
    fixes = trace([("drive", 3, 400), ("dwell", 15), ("drive", 4, 400)])
    traj = segment(fixes, P)
    kinds = [s.synthetic for s in traj.stops]
    assert kinds == [True, False, True]
    assert traj.stops[0].interval.duration() == 0 and traj.stops[-1].interval.duration() == 0
    assert trajectory_violations(traj, fixes) == []


def test_no_stop_becomes_one_move_with_warning():
    fixes = trace([("drive", 8, 300)])
    with pytest.warns(RuntimeWarning):
        traj = segment(fixes, P)
    assert len(traj.moves) == 1 and all(s.synthetic for s in traj.stops)
    assert traj.moves[0].path == tuple(fixes)
    with pytest.raises(NoStopsDetected):
        segment(fixes, P, on_no_stops="raise")


def test_single_fix_is_lone_synthetic_stop():
    fixes = trace([("dwell", 1)])
    with pytest.warns(RuntimeWarning):
        traj = segment(fixes, P)
    assert traj.sections == () and traj.lone_stop.synthetic


def test_greedy_anchor_is_first_fix():
    # a slow creep: each fix 20 m further east; anchored at the first fix the run ends
    # after 50 m even though consecutive fixes are close
    fixes = trace([("dwell", 1), ("drive", 8, 20)], period=100)
    runs = detect_stop_runs(fixes, P)
    assert runs == window_oracle(fixes, P.eps_m, P.tau_min_s)
    for a, b in runs:
        assert all(geo_distance(fixes[a].pos, fixes[k].pos) <= P.eps_m for k in range(a, b + 1))


# --- properties ---------------------------------------------------------------


@pytest.mark.parametrize("seed", range(60))
def test_matches_window_oracle(seed):
    fixes = random_trace(seed, max_fixes=random.Random(seed).randint(1, 200))
    params = SegmentationParams(eps_m=50, tau_min_s=random.Random(seed).choice([60, 300, 600]))
    runs = detect_stop_runs(fixes, params)
    assert runs == window_oracle(fixes, params.eps_m, params.tau_min_s)
    with _quiet():
        traj = segment(fixes, params)
    real = [s for s in traj.stops if not s.synthetic]
    assert [(s.interval.t_begin, s.interval.t_end) for s in real] == [(fixes[a].t, fixes[b].t) for a, b in runs]
    for s in real:
        assert s.interval.duration() >= params.tau_min_s
    assert trajectory_violations(traj, fixes) == []
    labels = fix_labels(traj, fixes)
    assert len(labels) == len(fixes)


@contextmanager
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def test_deterministic():
    fixes = random_trace(7)
    with _quiet():
        assert segment(fixes, P, trajectory_id=3) == segment(list(fixes), P, trajectory_id=3)


def test_ids_are_stable():
    fixes = trace([("dwell", 12), ("drive", 6, 500), ("dwell", 12)], mic="mic07")
    traj = segment(fixes, P, trajectory_id=4)
    assert [s.stop_id for s in traj.stops] == ["mic07-t4-s0", "mic07-t4-s1"]
    assert traj.moves[0].move_id == "mic07-t4-m0"
    assert traj.sections[0].section_id == "mic07-t4-sec0"


# --- classification -------------------------------------------------------------


def _itinerary(pos):
    dest = Destination("d1", "D", pos, TimeInterval(0, 1000))
    alt = Destination("d1-alt", "D", shift(pos, 3000, 0), TimeInterval(0, 1000))
    return plan_static("m", [dest], {"d1": ["d1-alt"]}, [alt])


def _stop_at(pos, a=1000, b=1600):
    return Stop("s", TimeInterval(a, b), pos)


def test_planned_when_near_destination():
    here = GeoPoint(36.0, 10.0)
    it = _itinerary(here)
    stop = _stop_at(shift(here, 20, 0))
    assert classify_stop(stop, it, [], SegmentationParams(match_radius_m=100)) is StopKind.PLANNED


def test_planned_near_equivalent_place():
    here = GeoPoint(36.0, 10.0)
    it = _itinerary(here)
    assert classify_stop(_stop_at(shift(here, 3010, 0)), it, [], P) is StopKind.PLANNED


def test_unforeseen_during_breakdown():
    here = GeoPoint(36.0, 10.0)
    it = _itinerary(here)
    breakdown = NavigationEvent("e1", "breakdown", TimeInterval(1500, 2000))
    stop = _stop_at(shift(here, 10_000, 0))
    assert classify_stop(stop, it, [breakdown], P) is StopKind.UNFORESEEN
    later = NavigationEvent("e2", "bad weather", TimeInterval(1601, 2000))
    assert classify_stop(stop, it, [later], P) is StopKind.PRIVATE


def test_planned_beats_unforeseen_and_private_is_default():
    here = GeoPoint(36.0, 10.0)
    ev = NavigationEvent("e1", "breakdown", TimeInterval(0, 5000))
    assert classify_stop(_stop_at(here), _itinerary(here), [ev], P) is StopKind.PLANNED
    assert classify_stop(_stop_at(here), None, [], P) is StopKind.PRIVATE


# --- POI annotation --------------------------------------------------------------


def _gazetteer(seed, n=80):
    rng = random.Random(seed)
    base = GeoPoint(36.0, 10.0)
    return [
        PointOfInterest(f"p{k}", rng.choice(list(PoiKind)), f"poi {k}",
                        shift(base, rng.uniform(-600, 600), rng.uniform(-600, 600)), f"D{k % 3}")
        for k in range(n)
    ]


def test_annotate_empty_gazetteer():
    stop = _stop_at(GeoPoint(36.0, 10.0))
    assert annotate_pois(stop, [], P) == stop


def test_annotate_poi_at_centroid():
    here = GeoPoint(36.0, 10.0)
    poi = PointOfInterest("p", PoiKind.LAKE, "lake", here, "D9")
    out = annotate_pois(_stop_at(here), [poi], P)
    assert out.nearby_poi_ids == {"p"} and out.delegation_id == "D9"


@pytest.mark.parametrize("seed", range(25))
def test_annotate_matches_linear_scan(seed):
    gaz = _gazetteer(seed)
    centre = shift(GeoPoint(36.0, 10.0), random.Random(seed).uniform(-300, 300), 0)
    out = annotate_pois(_stop_at(centre), gaz, P)
    assert set(out.nearby_poi_ids) == linear_scan(centre, gaz, P.match_radius_m)
    if out.nearby_poi_ids:
        nearest = min(gaz, key=lambda p: geo_distance(centre, p.pos))
        assert out.delegation_id == nearest.delegation_id


def test_enrich_classifies_and_annotates_every_stop():
    fixes = trace([("dwell", 12), ("drive", 6, 500), ("dwell", 12)])
    traj = segment(fixes, P)
    here = traj.stops[0].centroid
    gaz = [PointOfInterest("p", PoiKind.SEA, "sea", shift(here, 30, 0), "D1")]
    out = enrich(traj, _itinerary(here), [], gaz, P)
    assert [s.kind for s in out.stops] == [StopKind.PLANNED, StopKind.PRIVATE]
    assert out.stops[0].nearby_poi_ids == {"p"} and out.stops[0].delegation_id == "D1"
    assert trajectory_violations(out, fixes) == []
