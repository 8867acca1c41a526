from datetime import datetime, timezone

import pytest

from oracles import civil_date
from pipeline import build
from trajwarehouse.core import (
    AdminPlace,
    Country,
    Delegation,
    GeoPoint,
    GpsFix,
    Mic,
    Move,
    PoiKind,
    PointOfInterest,
    RegionalGovernment,
    Stop,
    TimeInterval,
    assemble_trajectory,
)
from trajwarehouse.errors import (
    DanglingReference,
    DuplicateNaturalId,
    IoFailure,
    ManifestMismatch,
    SchemaVersionMismatch,
)
from trajwarehouse.fixtures import tunisia_fixture
from trajwarehouse.warehouse import SCHEMA, SUBTYPE_TABLE, TABLES, integrity_check, load, read_bundle, write_bundle

T10 = int(datetime(2009, 7, 15, 10, 0, tzinfo=timezone.utc).timestamp())

TN = Country("C-TN", "Tunisia", 10_000_000)
PLACE = AdminPlace(Delegation("D1", "sousse", 45.0, 200_000, "mediterranean"), RegionalGovernment("RG1", "Sousse"), TN)
MIC = Mic("mic01", "Wided", "Oueslati")


def one_trajectory(tid=1, mic="mic01", t0=T10, poi_ids=("p1",), delegation="D1"):
    a = Stop(f"{tid}-s0", TimeInterval(t0, t0 + 600), GeoPoint(35.8, 10.6), delegation_id=delegation,
             nearby_poi_ids=frozenset(poi_ids))
    b = Stop(f"{tid}-s1", TimeInterval(t0 + 1200, t0 + 1800), GeoPoint(35.9, 10.6))
    path = (GpsFix(mic, t0 + 600, a.centroid), GpsFix(mic, t0 + 900, GeoPoint(35.85, 10.6)),
            GpsFix(mic, t0 + 1200, b.centroid))
    move = Move(f"{tid}-m0", TimeInterval(t0 + 600, t0 + 1200), path)
    return assemble_trajectory(mic, [a, b], [move], trajectory_id=tid)


POI = PointOfInterest("p1", PoiKind.INDUSTRIAL, "Textile plant", GeoPoint(35.8, 10.6), "D1", {"activity": "textile"})


def small_bundle():
    return load([one_trajectory()], [MIC], [POI], [PLACE])


# --- load ---------------------------------------------------------------------


def test_counts_for_one_trajectory():
    b = small_bundle()
    assert b.manifest["fact_trajectory"] == 1
    assert b.manifest["dim_stop"] == 2
    assert b.manifest["dim_move"] == 1
    assert b.manifest["dim_tr_section"] == 1
    assert b.manifest["bridge_fact_poi"] == 1
    assert integrity_check(b) == []


def test_schema_has_twelve_subtype_tables_and_all_files():
    assert len(SUBTYPE_TABLE) == 12
    assert len(TABLES) == 13 + 12 + 4
    for name in ("fact_trajectory", "dim_date", "dim_month", "dim_quarter", "dim_day_of_week", "dim_country",
                 "dim_delegation", "dim_regional_government", "bridge_fact_poi", "dim_touristic_company"):
        assert name in TABLES


def test_date_snowflake_matches_civil_calendar():
    b = small_bundle()
    date = next(b["dim_date"].records())
    month = b["dim_month"].by_key()[date["month_key"]]
    quarter = b["dim_quarter"].by_key()[date["quarter_key"]]
    dow = b["dim_day_of_week"].by_key()[date["dow_key"]]
    expected = civil_date(T10)
    assert (month["month"], quarter["quarter"], dow["name"]) == (7, 3, "Wednesday")
    assert (date["day"], date["hour"], month["year"]) == (expected["day"], expected["hour"], expected["year"])
    assert dow["name"] == expected["dow"]


@pytest.mark.parametrize("seed", range(5))
def test_every_generated_date_row_matches_calendar(seed):
    ds = build(seed, n_mics=4)
    months, quarters = ds.bundle["dim_month"].by_key(), ds.bundle["dim_quarter"].by_key()
    dows = ds.bundle["dim_day_of_week"].by_key()
    dates = ds.bundle["dim_date"].by_key()
    for fact in ds.bundle["fact_trajectory"].records():
        d = dates[fact["date_key"]]
        cal = civil_date(fact["t_begin_trajectory"])
        assert (d["day"], d["hour"]) == (cal["day"], cal["hour"])
        assert months[d["month_key"]]["month"] == cal["month"]
        assert quarters[d["quarter_key"]]["quarter"] == cal["quarter"]
        assert dows[d["dow_key"]]["name"] == cal["dow"]


def test_unknown_mic_is_dangling():
    with pytest.raises(DanglingReference):
        load([one_trajectory(mic="mic99")], [MIC], [POI], [PLACE])


def test_unknown_poi_and_delegation_are_dangling():
    with pytest.raises(DanglingReference):
        load([one_trajectory(poi_ids=("nope",))], [MIC], [POI], [PLACE])
    with pytest.raises(DanglingReference):
        load([one_trajectory(delegation="D404")], [MIC], [POI], [PLACE])
    orphan = PointOfInterest("p2", PoiKind.SEA, "sea", GeoPoint(0, 0), "D404")
    with pytest.raises(DanglingReference):
        load([], [MIC], [POI, orphan], [PLACE])


def test_duplicate_natural_ids():
    with pytest.raises(DuplicateNaturalId):
        load([one_trajectory(), one_trajectory()], [MIC], [POI], [PLACE])
    with pytest.raises(DuplicateNaturalId):
        load([], [MIC, MIC], [POI], [PLACE])
    with pytest.raises(DuplicateNaturalId):
        load([], [MIC], [POI, POI], [PLACE])


def test_surrogate_keys_dense_in_first_seen_order():
    ds = build(3, n_mics=4)
    for name in TABLES:
        if name.startswith("bridge_"):
            continue
        keys = [r[0] for r in ds.bundle[name].rows]
        assert keys == list(range(1, len(keys) + 1)), name
    mic_ids = [r["mic_id"] for r in ds.bundle["dim_mic"].records()]
    assert mic_ids == [m.mic_id for m in ds.runs.mics]


def test_shared_stops_are_not_duplicated():
    ds = build(4, n_mics=3)
    n_stops = sum(len(t.stops) for t in ds.graph.trajectories)
    n_moves = sum(len(t.moves) for t in ds.graph.trajectories)
    assert ds.bundle.manifest["dim_stop"] == n_stops
    assert ds.bundle.manifest["dim_move"] == n_moves
    assert ds.bundle.manifest["dim_tr_section"] == n_moves
    assert ds.bundle.manifest["fact_trajectory"] == len(ds.graph.trajectories)


def test_duration_measures():
    ds = build(5)
    for r in ds.bundle["fact_trajectory"].records():
        assert r["duration_trajectory"] == r["t_end_trajectory"] - r["t_begin_trajectory"]
    for r in ds.bundle["dim_move"].records():
        assert r["duration"] == r["t_end"] - r["t_begin"]


def test_snowflake_normalisation():
    country_cols = {c for c, _ in SCHEMA["dim_country"]}
    assert not country_cols & {"surface_km2", "climate", "regional_government_key"}
    poi_cols = {c for c, _ in SCHEMA["dim_poi"]}
    assert not poi_cols & {"category", "type", "activity", "name", "location"}


def test_subtype_rows_match_kinds():
    g = tunisia_fixture()
    b = load(g.trajectories, g.mics, g.gazetteer, g.admin_places)
    for r in b["dim_poi"].records():
        sub = b[r["subtype_table"]].by_key()[r["subtype_key"]]
        assert SUBTYPE_TABLE[PoiKind.parse(r["kind"])] == r["subtype_table"]
        assert sub["name"]
    hotel = [r for r in b["dim_touristic_company"].records() if r["name"] == "Hotel Le Sultan"][0]
    assert (hotel["category"], hotel["type"], hotel["location"]) == ("hotel", "5stars", "Hammamet")


def test_same_inputs_same_bytes(tmp_path):
    a, b = build(8).bundle, build(8).bundle
    write_bundle(a, tmp_path / "a")
    write_bundle(b, tmp_path / "b")
    for name in sorted(p.name for p in (tmp_path / "a").iterdir()):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert a.load_id == b.load_id


# --- integrity faults -----------------------------------------------------------


def test_clean_load_has_no_violations():
    for seed in range(10):
        assert integrity_check(build(seed).bundle) == []


def test_mutated_fact_key_is_one_unresolved_key():
    b = small_bundle()
    fact = b["fact_trajectory"]
    i = fact.col("mic_key")
    row = list(fact.rows[0])
    row[i] = 10**9
    bad = b.with_rows("fact_trajectory", [tuple(row)])
    v = integrity_check(bad)
    assert [(x.kind, x.table) for x in v] == [("unresolved-key", "fact_trajectory")]


def test_decremented_duration_is_one_mismatch():
    b = small_bundle()
    fact = b["fact_trajectory"]
    i = fact.col("duration_trajectory")
    row = list(fact.rows[0])
    row[i] -= 1
    v = integrity_check(b.with_rows("fact_trajectory", [tuple(row)]))
    assert [(x.kind, x.table) for x in v] == [("duration-mismatch", "fact_trajectory")]


def test_manifest_drift_is_reported():
    b = small_bundle()
    v = integrity_check(b.with_manifest(dim_stop=3))
    assert [(x.kind, x.table) for x in v] == [("manifest-drift", "dim_stop")]


def test_hierarchy_break_on_wrong_subtype_table():
    b = small_bundle()
    poi = b["dim_poi"]
    row = list(poi.rows[0])
    row[poi.col("subtype_table")] = "dim_sea"
    v = integrity_check(b.with_rows("dim_poi", [tuple(row)]))
    assert [x.kind for x in v] == ["hierarchy-break"]


def test_calendar_mismatch():
    b = small_bundle()
    dow = b["dim_day_of_week"]
    v = integrity_check(b.with_rows("dim_day_of_week", [(dow.rows[0][0], "Friday")]))
    assert [x.kind for x in v] == ["calendar-mismatch"]


# --- storage ------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(6))
def test_round_trip(tmp_path, seed):
    b = build(seed, n_mics=2).bundle
    write_bundle(b, tmp_path)
    assert read_bundle(tmp_path) == b


def test_round_trip_keeps_nulls_and_floats(tmp_path):
    b = small_bundle()
    write_bundle(b, tmp_path)
    back = read_bundle(tmp_path)
    assert back == b
    stop = list(back["dim_stop"].records())[1]
    assert stop["delegation_key"] is None


def test_file_layout(tmp_path):
    write_bundle(small_bundle(), tmp_path)
    names = {p.name for p in tmp_path.iterdir()}
    assert names == {f"{t}.csv" for t in TABLES} | {"manifest.txt", "schema_version.txt"}
    assert (tmp_path / "schema_version.txt").read_text() == "1\n"
    lines = (tmp_path / "manifest.txt").read_text().splitlines()
    assert "fact_trajectory,1" in lines
    assert b"\r" not in (tmp_path / "dim_stop.csv").read_bytes()
    assert "2009-07-15T10:00:00Z" in (tmp_path / "fact_trajectory.csv").read_text()


def test_missing_table_file(tmp_path):
    write_bundle(small_bundle(), tmp_path)
    (tmp_path / "dim_move.csv").unlink()
    with pytest.raises(ManifestMismatch):
        read_bundle(tmp_path)


def test_edited_manifest_count(tmp_path):
    write_bundle(small_bundle(), tmp_path)
    m = tmp_path / "manifest.txt"
    m.write_text(m.read_text().replace("dim_stop,2", "dim_stop,3"))
    with pytest.raises(ManifestMismatch):
        read_bundle(tmp_path)


def test_schema_version_mismatch(tmp_path):
    write_bundle(small_bundle(), tmp_path)
    (tmp_path / "schema_version.txt").write_text("2\n")
    with pytest.raises(SchemaVersionMismatch):
        read_bundle(tmp_path)


def test_unreadable_directory(tmp_path):
    with pytest.raises(IoFailure):
        read_bundle(tmp_path / "absent")
    write_bundle(small_bundle(), tmp_path)
    p = tmp_path / "dim_stop.csv"
    p.write_text(p.read_text() + "oops\n")
    with pytest.raises(IoFailure):
        read_bundle(tmp_path)
