"""A small hand-built dataset around Tunisian delegations.

Placement of the points of interest (all within 120 m of the stop site they
are listed under, every site several kilometres from the others):

======  =====================  ==============================================
site    delegation (country)   points of interest
======  =====================  ==============================================
A       sousse (Tunisia)       hotel "Port El Kantaoui" 4*, sea
B       sousse (Tunisia)       3 agriculture companies, 2 industrial companies
H       Hammamet (Tunisia)     hotels "Hammamet" 5*, 5*, 4*, sea
Y       Hammamet (Tunisia)     hotel "Yasmine Hammamet" 5*
T       Tunis (Tunisia)        lake "Lac de Tunis"
N       Annaba (Algeria)       hotel "Annaba" 5*
E       Hammamet (Tunisia)     sea only
R       Hammamet (Tunisia)     11 restaurants
R2      Hammamet (Tunisia)     10 restaurants
X, X2   sousse (Tunisia)       nothing
======  =====================  ==============================================

Far from every site: one agriculture company in Hammamet and one industrial
company each in Hammamet and Annaba.

Trajectories (collector, sites visited): 7 (mic02: A, H), 20 (mic03: T, B),
34 (mic01: A, Y, N), 41 (mic04: E, X), 55 (mic05: X, R), 56 (mic06: X2, R2).
"""

from __future__ import annotations

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
    assemble_trajectory,
)
from .oracle import ObjectGraph
from .segmentation import SegmentationParams, annotate_pois
from .trajgen import offset

TUNISIA = Country("C-TN", "Tunisia", 10_400_000)
ALGERIA = Country("C-DZ", "Algeria", 34_800_000)

ADMIN = (
    AdminPlace(Delegation("D-SOU", "sousse", 45.0, 221_530, "mediterranean"),
               RegionalGovernment("RG-SO", "Sousse"), TUNISIA),
    AdminPlace(Delegation("D-HAM", "Hammamet", 36.0, 73_236, "mediterranean"),
               RegionalGovernment("RG-NA", "Nabeul"), TUNISIA),
    AdminPlace(Delegation("D-TUN", "Tunis", 212.6, 638_845, "mediterranean"),
               RegionalGovernment("RG-TU", "Tunis"), TUNISIA),
    AdminPlace(Delegation("D-ANN", "Annaba", 49.0, 257_359, "mediterranean"),
               RegionalGovernment("RG-AN", "Annaba"), ALGERIA),
)

SITES = {
    "A": GeoPoint(35.8256, 10.6367),
    "B": GeoPoint(35.7800, 10.5500),
    "H": GeoPoint(36.4000, 10.6167),
    "Y": GeoPoint(36.3700, 10.5400),
    "T": GeoPoint(36.8200, 10.2300),
    "N": GeoPoint(36.9000, 7.7667),
    "E": GeoPoint(36.1000, 10.9000),
    "R": GeoPoint(36.4400, 10.6600),
    "R2": GeoPoint(36.4600, 10.7000),
    "X": GeoPoint(35.7000, 10.4000),
    "X2": GeoPoint(35.6500, 10.3000),
}


def _poi(poi_id, kind, name, site, north, east, delegation_id, **attrs) -> PointOfInterest:
    return PointOfInterest(poi_id, kind, name, offset(SITES[site], north, east), delegation_id, attrs)


def _gazetteer() -> list[PointOfInterest]:
    T, S, L, AG, IN = PoiKind.TOURISTIC, PoiKind.SEA, PoiKind.LAKE, PoiKind.AGRICULTURAL, PoiKind.INDUSTRIAL
    g = [
        _poi("P-T1", T, "Hotel Kantaoui Bay", "A", 30, 20, "D-SOU",
             category="hotel", type="4stars", location="Port El Kantaoui"),
        _poi("P-S1", S, "Sousse coast", "A", -50, 40, "D-SOU", location="sousse"),
        _poi("P-A1", AG, "Olive grove Msaken", "B", 40, 0, "D-SOU", activity="olives"),
        _poi("P-A2", AG, "Dairy farm Sidi Bou Ali", "B", -40, 30, "D-SOU", activity="dairy"),
        _poi("P-A3", AG, "Citrus farm Akouda", "B", 0, -60, "D-SOU", activity="citrus"),
        _poi("P-I1", IN, "Textile plant Sousse", "B", 90, 60, "D-SOU", activity="textile"),
        _poi("P-I2", IN, "Olive oil mill Sousse", "B", -80, -70, "D-SOU", activity="food"),
        _poi("P-H1", T, "Hotel Le Sultan", "H", 60, 10, "D-HAM", category="hotel", type="5stars", location="Hammamet"),
        _poi("P-H2", T, "Hotel La Badira", "H", -40, -30, "D-HAM", category="hotel", type="5stars", location="Hammamet"),
        _poi("P-H3", T, "Hotel Bel Azur", "H", 20, -70, "D-HAM", category="hotel", type="4stars", location="Hammamet"),
        _poi("P-S2", S, "Gulf of Hammamet", "H", 100, 0, "D-HAM", location="Hammamet"),
        _poi("P-T2", T, "Hotel Yasmine Palace", "Y", 40, 0, "D-HAM",
             category="hotel", type="5stars", location="Yasmine Hammamet"),
        _poi("P-L1", L, "Lake of Tunis", "T", 30, 30, "D-TUN", location="Lac de Tunis"),
        _poi("P-N1", T, "Hotel Sabri", "N", 20, 20, "D-ANN", category="hotel", type="5stars", location="Annaba"),
        _poi("P-S3", S, "Cap Bon coast", "E", 50, 50, "D-HAM", location="Hammamet"),
        # away from every stop
        _poi("P-A4", AG, "Vineyard Bou Argoub", "Y", 3000, 0, "D-HAM", activity="wine"),
        _poi("P-I3", IN, "Ceramics plant Nabeul", "H", -3000, 2000, "D-HAM", activity="ceramics"),
        _poi("P-I4", IN, "Steel works El Hadjar", "N", -4000, 0, "D-ANN", activity="steel"),
    ]
    for k in range(11):
        g.append(_poi(f"P-R{k + 1:02d}", T, f"Restaurant Nord {k + 1}", "R", 10 * k, -5 * k, "D-HAM",
                      category="restaurant", type="standard", location="Hammamet Nord"))
    for k in range(10):
        g.append(_poi(f"P-Q{k + 1:02d}", T, f"Restaurant Sud {k + 1}", "R2", -10 * k, 5 * k, "D-HAM",
                      category="restaurant", type="standard", location="Hammamet Sud"))
    return g


TRANSPORT = MeanOfTransport("car", "red", 8.0, 25.0)
MICS = tuple(
    Mic(f"mic{i:02d}", first, last, pda_id=f"PDA-{i:03d}", transport=TRANSPORT)
    for i, (first, last) in enumerate(
        [("Wided", "Oueslati"), ("Jalel", "Akaichi"), ("Amira", "Gharbi"),
         ("Sami", "Trabelsi"), ("Leila", "Haddad"), ("Karim", "Mansour")], start=1)
)

# trajectory id -> (collector, sites)
ROUTES = {
    34: ("mic01", ("A", "Y", "N")),
    7: ("mic02", ("A", "H")),
    20: ("mic03", ("T", "B")),
    41: ("mic04", ("E", "X")),
    55: ("mic05", ("X", "R")),
    56: ("mic06", ("X2", "R2")),
}

DAY_START = 1247644800  # 2009-07-15T08:00:00Z
DWELL_S = 900
DRIVE_S = 1800


def _trajectory(tid, mic_id, sites, gazetteer, params):
    t = DAY_START + 600 * tid
    stops, moves = [], []
    for k, site in enumerate(sites):
        if k:
            prev = stops[-1]
            path = (GpsFix(mic_id, prev.interval.t_end, SITES[sites[k - 1]]), GpsFix(mic_id, t, SITES[site]))
            moves.append(Move(f"{tid}-m{k - 1}", TimeInterval(prev.interval.t_end, t), path))
        stop = Stop(f"{tid}-s{k}", TimeInterval(t, t + DWELL_S), SITES[site], StopKind.PLANNED)
        stops.append(annotate_pois(stop, gazetteer, params))
        t += DWELL_S + DRIVE_S
    return assemble_trajectory(mic_id, stops, moves, trajectory_id=tid)


def tunisia_fixture(params: SegmentationParams | None = None) -> ObjectGraph:
    params = params or SegmentationParams()
    gazetteer = _gazetteer()
    trajectories = [_trajectory(tid, mic, sites, gazetteer, params) for tid, (mic, sites) in ROUTES.items()]
    return ObjectGraph(tuple(trajectories), tuple(gazetteer), ADMIN, MICS)
