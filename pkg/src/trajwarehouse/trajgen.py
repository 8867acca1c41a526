"""Deterministic synthetic worlds and collector runs with ground-truth labels.

Randomness comes from SplitMix64 so that a seed reproduces the same world in
any language::

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    return z ^ (z >> 31)

``uniform()`` is ``(next >> 11) * 2**-53``; ``randint(lo, hi)`` is
``lo + next % (hi - lo + 1)``; ``fork(k)`` seeds a child stream with
``mix(seed + (k + 1) * 0x9E3779B97F4A7C15)`` where ``mix`` is the output
function above applied to a single value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import (
    EARTH_RADIUS_M,
    AdminPlace,
    AuthAttempt,
    Capability,
    Country,
    Delegation,
    GeoPoint,
    GpsFix,
    MeanOfTransport,
    Mic,
    PoiKind,
    PointOfInterest,
    RegionalGovernment,
    StopKind,
    TimeInterval,
    geo_distance,
)
from .errors import InfeasibleParams, InvalidSpec, NoEquivalentAvailable
from .itinerary import (
    Destination,
    ItineraryState,
    NavigationEvent,
    advance,
    apply_event,
    plan_static,
    standard_tasks,
)

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int) -> None:
        self.seed = seed & MASK64
        self.state = self.seed

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return _mix64(self.state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0**-53)

    def randint(self, lo: int, hi: int) -> int:
        return lo + self.next_u64() % (hi - lo + 1)

    def choice(self, seq: Sequence):
        return seq[self.randint(0, len(seq) - 1)]

    def fork(self, k: int) -> SplitMix64:
        return SplitMix64(_mix64((self.seed + (k + 1) * GOLDEN) & MASK64))


# --- geometry helpers ------------------------------------------------------

_M_PER_DEG = EARTH_RADIUS_M * math.pi / 180.0


def offset(p: GeoPoint, north_m: float, east_m: float) -> GeoPoint:
    lat = p.lat + north_m / _M_PER_DEG
    lon = p.lon + east_m / (_M_PER_DEG * math.cos(math.radians(p.lat)))
    return GeoPoint(lat, lon)


def intermediate(a: GeoPoint, b: GeoPoint, f: float) -> GeoPoint:
    """Point at fraction ``f`` along the great circle from ``a`` to ``b``."""
    if f <= 0.0:
        return a
    if f >= 1.0:
        return b
    d = geo_distance(a, b) / EARTH_RADIUS_M
    if d == 0.0:
        return a
    la1, lo1, la2, lo2 = map(math.radians, (a.lat, a.lon, b.lat, b.lon))
    s = math.sin(d)
    wa, wb = math.sin((1 - f) * d) / s, math.sin(f * d) / s
    x = wa * math.cos(la1) * math.cos(lo1) + wb * math.cos(la2) * math.cos(lo2)
    y = wa * math.cos(la1) * math.sin(lo1) + wb * math.cos(la2) * math.sin(lo2)
    z = wa * math.sin(la1) + wb * math.sin(la2)
    return GeoPoint(math.degrees(math.atan2(z, math.hypot(x, y))), math.degrees(math.atan2(y, x)))


def jitter(rng: SplitMix64, p: GeoPoint, radius_m: float) -> GeoPoint:
    """Uniform random point in a disc of ``radius_m`` around ``p``."""
    if radius_m <= 0:
        return p
    r = radius_m * math.sqrt(rng.uniform())
    theta = 2 * math.pi * rng.uniform()
    return offset(p, r * math.cos(theta), r * math.sin(theta))


# --- world -----------------------------------------------------------------

COUNTRY_NAMES = ("Tunisia", "Algeria", "Libya", "Morocco", "Malta", "Egypt")
REGION_NAMES = ("Sousse", "Nabeul", "Tunis", "Sfax", "Monastir", "Bizerte", "Kairouan", "Gabes", "Mahdia", "Beja")
DELEGATION_NAMES = (
    "sousse", "Hammamet", "Carthage", "Monastir", "Kelibia", "Nabeul", "Msaken", "Enfidha", "Tabarka",
    "Bizerte", "Mahdia", "Kairouan", "Zaghouan", "Korba", "Djerba", "Tozeur", "Douz", "Gafsa",
)
CLIMATES = ("mediterranean", "semi-arid", "arid", "humid")
EVENT_KINDS = ("breakdown", "bad weather", "road closed")
HALT_CLEARANCE_M = 400.0

TRANSPORTS = (
    MeanOfTransport("car", "red", 8.0, 25.0),
    MeanOfTransport("van", "white", 6.0, 20.0),
    MeanOfTransport("motorbike", "blue", 7.0, 22.0),
)
FIRST_NAMES = ("Wided", "Jalel", "Amira", "Sami", "Leila", "Karim", "Nour", "Hedi", "Salma", "Omar")
LAST_NAMES = ("Ben Ali", "Trabelsi", "Gharbi", "Jaziri", "Mansour", "Haddad", "Khelifi", "Saidi")
ALL_KINDS = tuple(PoiKind)


@dataclass(frozen=True)
class NetworkSpec:
    seed: int = 0
    n_delegations: int = 6
    n_pois_per_delegation: int = 12
    n_countries: int = 2
    n_regions_per_country: int = 2
    # explicit (delegation_index_a, delegation_index_b) pairs; generated when None
    edges: Optional[tuple[tuple[int, int], ...]] = None
    extra_edge_rate: float = 0.3


@dataclass(frozen=True)
class Network:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]

    def neighbours(self, node: str) -> list[str]:
        out = [b for a, b, _ in self.edges if a == node] + [a for a, b, _ in self.edges if b == node]
        return sorted(set(out))

    def connected(self) -> bool:
        if not self.nodes:
            return False
        seen, todo = {self.nodes[0]}, [self.nodes[0]]
        while todo:
            for nb in self.neighbours(todo.pop()):
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return len(seen) == len(self.nodes)


@dataclass(frozen=True)
class World:
    admin_places: tuple[AdminPlace, ...]
    gazetteer: tuple[PointOfInterest, ...]
    network: Network
    # delegation id -> (centre, alternate site, alternate site)
    sites: dict[str, tuple[GeoPoint, ...]]


def gen_world(spec: NetworkSpec) -> World:
    """Countries, regional governments, delegations, a connected road graph and POIs."""
    if spec.n_delegations < 1 or spec.n_countries < 1 or spec.n_regions_per_country < 1:
        raise InvalidSpec("need at least one delegation, country and regional government")
    if spec.n_pois_per_delegation < 0:
        raise InvalidSpec("n_pois_per_delegation must be non-negative")
    rng = SplitMix64(spec.seed)

    countries = [
        Country(f"C{i + 1}", COUNTRY_NAMES[i % len(COUNTRY_NAMES)] + ("" if i < len(COUNTRY_NAMES) else f" {i}"),
                rng.randint(1_000_000, 50_000_000))
        for i in range(spec.n_countries)
    ]
    n_rg = spec.n_countries * spec.n_regions_per_country
    rgs = [
        (RegionalGovernment(f"RG{j + 1}", REGION_NAMES[j % len(REGION_NAMES)] + ("" if j < len(REGION_NAMES) else f" {j}")),
         countries[j // spec.n_regions_per_country])
        for j in range(n_rg)
    ]

    cols = math.ceil(math.sqrt(spec.n_delegations))
    admin, centres = [], {}
    for i in range(spec.n_delegations):
        name = DELEGATION_NAMES[i % len(DELEGATION_NAMES)] + ("" if i < len(DELEGATION_NAMES) else f" {i}")
        d = Delegation(
            f"D{i + 1:03d}", name, surface_km2=round(rng.uniform(20, 900), 1),
            population=rng.randint(5_000, 400_000), climate=rng.choice(CLIMATES),
        )
        rg, country = rgs[i % n_rg]
        admin.append(AdminPlace(d, rg, country))
        row, col = divmod(i, cols)
        centres[d.delegation_id] = GeoPoint(
            35.5 + 0.06 * row + rng.uniform(-0.01, 0.01),
            9.5 + 0.07 * col + rng.uniform(-0.01, 0.01),
        )

    sites = {}
    for did, centre in centres.items():
        angle = rng.uniform(0, 2 * math.pi)
        alts = []
        for k in range(2):
            r = rng.uniform(1200, 1800)
            a = angle + k * math.pi
            alts.append(offset(centre, r * math.cos(a), r * math.sin(a)))
        sites[did] = (centre, *alts)

    ids = [p.delegation.delegation_id for p in admin]
    if spec.edges is not None:
        pairs = []
        for a, b in spec.edges:
            if not (0 <= a < len(ids) and 0 <= b < len(ids)) or a == b:
                raise InvalidSpec(f"bad edge ({a}, {b})")
            pairs.append((ids[a], ids[b]))
    else:
        pairs = [(ids[rng.randint(0, i - 1)], ids[i]) for i in range(1, len(ids))]
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                if (ids[i], ids[j]) not in pairs and rng.uniform() < spec.extra_edge_rate / len(ids):
                    pairs.append((ids[i], ids[j]))
    edges = tuple((a, b, geo_distance(centres[a], centres[b])) for a, b in pairs)
    network = Network(tuple(ids), edges)
    if not network.connected():
        raise InvalidSpec("road graph is not connected")

    gazetteer = []
    g = 0
    for place in admin:
        d = place.delegation
        for _ in range(spec.n_pois_per_delegation):
            kind = ALL_KINDS[g] if g < len(ALL_KINDS) else rng.choice(ALL_KINDS)
            pos = jitter(rng, rng.choice(sites[d.delegation_id]), 450.0)
            gazetteer.append(PointOfInterest(
                f"P{g + 1:04d}", kind, f"{kind.value} {d.name} {g + 1}", pos, d.delegation_id,
                _poi_attrs(rng, kind, d.name),
            ))
            g += 1
    return World(tuple(admin), tuple(gazetteer), network, sites)


def _poi_attrs(rng: SplitMix64, kind: PoiKind, delegation_name: str) -> dict[str, str]:
    location = delegation_name if rng.uniform() < 0.7 else f"{rng.choice(('Yasmine', 'Port', 'Old'))} {delegation_name}"
    if kind is PoiKind.TOURISTIC:
        return {
            "location": location,
            "category": rng.choice(("hotel", "hotel", "restaurant", "camping")),
            "type": rng.choice(("3stars", "4stars", "5stars")),
            "activity": "tourism",
        }
    if kind.natural:
        return {"location": location, "surface": str(rng.randint(1, 500))}
    return {
        "location": location,
        "activity": rng.choice(("production", "services", "research", "trade")),
        "type": rng.choice(("public", "private")),
    }


# --- runs ------------------------------------------------------------------

JULY_15_2009_0800 = 1247644800


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    n_mics: int = 3
    stops_per_itinerary: int = 5
    dwell_s: int = 600
    # fixed speed in m/s; drawn per leg inside the transport's range when None
    cruise_speed: Optional[float] = None
    fix_period_s: int = 30
    noise_m: float = 0.0
    event_rate: float = 0.2
    private_rate: float = 0.1
    equivalent_rate: float = 0.7
    t0: int = JULY_15_2009_0800


@dataclass(frozen=True)
class TruthStop:
    interval: TimeInterval
    pos: GeoPoint
    kind: StopKind
    first_fix: int
    last_fix: int


@dataclass
class GroundTruth:
    mic_id: str
    fixes: list[GpsFix] = field(default_factory=list)
    # ("stop", k) or ("move", k) for every fix
    labels: list[tuple[str, int]] = field(default_factory=list)
    stops: list[TruthStop] = field(default_factory=list)
    events: list[NavigationEvent] = field(default_factory=list)
    leg_speeds: list[float] = field(default_factory=list)
    final_state: Optional[ItineraryState] = None

    @property
    def n_moves(self) -> int:
        return max(0, len(self.stops) - 1)

    @property
    def n_sections(self) -> int:
        return self.n_moves


@dataclass(frozen=True)
class RunSet:
    mics: tuple[Mic, ...]
    itineraries: dict[str, ItineraryState]
    events: tuple[NavigationEvent, ...]
    fixes: tuple[GpsFix, ...]
    ground_truth: dict[str, GroundTruth]


class _Recorder:
    def __init__(self, mic_id: str, rng: SplitMix64, params: GenParams, transport: MeanOfTransport) -> None:
        self.truth = GroundTruth(mic_id)
        self.rng = rng
        self.p = params
        self.transport = transport

    def _emit(self, t: int, pos: GeoPoint, label: tuple[str, int]) -> None:
        self.truth.fixes.append(GpsFix(self.truth.mic_id, t, jitter(self.rng, pos, self.p.noise_m)))
        self.truth.labels.append(label)

    def dwell(self, pos: GeoPoint, t: int, kind: StopKind) -> int:
        n = math.ceil(self.p.dwell_s / self.p.fix_period_s)
        k = len(self.truth.stops)
        first = len(self.truth.fixes)
        for i in range(n + 1):
            self._emit(t + i * self.p.fix_period_s, pos, ("stop", k))
        end = t + n * self.p.fix_period_s
        self.truth.stops.append(TruthStop(TimeInterval(t, end), pos, kind, first, len(self.truth.fixes) - 1))
        return end

    def travel(self, a: GeoPoint, b: GeoPoint, t: int) -> int:
        """Emit the in-between fixes of a straight leg; returns the arrival time."""
        tr, period = self.transport, self.p.fix_period_s
        dist = geo_distance(a, b)
        v = self.p.cruise_speed if self.p.cruise_speed is not None else self.rng.uniform(tr.v_min, tr.v_max)
        lo, hi = math.ceil(dist / (tr.v_max * period)), math.floor(dist / (tr.v_min * period))
        steps = min(max(1, math.ceil(dist / (v * period)), lo), hi)
        if steps < 1 or steps < lo:
            raise InfeasibleParams(f"a {dist:.0f} m leg cannot be driven within the {tr.transport_id} speed range")
        self.truth.leg_speeds.append(dist / (steps * period))
        k = len(self.truth.stops) - 1
        for i in range(1, steps):
            self._emit(t + i * period, intermediate(a, b, i / steps), ("move", k))
        return t + steps * period


def _check_params(params: GenParams, world: World) -> None:
    if params.noise_m < 0:
        raise InfeasibleParams("noise_m must be non-negative")
    if params.fix_period_s <= 0:
        raise InfeasibleParams("fix_period_s must be positive")
    if params.dwell_s < params.fix_period_s:
        raise InfeasibleParams("dwell shorter than one fix period")
    if params.dwell_s < 300:
        raise InfeasibleParams("dwell_s below the default minimum stop duration (300 s)")
    if params.n_mics < 1 or params.stops_per_itinerary < 1:
        raise InfeasibleParams("need at least one mic and one stop per itinerary")
    if params.stops_per_itinerary > 1 and not world.network.edges:
        raise InfeasibleParams("a multi-stop itinerary needs at least one road")
    for tr in TRANSPORTS:
        if params.cruise_speed is not None and not tr.v_min <= params.cruise_speed <= tr.v_max:
            raise InfeasibleParams(f"cruise speed {params.cruise_speed} outside the {tr.transport_id} range")
        if tr.v_min * params.fix_period_s <= 2 * params.noise_m:
            raise InfeasibleParams("moving fixes would be indistinguishable from noise")


def _mic(rng: SplitMix64, i: int) -> Mic:
    history, errors = [], 0
    t = JULY_15_2009_0800 - 3600
    for _ in range(rng.randint(1, 5)):
        outcome = "error" if errors < 2 and rng.uniform() < 0.3 else "success"
        errors = errors + 1 if outcome == "error" else 0
        history.append(AuthAttempt(t, outcome))
        t += 60
    return Mic(
        f"mic{i + 1:02d}", rng.choice(FIRST_NAMES), rng.choice(LAST_NAMES), pda_id=f"PDA-{i + 1:03d}",
        auth_key=f"{rng.next_u64():016x}", auth_history=tuple(history),
        capability=Capability(rng.randint(0, 100), rng.randint(0, 100), rng.randint(0, 100)),
        transport=rng.choice(TRANSPORTS),
    )


def _halt_point(a: GeoPoint, b: GeoPoint, places: Sequence[GeoPoint], gap: float) -> Optional[GeoPoint]:
    """Somewhere along a leg at least ``gap`` metres from both ends and every itinerary place."""
    for f in (0.5, 0.4, 0.6, 0.3, 0.7):
        p = intermediate(a, b, f)
        if min(geo_distance(p, q) for q in (a, b, *places)) >= gap:
            return p
    return None


def gen_runs(world: World, params: GenParams) -> RunSet:
    """Simulate every collector's day: dwell, drive, react to navigation events."""
    _check_params(params, world)
    root = SplitMix64(params.seed)
    mics, itineraries, events, fixes, truths = [], {}, [], [], {}
    for i in range(params.n_mics):
        rng = root.fork(i)
        mic = _mic(rng, i)
        mics.append(mic)
        state, truth = _simulate(world, params, mic, rng, i)
        itineraries[mic.mic_id] = state
        truths[mic.mic_id] = truth
        events.extend(truth.events)
        fixes.extend(truth.fixes)
    return RunSet(tuple(mics), itineraries, tuple(events), tuple(fixes), truths)


def _plan(world: World, params: GenParams, mic: Mic, rng: SplitMix64, t_start: int) -> ItineraryState:
    walk = [rng.choice(world.network.nodes)]
    while len(walk) < params.stops_per_itinerary:
        walk.append(rng.choice(world.network.neighbours(walk[-1])))
    dests, alternates, equivalences = [], [], {}
    t = t_start
    nominal_speed = (mic.transport.v_min + mic.transport.v_max) / 2
    prev = None
    for k, did in enumerate(walk):
        centre = world.sites[did][0]
        if prev is not None:
            t += params.fix_period_s * math.ceil(geo_distance(prev, centre) / (nominal_speed * params.fix_period_s))
        dwell = params.fix_period_s * math.ceil(params.dwell_s / params.fix_period_s)
        dest_id = f"{mic.mic_id}-d{k}"
        window = TimeInterval(t, t + dwell)
        dests.append(Destination(dest_id, did, centre, window, standard_tasks(dest_id)))
        if k > 0 and rng.uniform() < params.equivalent_rate:
            n_alt = rng.randint(1, 2)
            alt_ids = []
            for j in range(n_alt):
                alt_id = f"{dest_id}-alt{j}"
                alternates.append(Destination(alt_id, did, world.sites[did][1 + j], window, standard_tasks(alt_id)))
                alt_ids.append(alt_id)
            equivalences[dest_id] = alt_ids
        t += dwell + 1
        prev = centre
    return plan_static(mic.mic_id, dests, equivalences, alternates)


def _simulate(world: World, params: GenParams, mic: Mic, rng: SplitMix64, index: int):
    t = params.t0 + params.fix_period_s * rng.randint(0, 60)
    state = _plan(world, params, mic, rng, t)
    plan = state
    rec = _Recorder(mic.mic_id, rng, params, mic.transport)
    places = [d.pos for d in state.all_places()]

    current = state.current
    pos = current.pos
    t = rec.dwell(pos, t, StopKind.PLANNED)
    state = advance(state, [task.task_id for task in current.tasks])
    n_event = 0
    while state.current is not None:
        target = state.current
        roll = rng.uniform()
        # a halt must sit clear of the itinerary places (so it is not mistaken for a planned stop)
        # and leave legs long enough to drive at the minimum speed
        gap = max(HALT_CLEARANCE_M, 2 * mic.transport.v_min * params.fix_period_s)
        halt = _halt_point(pos, target.pos, places, gap) if roll < params.event_rate + params.private_rate else None
        if halt is not None:
            t = rec.travel(pos, halt, t)
            pos = halt
            if roll < params.event_rate:
                n = math.ceil(params.dwell_s / params.fix_period_s)
                event = NavigationEvent(
                    f"{mic.mic_id}-e{n_event}", rng.choice(EVENT_KINDS),
                    TimeInterval(t, t + n * params.fix_period_s), target.destination_id,
                )
                n_event += 1
                rec.truth.events.append(event)
                t = rec.dwell(pos, t, StopKind.UNFORESEEN)
                try:
                    state = apply_event(state, event)
                except NoEquivalentAvailable as exc:
                    state = exc.state
                    continue
                target = state.current
            else:
                t = rec.dwell(pos, t, StopKind.PRIVATE)
        t = rec.travel(pos, target.pos, t)
        pos = target.pos
        t = rec.dwell(pos, t, StopKind.PLANNED)
        state = advance(state, [task.task_id for task in target.tasks])
    rec.truth.final_state = state
    return plan, rec.truth
