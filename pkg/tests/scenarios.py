"""Ten scripted rerouting scenarios with hand-traced expectations.

Plan is always d1, d2, d3; the places d5, d7, d8 exist only as alternates.
Script steps are ``("event", event_id, target_or_None, begin, end)`` or
``("advance", "all" | "none" | kinds)``. Expected values:

- ``active``: every destination id that became active, in order
- ``reroutes``: (event_id, from, to_or_None) triples
- ``status``: per slot, the final (destination_id, statuses of observe/collect/send)
- ``raises``: event ids for which apply_event raises NoEquivalentAvailable
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from trajwarehouse.core import GeoPoint, TimeInterval
from trajwarehouse.itinerary import (
    Destination,
    NavigationEvent,
    TaskKind,
    TaskStatus,
    advance,
    apply_event,
    apply_event_or_skip,
    plan_static,
    standard_tasks,
)
from trajwarehouse.errors import NoEquivalentAvailable

D, P, S = "Done", "Pending", "Skipped"
ALL_DONE, ALL_PENDING, ALL_SKIPPED = (D, D, D), (P, P, P), (S, S, S)


def dest(did: str, k: int) -> Destination:
    return Destination(did, f"DL-{did}", GeoPoint(36.0 + k / 100, 10.0), TimeInterval(1000 * k, 1000 * k + 500),
                       standard_tasks(did))


def make_plan(equivalences):
    plan = [dest(f"d{k}", k) for k in (1, 2, 3)]
    alternates = [dest(f"d{k}", k) for k in (5, 7, 8)]
    return plan_static("mic", plan, equivalences, alternates)


@dataclass
class Scenario:
    name: str
    equivalences: dict
    script: list
    active: list
    reroutes: list
    status: list
    raises: list = field(default_factory=list)
    cursor: int = 3


SCENARIOS = [
    Scenario(
        "single equivalent replaces the blocked destination",
        {"d2": ["d5"]},
        [("advance", "all"), ("event", "e1", "d2", 1000, 1600), ("advance", "all"), ("advance", "all")],
        ["d1", "d2", "d5", "d3"],
        [("e1", "d2", "d5")],
        [("d1", ALL_DONE), ("d5", ALL_DONE), ("d3", ALL_DONE)],
    ),
    Scenario(
        "no equivalent skips the destination",
        {},
        [("advance", "all"), ("event", "e1", "d2", 1000, 1600), ("advance", "none")],
        ["d1", "d2", "d3"],
        [("e1", "d2", None)],
        [("d1", ALL_DONE), ("d2", ALL_SKIPPED), ("d3", ALL_PENDING)],
        raises=["e1"],
    ),
    Scenario(
        "blocked first equivalent falls through to the second",
        {"d2": ["d5", "d7"]},
        [("event", "e1", "d5", 900, 1300), ("advance", "all"), ("event", "e2", "d2", 1000, 1600),
         ("advance", "all"), ("advance", "all")],
        ["d1", "d2", "d7", "d3"],
        [("e2", "d2", "d7")],
        [("d1", ALL_DONE), ("d7", ALL_DONE), ("d3", ALL_DONE)],
    ),
    Scenario(
        "chained events walk a cyclic map then skip",
        {"d2": ["d5"], "d5": ["d7"], "d7": ["d2"]},
        [("advance", "all"), ("event", "e1", "d2", 1000, 1100), ("event", "e2", "d5", 1100, 1200),
         ("event", "e3", "d7", 1200, 1300), ("advance", "all")],
        ["d1", "d2", "d5", "d7", "d3"],
        [("e1", "d2", "d5"), ("e2", "d5", "d7"), ("e3", "d7", None)],
        [("d1", ALL_DONE), ("d7", ALL_SKIPPED), ("d3", ALL_DONE)],
        raises=["e3"],
    ),
    Scenario(
        "exhausted equivalence list",
        {"d2": ["d5", "d7"]},
        [("advance", "all"), ("event", "e1", "d2", 1000, 1100), ("event", "e2", "d5", 1100, 1200),
         ("event", "e3", "d7", 1200, 1300), ("advance", ["Observe"])],
        ["d1", "d2", "d5", "d7", "d3"],
        [("e1", "d2", "d5"), ("e2", "d5", "d7"), ("e3", "d7", None)],
        [("d1", ALL_DONE), ("d7", ALL_SKIPPED), ("d3", (D, P, P))],
        raises=["e3"],
    ),
    Scenario(
        "a planned destination is never borrowed as an equivalent",
        {"d1": ["d3"]},
        [("event", "e1", "d1", 0, 100), ("advance", "all"), ("advance", "all")],
        ["d1", "d2", "d3"],
        [("e1", "d1", None)],
        [("d1", ALL_SKIPPED), ("d2", ALL_DONE), ("d3", ALL_DONE)],
        raises=["e1"],
    ),
    Scenario(
        "global event is only logged",
        {"d1": ["d5"]},
        [("event", "e1", None, 0, 100), ("advance", "all"), ("advance", "all"), ("advance", "all")],
        ["d1", "d2", "d3"],
        [],
        [("d1", ALL_DONE), ("d2", ALL_DONE), ("d3", ALL_DONE)],
    ),
    Scenario(
        "event aimed at a later destination waits until it is active",
        {"d3": ["d5"]},
        [("event", "e1", "d3", 0, 100), ("advance", "all"), ("advance", "all"),
         ("event", "e2", "d3", 2000, 2600), ("advance", ["Collect", "Send"])],
        ["d1", "d2", "d3", "d5"],
        [("e2", "d3", "d5")],
        [("d1", ALL_DONE), ("d2", ALL_DONE), ("d5", (P, D, D))],
    ),
    Scenario(
        "old event on an equivalent does not block a later reroute",
        {"d2": ["d5", "d7"]},
        [("event", "e1", "d5", 0, 10), ("advance", "all"), ("event", "e2", "d2", 1000, 1600),
         ("advance", "all"), ("advance", "all")],
        ["d1", "d2", "d5", "d3"],
        [("e2", "d2", "d5")],
        [("d1", ALL_DONE), ("d5", ALL_DONE), ("d3", ALL_DONE)],
    ),
    Scenario(
        "skip on the last slot completes the plan; later events are logged",
        {"d3": ["d8"], "d8": ["d3"]},
        [("advance", "all"), ("advance", "none"), ("event", "e1", "d3", 2000, 2100),
         ("event", "e2", "d8", 2100, 2200), ("event", "e3", "d8", 2200, 2300)],
        ["d1", "d2", "d3", "d8"],
        [("e1", "d3", "d8"), ("e2", "d8", None)],
        [("d1", ALL_DONE), ("d2", ALL_PENDING), ("d8", ALL_SKIPPED)],
        raises=["e2"],
    ),
]


def run_scenario(sc: Scenario):
    """Replay a script; returns (final state, active ids, ids of raising events)."""
    state = make_plan(sc.equivalences)
    active = [state.current.destination_id]
    raised = []

    def note(s):
        if s.current is not None and s.current.destination_id != active[-1]:
            active.append(s.current.destination_id)

    for step in sc.script:
        if step[0] == "advance":
            what = step[1]
            if what == "all":
                done = {t.task_id for t in state.current.tasks}
            elif what == "none":
                done = set()
            else:
                done = {t.task_id for t in state.current.tasks if t.kind in {TaskKind(k) for k in what}}
            state = advance(state, done)
        else:
            _, eid, target, a, b = step
            try:
                state = apply_event(state, NavigationEvent(eid, "breakdown", TimeInterval(a, b), target))
            except NoEquivalentAvailable as exc:
                raised.append(eid)
                state = exc.state
        note(state)
    return state, active, raised


def check_scenario(sc):
    state, active, raised = run_scenario(sc)
    assert active == sc.active
    assert [(r.event_id, r.from_destination_id, r.to_destination_id) for r in state.reroute_log] == sc.reroutes
    got = [(d.destination_id, tuple(t.status.value for t in d.tasks)) for d in state.destinations]
    assert got == sc.status
    assert raised == sc.raises
    assert state.cursor == sc.cursor


# --- adversarial equivalence maps ------------------------------------------------------


def random_world(rng: random.Random):
    """A plan plus alternates with a random (often cyclic) equivalence map."""
    n_plan, n_alt = rng.randint(1, 6), rng.randint(0, 6)
    plan = [dest(f"p{k}", k) for k in range(n_plan)]
    alts = [dest(f"a{k}", 10 + k) for k in range(n_alt)]
    ids = [d.destination_id for d in plan + alts]
    eq = {}
    for did in ids:
        others = [x for x in ids if x != did]
        if others and rng.random() < 0.8:
            eq[did] = rng.sample(others, rng.randint(1, min(4, len(others))))
    return plan_static("m", plan, eq, alts)


def drive(state, rng, max_steps=500):
    """Random events and advances until the plan is done; returns (final state, active ids)."""
    active = [state.current.destination_id]
    statuses = {}
    cursor = state.cursor
    steps = 0
    eid = 0
    while state.current is not None:
        steps += 1
        assert steps <= max_steps, "itinerary did not terminate"
        if rng.random() < 0.6:
            eid += 1
            target = rng.choice([state.current.destination_id, None, rng.choice(list(state.equivalences) or [None])])
            t = rng.randint(0, 20_000)
            event = NavigationEvent(f"e{eid}", "breakdown", TimeInterval(t, t + rng.randint(0, 3000)), target)
            state = apply_event_or_skip(state, event)
        else:
            state = advance(state, {t.task_id for t in state.current.tasks if rng.random() < 0.5})
        assert state.cursor >= cursor
        cursor = state.cursor
        if state.current is not None and state.current.destination_id != active[-1]:
            active.append(state.current.destination_id)
        for d in state.destinations:
            for t in d.tasks:
                prev = statuses.get(t.task_id)
                if prev is not None and prev is not TaskStatus.PENDING:
                    assert t.status is prev, f"task {t.task_id} left {prev}"
                statuses[t.task_id] = t.status
    return state, active


def check_adversarial(seed):
    """Drive a random map to completion; assert no revisits and that every reroute is justified."""
    rng = random.Random(seed)
    state, active = drive(random_world(rng), rng)
    assert len(active) == len(set(active)), active
    events = {e.event_id for e in state.event_log}
    for r in state.reroute_log:
        assert r.event_id in events
        if r.to_destination_id is not None:
            # the target comes from the equivalences of the blocked place or of its slot's original
            reachable = set(state.equivalences.get(r.from_destination_id, ()))
            for origin in state.slot_origin:
                reachable |= set(state.equivalences.get(origin, ()))
            assert r.to_destination_id in reachable
