"""Static plans, navigation events and rerouting to equivalent places.

Every transition returns a new :class:`ItineraryState`; nothing is mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .core import GeoPoint, TimeInterval
from .errors import (
    DuplicateDestination,
    EmptyPlan,
    InvariantViolation,
    NoEquivalentAvailable,
    OverlappingWindows,
    PlanExhausted,
)


class TaskKind(str, Enum):
    OBSERVE = "Observe"
    COLLECT = "Collect"
    SEND = "Send"


class TaskStatus(str, Enum):
    PENDING = "Pending"
    DONE = "Done"
    SKIPPED = "Skipped"


@dataclass(frozen=True)
class Task:
    task_id: str
    kind: TaskKind
    destination_id: str
    status: TaskStatus = TaskStatus.PENDING


def standard_tasks(destination_id: str) -> tuple[Task, ...]:
    """Observe, collect and send: the three jobs due at every stop."""
    return tuple(Task(f"{destination_id}:{k.value.lower()}", k, destination_id) for k in TaskKind)


@dataclass(frozen=True)
class Destination:
    destination_id: str
    delegation_id: str
    pos: GeoPoint
    planned_window: TimeInterval
    tasks: tuple[Task, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tasks", tuple(self.tasks))
        for task in self.tasks:
            if task.destination_id != self.destination_id:
                raise InvariantViolation(f"task {task.task_id} does not belong to {self.destination_id}")

    def with_task_status(self, status: TaskStatus, only: Optional[set] = None) -> Destination:
        tasks = tuple(
            replace(t, status=status)
            if t.status is TaskStatus.PENDING and (only is None or t.task_id in only)
            else t
            for t in self.tasks
        )
        return replace(self, tasks=tasks)


@dataclass(frozen=True)
class NavigationEvent:
    event_id: str
    kind: str
    interval: TimeInterval
    at_destination_id: Optional[str] = None


@dataclass(frozen=True)
class Reroute:
    event_id: str
    from_destination_id: str
    to_destination_id: Optional[str]  # None marks a skipped destination


@dataclass(frozen=True)
class ItineraryState:
    mic_id: str
    destinations: tuple[Destination, ...]
    cursor: int = 0
    equivalences: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    alternates: Mapping[str, Destination] = field(default_factory=dict)
    event_log: tuple[NavigationEvent, ...] = ()
    reroute_log: tuple[Reroute, ...] = ()
    # planned destination id originally occupying each slot
    slot_origin: tuple[str, ...] = ()
    # ids that have ever been the active destination
    visited: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not 0 <= self.cursor <= len(self.destinations):
            raise InvariantViolation(f"cursor {self.cursor} outside 0..{len(self.destinations)}")

    @property
    def current(self) -> Optional[Destination]:
        return self.destinations[self.cursor] if self.cursor < len(self.destinations) else None

    def place(self, destination_id: str) -> Optional[Destination]:
        for d in self.destinations:
            if d.destination_id == destination_id:
                return d
        return self.alternates.get(destination_id)

    def all_places(self) -> list[Destination]:
        """Planned destinations followed by every registered equivalent place."""
        seen = {d.destination_id for d in self.destinations}
        out = list(self.destinations)
        out.extend(d for k, d in self.alternates.items() if k not in seen)
        return out


def _check_equivalences(equivalences: Mapping[str, Sequence[str]], known: set) -> dict:
    checked = {}
    for dest, eqs in equivalences.items():
        eqs = tuple(eqs)
        if dest in eqs:
            raise InvariantViolation(f"destination {dest} lists itself as an equivalent")
        missing = [e for e in (dest, *eqs) if e not in known]
        if missing:
            raise InvariantViolation(f"equivalence map references unknown destinations {missing}")
        checked[dest] = eqs
    return checked


def plan_static(
    mic_id: str,
    destinations: Sequence[Destination],
    equivalences: Optional[Mapping[str, Sequence[str]]] = None,
    alternates: Iterable[Destination] = (),
) -> ItineraryState:
    """Build the initial itinerary.

    ``alternates`` are equivalent places that are not part of the planned
    sequence; ``equivalences`` maps a destination id to its ordered list of
    substitutes, drawn from the plan or the alternates.
    """
    destinations = tuple(destinations)
    if not destinations:
        raise EmptyPlan(f"empty plan for {mic_id}")
    ids = [d.destination_id for d in destinations]
    if len(set(ids)) != len(ids):
        raise DuplicateDestination(f"plan for {mic_id} repeats a destination id")
    for prev, nxt in zip(destinations, destinations[1:]):
        if nxt.planned_window.t_begin <= prev.planned_window.t_end:
            raise OverlappingWindows(
                f"windows of {prev.destination_id} and {nxt.destination_id} overlap or are out of order"
            )
    alt = {a.destination_id: a for a in alternates if a.destination_id not in ids}
    eq = _check_equivalences(equivalences or {}, set(ids) | set(alt))
    return ItineraryState(
        mic_id=mic_id,
        destinations=destinations,
        equivalences=eq,
        alternates=alt,
        slot_origin=tuple(ids),
        visited=frozenset(ids[:1]),
    )


def next_destination(state: ItineraryState) -> Optional[Destination]:
    return state.current


def _blocked(state: ItineraryState, destination_id: str, window: TimeInterval) -> bool:
    return any(e.at_destination_id == destination_id and e.interval.overlaps(window) for e in state.event_log)


def _enter(state: ItineraryState, cursor: int) -> ItineraryState:
    visited = state.visited
    if cursor < len(state.destinations):
        visited = visited | {state.destinations[cursor].destination_id}
    return replace(state, cursor=cursor, visited=visited)


def apply_event(state: ItineraryState, event: NavigationEvent) -> ItineraryState:
    """Log a navigation event and reroute if it blocks the active destination.

    Equivalents are tried in list order; one is usable if it has never been
    active, is not a planned destination, and is not blocked by a logged event
    overlapping this one. When none is usable the destination's pending tasks
    are skipped, the cursor advances, and :class:`NoEquivalentAvailable` is
    raised carrying the new state.
    """
    state = replace(state, event_log=state.event_log + (event,))
    current = state.current
    if event.at_destination_id is None or current is None or event.at_destination_id != current.destination_id:
        # global events and events aimed elsewhere are only recorded
        return state

    origin = state.slot_origin[state.cursor]
    planned = {d for d in state.slot_origin}
    candidates = dict.fromkeys(
        state.equivalences.get(current.destination_id, ()) + state.equivalences.get(origin, ())
    )
    for cand_id in candidates:
        if cand_id in state.visited or cand_id in planned:
            continue
        if _blocked(state, cand_id, event.interval):
            continue
        cand = state.place(cand_id)
        substitute = replace(
            cand,
            planned_window=current.planned_window,
            tasks=tuple(replace(t, destination_id=cand_id) for t in current.tasks),
        )
        dests = list(state.destinations)
        dests[state.cursor] = substitute
        return replace(
            state,
            destinations=tuple(dests),
            visited=state.visited | {cand_id},
            reroute_log=state.reroute_log + (Reroute(event.event_id, current.destination_id, cand_id),),
        )

    dests = list(state.destinations)
    dests[state.cursor] = current.with_task_status(TaskStatus.SKIPPED)
    skipped = _enter(
        replace(
            state,
            destinations=tuple(dests),
            reroute_log=state.reroute_log + (Reroute(event.event_id, current.destination_id, None),),
        ),
        state.cursor + 1,
    )
    raise NoEquivalentAvailable(f"no usable equivalent for {current.destination_id}", state=skipped)


def apply_event_or_skip(state: ItineraryState, event: NavigationEvent) -> ItineraryState:
    """Like :func:`apply_event` but returns the skipped state instead of raising."""
    try:
        return apply_event(state, event)
    except NoEquivalentAvailable as exc:
        return exc.state


def advance(state: ItineraryState, completed_tasks: Iterable[str] = ()) -> ItineraryState:
    """Mark the listed tasks done at the active destination and move on."""
    current = state.current
    if current is None:
        raise PlanExhausted(f"itinerary of {state.mic_id} is complete")
    done = set(completed_tasks)
    dests = list(state.destinations)
    dests[state.cursor] = current.with_task_status(TaskStatus.DONE, only=done)
    return _enter(replace(state, destinations=tuple(dests)), state.cursor + 1)
