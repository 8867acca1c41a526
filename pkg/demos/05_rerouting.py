# %% [markdown]
# # Rerouting a collector around a blocked destination
#
# An itinerary is a list of destinations, each with a time window and three
# tasks. When an event blocks the current destination, the collector moves to
# an equivalent place if one is free, otherwise the destination is skipped.

# %%
from trajwarehouse import GeoPoint, TimeInterval
from trajwarehouse.errors import NoEquivalentAvailable
from trajwarehouse.itinerary import (
    Destination,
    NavigationEvent,
    advance,
    apply_event,
    next_destination,
    plan_static,
    standard_tasks,
)


def place(did, k):
    return Destination(did, "D1", GeoPoint(36.0 + k / 100, 10.0), TimeInterval(1000 * k, 1000 * k + 500),
                       standard_tasks(did))


plan = [place("market", 1), place("farm", 2), place("port", 3)]
alternates = [place("farm-east", 2), place("farm-west", 2)]
state = plan_static("mic01", plan, {"farm": ["farm-east", "farm-west"]}, alternates)

# %% Finish the market, then the road to the farm is flooded
state = advance(state, [t.task_id for t in state.current.tasks])
state = apply_event(state, NavigationEvent("e1", "flood", TimeInterval(1900, 2600), "farm"))
print("now heading to", next_destination(state).destination_id)

# %% The east farm breaks down too; the west farm is next
state = apply_event(state, NavigationEvent("e2", "breakdown", TimeInterval(2000, 2100), "farm-east"))
print("now heading to", next_destination(state).destination_id)

# %% With nothing left, the slot is skipped and the port becomes current
try:
    state = apply_event(state, NavigationEvent("e3", "strike", TimeInterval(2100, 2200), "farm-west"))
except NoEquivalentAvailable as exc:
    state = exc.state
print("now heading to", next_destination(state).destination_id)
for r in state.reroute_log:
    print(r.event_id, r.from_destination_id, "->", r.to_destination_id)
