# %% [markdown]
# # From a raw GPS trace to stops and moves
#
# A collector drives between a few places, waits at each one, and its device
# logs a fix every 30 seconds. We simulate such a day, then recover the stops
# from the fixes alone.

# %%
from trajwarehouse import GenParams, NetworkSpec, SegmentationParams, gen_runs, gen_world, segment

world = gen_world(NetworkSpec(seed=11, n_delegations=5))
runs = gen_runs(world, GenParams(seed=11, n_mics=1, stops_per_itinerary=4, noise_m=10.0))
mic_id, truth = next(iter(runs.ground_truth.items()))
print(f"{mic_id}: {len(truth.fixes)} fixes, {len(truth.stops)} true stops")

# %% [markdown]
# A stop is a run of fixes that stays within `eps_m` of its first fix for at
# least `tau_min_s` seconds. Everything between two stops is a move.

# %%
params = SegmentationParams(eps_m=50, tau_min_s=300)
traj = segment(truth.fixes, params, trajectory_id=1)
for section in traj.sections:
    s, m = section.from_stop, section.move
    print(f"stop {s.stop_id:<14} {s.interval.duration():>5d} s   then move of {len(m.path):>3d} fixes")
last = traj.sections[-1].to_stop
print(f"stop {last.stop_id:<14} {last.interval.duration():>5d} s")

# %% [markdown]
# The simulator knows where it really stopped, so we can compare.

# %%
for got, want in zip(traj.stops, truth.stops):
    print(got.interval, want.interval, want.kind.value)
