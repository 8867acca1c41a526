# %% [markdown]
# # Analytical queries on the curated fixture
#
# The fixture has a handful of trajectories through Sousse, Hammamet and Tunis
# with hand-placed hotels, lakes, farms and factories.

# %%
from trajwarehouse import load
from trajwarehouse.fixtures import tunisia_fixture
from trajwarehouse.query import (
    q1_touristic_places_on_trajectory,
    q2_count_agriculture,
    q3_lakes_on_trajectory,
    q4_trajectories_with_sea_and_touristic,
    q5_hotels,
    q6_trajectories_min_touristic,
)

g = tunisia_fixture()
wh = load(g.trajectories, g.mics, g.gazetteer, g.admin_places)

# %% Touristic places passed by trajectory 34 in Tunisia
print(q1_touristic_places_on_trajectory(wh, 34, "Tunisia").canonical())

# %% Agricultural companies in the delegation of Sousse
print(q2_count_agriculture(wh, "Tunisia", "sousse"))

# %% Lakes near trajectory 20
print(q3_lakes_on_trajectory(wh, 20).canonical())

# %% Trajectories that pass both the sea and a touristic place
print(q4_trajectories_with_sea_and_touristic(wh).rows)

# %% Five-star hotels in Hammamet
print(q5_hotels(wh, "Hammamet", "hotel", "5stars").canonical())

# %% Trajectories linked to more than ten touristic places
print(q6_trajectories_min_touristic(wh, 10).rows)
