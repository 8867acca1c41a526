# %% [markdown]
# # Counting points of interest up the administrative hierarchy
#
# Delegations roll up into countries. The per-country count is the sum of its
# delegations, and the grand total does not depend on the level.

# %%
from trajwarehouse import NetworkSpec, PoiKind, gen_world, load, rollup_poi_count

world = gen_world(NetworkSpec(seed=8, n_delegations=8, n_countries=2, n_pois_per_delegation=25))
wh = load([], [], world.gazetteer, world.admin_places)

# %%
fine = rollup_poi_count(wh, ["country", "delegation"], PoiKind.TOURISTIC)
for key, n in fine.groups.items():
    print(" / ".join(fine.labels[key]), n)

# %%
coarse = rollup_poi_count(wh, ["country"], PoiKind.TOURISTIC)
for key, n in coarse.groups.items():
    print(coarse.labels[key][0], n)
print("grand totals:", fine.grand_total, coarse.grand_total)
