"""
Splitting the grid and building coverage loops
==============================================

"""
from covplan.geometry import GridSpec, Roi, discretize
from covplan.partition import NonTerminating, darp_partition, is_connected, sample_seed_vector
from covplan.stc import stc_loop

roi = Roi([(0, 0), (240, 0), (240, 180), (0, 180)])
grid = discretize(roi, GridSpec.identity(roi, 10.0))
print(len(grid), "cells")

# grow three regions from random seed cells, 50/30/20 split
w = [0.5, 0.3, 0.2]
for attempt in range(50):
    seeds = sample_seed_vector(grid, 3, attempt)
    try:
        part = darp_partition(grid, seeds, w)
        break
    except NonTerminating:
        # a region got walled in before reaching its share; draw again
        continue
print("seeds", seeds, "after", attempt + 1, "draws; sizes", part.sizes())
print("connected:", [is_connected(grid, r) for r in part.regions])

# one closed loop per region, four waypoints per cell
for i, region in enumerate(part.regions):
    loop = stc_loop(region, grid, i)
    print(f"uav {i}: {len(loop)} waypoints, {loop.length:.0f} m, {loop.turn_count()} turns")
