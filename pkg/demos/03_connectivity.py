"""
Connectivity radius along a mission
===================================

"""
import numpy as np

from covplan.connectivity import radius_at, radius_max_lipschitz, radius_profile_grid
from covplan.stc import CoveragePath
from covplan.trajectory import SpeedProfile, sample_trajectory

# the smallest radio range that keeps these four points connected
print(radius_at([(0, 0), (10, 0), (10, 25), (40, 25)]))

# three UAVs flying nested square loops of different size
loops = [CoveragePath([(0, 0), (s, 0), (s, s), (0, s)]) for s in (30, 50, 70)]
traj = sample_trajectory(loops, launch=[3, 0, 3], profile=SpeedProfile(5, 3, 2), dt=1.0)
print("mission length", traj.horizon_T, "s")

prof = radius_profile_grid(traj)
print("sampled max r", round(prof.r_max, 3), "at t =", prof.argmax_t)

# between samples r can be larger; the Lipschitz search certifies the max to eps
r, t, evals = radius_max_lipschitz(traj, eps=0.05)
print("certified max r", round(r, 3), "at t =", round(t, 2), "after", evals, "evaluations")

fine = sample_trajectory(loops, [3, 0, 3], SpeedProfile(5, 3, 2), dt=0.01)
print("dense grid at dt = 0.01:", round(radius_profile_grid(fine).r_max, 3),
      "from", len(fine.times), "samples")
print("mean r", np.mean(prof.r).round(2))
