"""
Flying in line formation
========================

"""
import numpy as np

from covplan.formation import FormationSpec, formation_paths, formation_radius
from covplan.geometry import Roi
from covplan.trajectory import SpeedProfile

spec = FormationSpec(n=3, w=4.0)
print("lateral offsets", spec.offsets)

roi = Roi([(0, 0), (120, 0), (120, 72), (0, 72)])
traj = formation_paths(roi, spec, SpeedProfile(5, 3, 2), dt=0.5)

# neighbours stay exactly w apart, so the radius equals w for the whole flight
gaps = np.linalg.norm(traj.positions[1:] - traj.positions[:-1], axis=-1)
print("neighbour gap min/max", gaps.min().round(9), gaps.max().round(9))
print("r =", formation_radius(traj), "over", traj.horizon_T, "s")
