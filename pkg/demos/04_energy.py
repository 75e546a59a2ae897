"""
Energy of a fleet mission
=========================

"""
from covplan.energy import PowerModel, mission_energy, to_wh
from covplan.stc import CoveragePath
from covplan.trajectory import SpeedProfile, sample_trajectory

power = PowerModel()  # hover 492 W, forward 488 W, turn 509 W
loops = [CoveragePath([(0, 0), (s, 0), (s, s), (0, s)]) for s in (100, 150)]
traj = sample_trajectory(loops, [0, 0], SpeedProfile(5, 3, 2), dt=1.0)

# seconds spent in each state; the smaller loop hovers while it waits
for i, d in enumerate(traj.durations):
    print(f"uav {i}:", dict(zip(("hover", "forward", "turn"), d.round(2).tolist())))

print("with hover   ", round(to_wh(mission_energy(traj, power)), 3), "Wh")
# the planner charges only loop traversal
print("loop only    ", round(to_wh(mission_energy(traj, power, include_hover=False)), 3), "Wh")
