"""
Choosing seeds and launch points
================================

"""
from collections import Counter

from covplan.energy import PowerModel
from covplan.geometry import GridSpec, Roi, discretize
from covplan.objective import ObjectiveConfig
from covplan.optimizer import outer_optimize
from covplan.trajectory import SpeedProfile

roi = Roi([(0, 0), (120, 0), (120, 120), (0, 120)])
grid = discretize(roi, GridSpec.identity(roi, 10.0))

# f_o = r + lambda * e with r in metres and e in Wh
for lam in (0.0, 1.0):
    res = outer_optimize(grid, [0.5, 0.5], SpeedProfile(), PowerModel(), ObjectiveConfig(lam=lam),
                         n_darp=40, n_launch=15, rng_seed=1)
    print(f"lambda={lam}: r={res.r:.2f} m  e={res.e:.2f} Wh  f_o={res.f_o:.2f}")
    print("  seeds", res.seeds, "launch", res.launch)
    print("  trial status", dict(Counter(t["status"] for t in res.trials)),
          "inner evaluations", res.inner_evaluations)

# the incumbent keeps improving as trials go by
best = [t["best_f_o"] for t in res.trials]
print("incumbent every 10 trials:", [round(b, 2) for b in best[::10]])
