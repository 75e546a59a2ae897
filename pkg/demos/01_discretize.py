"""
Gridding a field with a no-fly zone
===================================

"""
from covplan.geometry import GridSpec, Roi, covered_ratio, discretize, optimize_alignment

# a 350 x 220 m field with a square no-fly zone in the middle
roi = Roi([(0, 0), (350, 0), (350, 220), (0, 220)],
          [[(150, 80), (200, 80), (200, 130), (150, 130)]])
print("area", roi.area, "m^2")

# a 15 m sensor footprint gives 30 m mega-cells
grid = discretize(roi, GridSpec.identity(roi, 15.0))
print(len(grid), "cells, covered fraction", round(covered_ratio(roi, grid.spec), 3))

# with tau < 1 partially covered cells are kept as well
loose = discretize(roi, GridSpec.identity(roi, 15.0, tau=0.5))
print(len(loose), "cells at tau = 0.5")

# rotating and shifting the grid can fit more whole cells into a tilted field
tilted = Roi([(0, 0), (300, 173.2), (213.4, 323.2), (-86.6, 150)])
plain = discretize(tilted, GridSpec.identity(tilted, 15.0))
spec = optimize_alignment(tilted, 15.0, 1.0, budget=32)
print("tilted field:", len(plain), "cells unaligned,", len(discretize(tilted, spec)),
      "cells at theta =", round(spec.rotation_theta, 4))
