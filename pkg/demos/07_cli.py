"""
Planning from a mission file
============================

The same run from a shell is ``covplan plan -c mission.json -o out``.
"""
import json
import tempfile
from pathlib import Path

from covplan.cli import main

work = Path(tempfile.mkdtemp())
mission = {
    "roi": {"outer": [[0, 0], [180, 0], [180, 120], [0, 120]]},
    "n_uavs": 2,
    "footprint_side": 10.0,
    "lambda": 1.0,
    "n_darp": 30,
    "n_launch": 10,
    "rng_seed": 7,
}
(work / "mission.json").write_text(json.dumps(mission))

main(["plan", "-c", str(work / "mission.json"), "-o", str(work / "out")])
print(sorted(p.name for p in (work / "out").iterdir()))

# evaluate re-scores plan.json from scratch; exit code 0 means every metric matched
print("evaluate exit code", main(["evaluate", str(work / "out" / "plan.json")]))

main(["pareto", "-c", str(work / "mission.json"), "--lambdas", "0,0.5,2", "-o", str(work / "sweep")])
print((work / "sweep" / "pareto.csv").read_text())
