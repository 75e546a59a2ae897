import copy
import json

import pytest

from covplan.cli import (
    EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_MISMATCH, EXIT_OK, load_mission, main, nondominated,
    pareto_sweep,
)

RECT = [[0, 0], [350, 0], [350, 220], [0, 220]]


def write_mission(tmp_path, name="mission.json", **kw):
    doc = {"roi": {"outer": RECT}, "n_uavs": 3, "footprint_area": 225.0,
           "dt": 1.0, "n_darp": 30, "n_launch": 6, "alignment_budget": 4}
    doc.update(kw)
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture(scope="module")
def rect_plan(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("rect")
    cfg = write_mission(tmp)
    assert main(["plan", "-c", str(cfg), "-o", str(tmp / "out")]) == EXIT_OK
    return tmp / "out"


def test_rectangle_scenario(rect_plan):
    doc = json.loads((rect_plan / "plan.json").read_text())
    assert len(doc["paths"]) == 3
    # 350 x 220 m at a 15 m footprint: 23 x 14 = 322 sub-cells at most, i.e. <= 80 full cells
    assert 70 <= doc["grid"]["n_cells"] <= 90
    sub = sum(len(p["waypoints"]) for p in doc["paths"])
    assert sub == 4 * doc["grid"]["n_cells"]
    for name in ["paths.geojson", "radius.csv", "trajectory.csv", "radius.gp", "trials.csv"]:
        assert (rect_plan / name).exists()
    gj = json.loads((rect_plan / "paths.geojson").read_text())
    assert len(gj["features"]) == 3
    traj = (rect_plan / "trajectory.csv").read_text().splitlines()
    assert traj[0] == "t,uav,x,y,state"
    states = {line.rsplit(",", 1)[1] for line in traj[1:]}
    assert states <= {"hover", "forward", "turn"}
    trials = (rect_plan / "trials.csv").read_text().splitlines()
    assert trials[0] == "trial,f_o,r,e,status" and len(trials) == 31


def test_evaluate_round_trip(rect_plan, capsys):
    assert main(["evaluate", str(rect_plan / "plan.json")]) == EXIT_OK
    assert "MISMATCH" not in capsys.readouterr().out


def test_edited_launch_is_detected(rect_plan, tmp_path, capsys):
    doc = json.loads((rect_plan / "plan.json").read_text())
    edited = copy.deepcopy(doc)
    n = len(edited["paths"][1]["waypoints"])
    edited["launch"][1] = (edited["launch"][1] + n // 2) % n
    (tmp_path / "plan.json").write_text(json.dumps(edited))
    assert main(["evaluate", str(tmp_path / "plan.json")]) == EXIT_MISMATCH
    out = capsys.readouterr().out
    assert "MISMATCH r" in out


def test_corrupted_plan(tmp_path):
    (tmp_path / "plan.json").write_text("{not json")
    assert main(["evaluate", str(tmp_path / "plan.json")]) == EXIT_CONFIG
    (tmp_path / "plan.json").write_text(json.dumps({"schema": 1, "metrics": {}}))
    assert main(["evaluate", str(tmp_path / "plan.json")]) == EXIT_CONFIG


def test_out_of_range_launch(rect_plan, tmp_path):
    doc = json.loads((rect_plan / "plan.json").read_text())
    doc["launch"][0] = 10_000
    (tmp_path / "plan.json").write_text(json.dumps(doc))
    assert main(["evaluate", str(tmp_path / "plan.json")]) == EXIT_CONFIG


def test_byte_stable_outputs(tmp_path):
    cfg = write_mission(tmp_path, n_uavs=2, n_darp=8, n_launch=4,
                        roi={"outer": [[0, 0], [90, 0], [90, 60], [0, 60]]})
    for d in ("a", "b"):
        assert main(["plan", "-c", str(cfg), "-o", str(tmp_path / d)]) == EXIT_OK
    for name in ["plan.json", "paths.geojson", "radius.csv", "trajectory.csv", "trials.csv"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_single_uav(tmp_path):
    cfg = write_mission(tmp_path, n_uavs=1, roi={"outer": [[0, 0], [60, 0], [60, 60], [0, 60]]})
    assert main(["plan", "-c", str(cfg), "-o", str(tmp_path / "o")]) == EXIT_OK
    doc = json.loads((tmp_path / "o" / "plan.json").read_text())
    assert doc["metrics"]["r"] == 0.0
    assert doc["metrics"]["f_o"] == doc["metrics"]["e_wh"]


def test_bad_workload(tmp_path):
    cfg = write_mission(tmp_path, workload=[0.5, 0.3, 0.3])
    assert main(["plan", "-c", str(cfg), "-o", str(tmp_path / "o")]) == EXIT_CONFIG
    cfg = write_mission(tmp_path, workload=[0.5, 0.5])
    assert main(["plan", "-c", str(cfg), "-o", str(tmp_path / "o")]) == EXIT_CONFIG


def test_schema_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"roi": {"outer": RECT}, "n_uavs": 2}))  # no footprint
    assert main(["plan", "-c", str(bad)]) == EXIT_CONFIG
    bad.write_text(json.dumps({"roi": {"outer": RECT}, "n_uavs": 2, "footprint_side": 5,
                               "footprint_area": 25}))
    assert main(["plan", "-c", str(bad)]) == EXIT_CONFIG
    assert main(["plan", "-c", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_infeasible(tmp_path):
    cfg = write_mission(tmp_path, roi={"outer": [[0, 0], [10, 0], [10, 10], [0, 10]]})
    assert main(["plan", "-c", str(cfg), "-o", str(tmp_path / "o")]) == EXIT_INFEASIBLE


def test_seed_override(tmp_path, monkeypatch):
    cfg = write_mission(tmp_path, rng_seed=3)
    assert load_mission(cfg).rng_seed == 3
    monkeypatch.setenv("COVPLAN_SEED", "17")
    assert load_mission(cfg).rng_seed == 17
    monkeypatch.setenv("COVPLAN_SEED", "x")
    with pytest.raises(ValueError):
        load_mission(cfg)


def test_formation_mode(tmp_path):
    cfg = write_mission(tmp_path, mode="formation", footprint_side=4.0,
                        roi={"outer": [[0, 0], [96, 0], [96, 48], [0, 48]]},
                        speed={"corner_radius_c": 2.0}, dt=0.25)
    cfg_doc = json.loads(cfg.read_text())
    del cfg_doc["footprint_area"]
    cfg.write_text(json.dumps(cfg_doc))
    assert main(["plan", "-c", str(cfg), "-o", str(tmp_path / "o")]) == EXIT_OK
    doc = json.loads((tmp_path / "o" / "plan.json").read_text())
    assert doc["formation"]["offsets"] == [-4.0, 0.0, 4.0]
    assert doc["metrics"]["r"] == pytest.approx(4.0, abs=1e-6)
    assert main(["evaluate", str(tmp_path / "o" / "plan.json")]) == EXIT_OK


def test_lonlat_origin(tmp_path):
    lon0, lat0 = 13.4, 52.5
    deg = 90.0 / 111_000
    outer = [[lon0, lat0], [lon0 + deg * 1.6, lat0], [lon0 + deg * 1.6, lat0 + deg],
             [lon0, lat0 + deg]]
    cfg = write_mission(tmp_path, n_uavs=2, n_darp=5, n_launch=3, roi={"outer": outer},
                        origin=[lon0, lat0])
    assert main(["plan", "-c", str(cfg), "-o", str(tmp_path / "o")]) == EXIT_OK
    gj = json.loads((tmp_path / "o" / "paths.geojson").read_text())
    lon, lat = gj["features"][0]["geometry"]["coordinates"][0]
    assert abs(lon - lon0) < 0.01 and abs(lat - lat0) < 0.01


def test_nondominated_is_antichain():
    pts = [(1, 5), (2, 2), (3, 1), (2, 3), (4, 4), (1, 5)]
    keep = nondominated(pts)
    assert sorted(keep) == [0, 1, 2, 5]
    for i in keep:
        for j in keep:
            a, b = pts[i], pts[j]
            assert not (a[0] <= b[0] and a[1] <= b[1] and a != b)


@pytest.mark.parametrize("seed", range(5))
def test_pareto_sweep(tmp_path, seed):
    cfg = write_mission(tmp_path, n_uavs=2, n_darp=12, n_launch=5, rng_seed=seed,
                        roi={"outer": [[0, 0], [90, 0], [90, 60], [0, 60]]})
    m = load_mission(cfg, seed_override="")
    lambdas = [0.0, 0.1, 1.0, 10.0]
    rows = pareto_sweep(m, lambdas)
    rs = [row["r"] for row in rows]
    assert rs[0] == min(rs)
    assert all(a <= b for a, b in zip(rs, rs[1:]))  # r never decreases as lambda grows
    front = [(row["r"], row["e"]) for row in rows if row["nondominated"]]
    assert front
    for a in front:
        for b in front:
            assert not (a[0] <= b[0] and a[1] <= b[1] and a != b)


def test_pareto_cli(tmp_path):
    cfg = write_mission(tmp_path, n_uavs=2, n_darp=6, n_launch=3,
                        roi={"outer": [[0, 0], [90, 0], [90, 60], [0, 60]]})
    out = tmp_path / "p"
    assert main(["pareto", "-c", str(cfg), "--lambdas", "0,1", "-o", str(out)]) == EXIT_OK
    assert (out / "pareto.csv").read_text().startswith("lambda,r,e,f_o,nondominated")
    for lam in ("0", "1"):
        assert main(["evaluate", str(out / f"lambda_{lam}" / "plan.json")]) == EXIT_OK
    assert main(["pareto", "-c", str(cfg), "--lambdas", "1", "-o", str(out)]) == EXIT_CONFIG
