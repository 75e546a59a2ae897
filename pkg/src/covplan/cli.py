"""Command line entry point: ``covplan plan | evaluate | pareto``.

Exit codes: 0 ok, 1 evaluate mismatch, 2 config or file error,
3 infeasible mission, 4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .energy import PowerModel, mission_energy, to_wh
from .formation import FormationSpec, formation_trajectory, reference_path
from .geometry import EmptyGridError, Roi, SensorFootprint, discretize, local_to_lonlat, optimize_alignment
from .objective import ObjectiveConfig, fleet_radius, objective, score_paths
from .optimizer import outer_optimize, plan_candidate
from .partition import NonTerminating, check_workload
from .stc import CoveragePath
from .connectivity import radius_profile_grid
from .trajectory import SpeedProfile, write_trajectory_csv

log = logging.getLogger("covplan")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3, 4

_point = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_ring = {"type": "array", "items": _point, "minItems": 3}
_pos = {"type": "number", "exclusiveMinimum": 0}

MISSION_SCHEMA = {
    "type": "object",
    "required": ["roi", "n_uavs"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "roi": {
            "type": "object",
            "required": ["outer"],
            "additionalProperties": False,
            "properties": {"outer": _ring, "nfzs": {"type": "array", "items": _ring}},
        },
        "origin": _point,
        "n_uavs": {"type": "integer", "minimum": 1},
        "workload": {"type": "array", "items": _pos, "minItems": 1},
        "footprint_area": _pos,
        "footprint_side": _pos,
        "power": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"P_h": _pos, "P_f": _pos, "P_t": _pos},
        },
        "speed": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"v_f": _pos, "v_t": _pos,
                           "corner_radius_c": {"type": "number", "minimum": 0}},
        },
        "lambda": {"type": "number", "minimum": 0},
        "tau": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "dt": _pos,
        "eps": _pos,
        "n_darp": {"type": "integer", "minimum": 1},
        "n_launch": {"type": "integer", "minimum": 1},
        "rng_seed": {"type": "integer", "minimum": 0},
        "mode": {"enum": ["standard", "formation"]},
        "solver": {"enum": ["grid", "lipschitz"]},
        "alignment_budget": {"type": "integer", "minimum": 1},
        "reset_ledger": {"type": "boolean"},
        "tpe": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gamma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "n_startup": {"type": "integer", "minimum": 0},
                "n_candidates": {"type": "integer", "minimum": 1},
            },
        },
    },
    "oneOf": [{"required": ["footprint_area"]}, {"required": ["footprint_side"]}],
}

DEFAULTS = {
    "schema": SCHEMA_VERSION,
    "lambda": 1.0,
    "tau": 1.0,
    "dt": 1.0,
    "eps": 0.05,
    "n_darp": 3000,
    "n_launch": 1000,
    "rng_seed": 0,
    "mode": "standard",
    "solver": "grid",
    "alignment_budget": 64,
    "reset_ledger": False,
}


class ConfigError(ValueError):
    pass


@dataclass
class MissionConfig:
    doc: dict
    roi: Roi
    origin: tuple | None
    n_uavs: int
    workload: tuple
    side_w: float
    power: PowerModel
    speed: SpeedProfile
    objective: ObjectiveConfig
    tau: float
    n_darp: int
    n_launch: int
    rng_seed: int
    mode: str
    alignment_budget: int
    reset_ledger: bool
    tpe: dict


def mission_from_dict(doc: dict) -> MissionConfig:
    """Validate a mission document and build the typed config."""
    try:
        jsonschema.validate(doc, MISSION_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from exc
    doc = {**DEFAULTS, **doc}
    n = doc["n_uavs"]
    w = doc.get("workload", [1.0 / n] * n)
    if len(w) != n:
        raise ConfigError(f"workload: expected {n} entries, got {len(w)}")
    try:
        check_workload(w)
        origin = tuple(doc["origin"]) if "origin" in doc else None
        roi = Roi.from_dict(doc["roi"], origin)
        if "footprint_side" in doc:
            side = float(doc["footprint_side"])
        else:
            side = SensorFootprint.from_area(doc["footprint_area"]).side_w
        speed = SpeedProfile(**doc.get("speed", {}))
        if speed.corner_radius_c > side / 2:
            raise ValueError("speed/corner_radius_c must not exceed half the footprint side")
        cfg = MissionConfig(
            doc=doc, roi=roi, origin=origin, n_uavs=n, workload=tuple(w), side_w=side,
            power=PowerModel(**doc.get("power", {})), speed=speed,
            objective=ObjectiveConfig(doc["lambda"], doc["dt"], doc["eps"], doc["solver"]),
            tau=doc["tau"], n_darp=doc["n_darp"], n_launch=doc["n_launch"],
            rng_seed=doc["rng_seed"], mode=doc["mode"],
            alignment_budget=doc["alignment_budget"], reset_ledger=doc["reset_ledger"],
            tpe=doc.get("tpe", {}),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_mission(path, seed_override: str | None = None) -> MissionConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("mission file must hold a JSON object")
    if seed_override is None:
        seed_override = os.environ.get("COVPLAN_SEED")
    if seed_override:
        try:
            doc["rng_seed"] = int(seed_override)
        except ValueError as exc:
            raise ConfigError(f"COVPLAN_SEED must be an integer, got {seed_override!r}") from exc
    return mission_from_dict(doc)


# --- planning -------------------------------------------------------------

@dataclass
class Plan:
    """Everything written to ``plan.json`` plus the in-memory trajectory."""

    doc: dict
    trajectory: object
    profile: object
    trials: list


def _metrics(r, e, f, T, traj):
    return {"r": r, "e_wh": e, "f_o": f, "T": T,
            "r_grid_max": radius_profile_grid(traj).r_max}


def plan_standard(m: MissionConfig) -> Plan:
    spec = optimize_alignment(m.roi, m.side_w, m.tau, m.alignment_budget, m.rng_seed)
    grid = discretize(m.roi, spec)
    if m.n_uavs > len(grid):
        raise EmptyGridError(f"grid has {len(grid)} cells for {m.n_uavs} UAVs")
    log.info("grid: %d cells, rotation %.4f rad", len(grid), spec.rotation_theta)
    res = outer_optimize(grid, m.workload, m.speed, m.power, m.objective, m.n_darp, m.n_launch,
                         m.rng_seed, m.tpe, reset_ledger=m.reset_ledger)
    return _standard_plan(m, grid, res)


def _standard_plan(m: MissionConfig, grid, res) -> Plan:
    doc = {
        "schema": SCHEMA_VERSION,
        "tool": "covplan",
        "version": __version__,
        "mode": "standard",
        "config": m.doc,
        "grid": {**grid.spec.to_dict(), "n_cells": len(grid)},
        "seeds": list(res.seeds),
        "launch": list(res.launch),
        "paths": [{"uav": i, "waypoints": p.waypoints.tolist()} for i, p in enumerate(res.paths)],
        "metrics": _metrics(res.r, res.e, res.f_o, res.horizon_T, res.trajectory),
    }
    return Plan(doc, res.trajectory, res.profile, res.trials)


def plan_formation(m: MissionConfig) -> Plan:
    spec = FormationSpec(m.n_uavs, m.side_w)
    ref, grid = reference_path(m.roi, spec, m.tau)
    traj = formation_trajectory(ref, spec.offsets, m.speed, m.objective.dt)
    r = fleet_radius(traj, m.objective, traj.speed_bound)
    e = to_wh(mission_energy(traj, m.power, include_hover=False))
    f = objective(r, e, m.objective.lam)
    doc = {
        "schema": SCHEMA_VERSION,
        "tool": "covplan",
        "version": __version__,
        "mode": "formation",
        "config": m.doc,
        "grid": {**grid.spec.to_dict(), "n_cells": len(grid)},
        "formation": {"reference": ref.waypoints.tolist(), "offsets": list(spec.offsets)},
        "metrics": _metrics(r, e, f, traj.horizon_T, traj),
    }
    return Plan(doc, traj, radius_profile_grid(traj), [])


def plan_mission(m: MissionConfig) -> Plan:
    return plan_formation(m) if m.mode == "formation" else plan_standard(m)


def _dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _geojson(plan: Plan, origin) -> dict:
    doc = plan.doc
    feats = []
    if doc["mode"] == "standard":
        lines = []
        for p, k in zip(doc["paths"], doc["launch"]):
            wp = np.roll(np.asarray(p["waypoints"]), -k, axis=0)
            lines.append((p["uav"], np.vstack([wp, wp[:1]]), k))
    else:
        traj = plan.trajectory
        lines = [(i, traj.positions[i], 0) for i in range(traj.n_uavs)]
    for uav, pts, k in lines:
        if origin is not None:
            pts = local_to_lonlat(pts, origin)
        feats.append({"type": "Feature",
                      "properties": {"uav": uav, "launch_index": int(k)},
                      "geometry": {"type": "LineString", "coordinates": np.asarray(pts).tolist()}})
    out = {"type": "FeatureCollection", "schema": SCHEMA_VERSION, "features": feats}
    if origin is None:
        out["crs_note"] = "local ENU metres"
    return out


GNUPLOT = """set datafile separator ','
set key off
set xlabel 'time (s)'
set ylabel 'connectivity radius (m)'
plot 'radius.csv' using 1:2 every ::1 with lines
"""


def write_outputs(plan: Plan, out_dir, origin=None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(plan.doc, out / "plan.json")
    _dump_json(_geojson(plan, origin), out / "paths.geojson")
    plan.profile.write_csv(out / "radius.csv")
    write_trajectory_csv(plan.trajectory, out / "trajectory.csv")
    (out / "radius.gp").write_text(GNUPLOT)
    with open(out / "trials.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["trial", "f_o", "r", "e", "status"])
        for row in plan.trials:
            wr.writerow([row["trial"], repr(row["f_o"]), repr(row["r"]), repr(row["e"]),
                         row["status"]])


# --- evaluation -----------------------------------------------------------

def evaluate_plan(doc: dict) -> dict:
    """Recompute r, e and f_o from a plan document alone."""
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported plan schema {doc.get('schema')!r}")
    m = mission_from_dict({k: v for k, v in doc["config"].items()})
    if doc["mode"] == "formation":
        ref = CoveragePath(np.asarray(doc["formation"]["reference"], dtype=float))
        traj = formation_trajectory(ref, doc["formation"]["offsets"], m.speed, m.objective.dt)
        r = fleet_radius(traj, m.objective, traj.speed_bound)
        e = to_wh(mission_energy(traj, m.power, include_hover=False))
        f = objective(r, e, m.objective.lam)
    else:
        paths = [CoveragePath(np.asarray(p["waypoints"], dtype=float), p["uav"])
                 for p in doc["paths"]]
        launch = doc["launch"]
        if len(launch) != len(paths) or any(not 0 <= k < len(p) for k, p in zip(launch, paths)):
            raise ConfigError("launch indices do not match the stored paths")
        r, e, f, traj = score_paths(paths, launch, m.speed, m.power, m.objective)
    return _metrics(r, e, f, traj.horizon_T, traj)


def _cmd_plan(args) -> int:
    m = load_mission(args.config)
    plan = plan_mission(m)
    write_outputs(plan, args.out, m.origin)
    met = plan.doc["metrics"]
    print(f"r={met['r']:.4f} m  e={met['e_wh']:.4f} Wh  f_o={met['f_o']:.4f}  T={met['T']:.1f} s")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    try:
        doc = json.loads(Path(args.plan).read_text())
        stored = doc["metrics"]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot parse plan {args.plan}: {exc}") from exc
    try:
        fresh = evaluate_plan(doc)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed plan {args.plan}: {exc}") from exc
    bad = 0
    for key in ("r", "e_wh", "f_o", "T"):
        delta = fresh[key] - stored[key]
        if fresh[key] != stored[key]:
            bad += 1
            print(f"MISMATCH {key}: stored={stored[key]!r} recomputed={fresh[key]!r} delta={delta:+.6g}")
        else:
            print(f"ok {key}={fresh[key]!r}")
    return EXIT_MISMATCH if bad else EXIT_OK


def nondominated(points) -> list:
    """Indices of points not dominated under componentwise (r, e) order."""
    keep = []
    for i, (r, e) in enumerate(points):
        dominated = any((r2 <= r and e2 <= e) and (r2 < r or e2 < e) for r2, e2 in points)
        if not dominated:
            keep.append(i)
    return keep


def _plan_for_lambda(args):
    doc, lam = args
    m = mission_from_dict({**doc, "lambda": lam})
    spec = optimize_alignment(m.roi, m.side_w, m.tau, m.alignment_budget, m.rng_seed)
    grid = discretize(m.roi, spec)
    res = outer_optimize(grid, m.workload, m.speed, m.power, m.objective, m.n_darp, m.n_launch,
                         m.rng_seed, m.tpe, reset_ledger=m.reset_ledger)
    pool = [(row["r"], row["e"], tuple(row["seeds"]), tuple(row["launch"]))
            for row in res.trials if row["status"] == "ok"]
    return pool


def pareto_sweep(m: MissionConfig, lambdas, workers: int = 1):
    """One optimisation per lambda; each lambda then picks its best from the pooled candidates.

    The inner launch search ignores lambda, so every evaluated candidate is a
    valid choice under every weight.
    """
    if len(lambdas) < 2:
        raise ConfigError("pareto needs at least two lambda values")
    if m.mode != "standard":
        raise ConfigError("pareto sweeps need mode 'standard'")
    jobs = [(m.doc, float(lam)) for lam in lambdas]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            pools = list(ex.map(_plan_for_lambda, jobs))
    else:
        pools = [_plan_for_lambda(j) for j in jobs]
    pool = {}
    for src, cands in zip(lambdas, pools):
        for r, e, seeds, launch in cands:
            pool.setdefault((seeds, launch), (r, e, src))
    if not pool:
        raise NonTerminating("no feasible partition found")
    items = sorted(pool.items())
    rows = []
    for lam in lambdas:
        key, (r, e, src) = min(items, key=lambda kv: (kv[1][0] + lam * kv[1][1], kv[0]))
        rows.append({"lambda": float(lam), "r": r, "e": e, "f_o": r + lam * e,
                     "seeds": list(key[0]), "launch": list(key[1]), "found_at_lambda": src})
    front = set(nondominated([(row["r"], row["e"]) for row in rows]))
    for i, row in enumerate(rows):
        row["nondominated"] = i in front
    return rows


def _cmd_pareto(args) -> int:
    m = load_mission(args.config)
    try:
        lambdas = [float(x) for x in args.lambdas.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --lambdas: {exc}") from exc
    rows = pareto_sweep(m, lambdas, args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "pareto.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["lambda", "r", "e", "f_o", "nondominated"])
        for row in rows:
            wr.writerow([repr(row["lambda"]), repr(row["r"]), repr(row["e"]), repr(row["f_o"]),
                         int(row["nondominated"])])
            print(f"lambda={row['lambda']:g}  r={row['r']:.4f}  e={row['e']:.4f}"
                  f"{'  *' if row['nondominated'] else ''}")
    _dump_json({"schema": SCHEMA_VERSION, "rows": rows}, out / "pareto.json")
    for row in rows:
        mm = mission_from_dict({**m.doc, "lambda": row["lambda"]})
        grid = discretize(mm.roi, optimize_alignment(mm.roi, mm.side_w, mm.tau,
                                                     mm.alignment_budget, mm.rng_seed))
        res = plan_candidate(grid, mm.workload, row["seeds"], row["launch"], mm.speed, mm.power,
                             mm.objective)
        write_outputs(_standard_plan(mm, grid, res), out / f"lambda_{row['lambda']:g}", mm.origin)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="covplan", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"covplan {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("plan", help="optimise a mission and write plan files")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--out", default="out")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("evaluate", help="re-score a plan.json and compare with stored metrics")
    p.add_argument("plan")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("pareto", help="sweep lambda and report the non-dominated set")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("--lambdas", required=True, help="comma separated, e.g. 0,0.1,1")
    p.add_argument("-o", "--out", default="out")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_pareto)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonTerminating, EmptyGridError) as exc:
        print(f"infeasible mission: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
