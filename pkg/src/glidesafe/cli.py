"""Command-line entry point.

Subcommands: synthesize (primitive table from a run config), simulate
(explicit or seeded-random primitive sequence to a trajectory CSV), plan
(best-first search to a goal circle, emitting the plan JSON and its simulated
trajectory), analyze (aggregate forward-invariance report over trajectory
CSVs).

Exit codes: 0 success, 2 configuration/input error, 3 synthesis failure,
4 infeasible sequence, 5 no path, 6 envelope violations found.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import simplan
from .config import default_run_config, load_run_config
from .errors import (CellInfeasible, ConfigError, GlidesafeError, Infeasible,
                     NoMatch, NoPath, SequenceInfeasible)
from .primitives import (InfeasibleCell, ManeuverGrid, Primitive, load_table,
                         lookup, save_table, synthesize_table)
from .units import kt, to_kt, wrap_pi
from .viability import AirspeedEnvelope
from .windframe import WindVector

EXIT_CONFIG = 2
EXIT_SYNTH = 3
EXIT_SEQUENCE = 4
EXIT_NOPATH = 5
EXIT_VIOLATION = 6


def _load_config(path):
    return load_run_config(path) if path else default_run_config()


def _wind_from_args(args, cfg):
    if getattr(args, "wind", None):
        try:
            speed, direction = (float(x) for x in args.wind.split(","))
        except ValueError:
            raise ConfigError("--wind expects 'SPEED_KTS,DIRECTION_DEG'")
        return WindVector.from_speed_direction(kt(speed),
                                               math.radians(direction))
    return cfg.wind


def cmd_synthesize(args) -> int:
    try:
        cfg = _load_config(args.config)
        grid = ManeuverGrid.ci_subsample() if args.grid == "ci" else cfg.grid
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = synthesize_table(cfg.aircraft, cfg.envelope, grid,
                                 cfg.horizon, cfg.surrogate, cfg.gamma_box,
                                 jobs=args.jobs)
    except GlidesafeError as exc:
        print(f"synthesis failed: {exc}", file=sys.stderr)
        return EXIT_SYNTH
    save_table(table, args.out)
    feasible = table.feasible_count
    infeasible = grid.size - feasible
    print(f"{grid.size} cases: {feasible} feasible, {infeasible} infeasible")
    margins_lo = [e.tangency_min for e in table.entries
                  if isinstance(e, Primitive)]
    margins_hi = [-e.tangency_max for e in table.entries
                  if isinstance(e, Primitive)]
    if margins_lo:
        print(f"min tangency margin at v_min: {min(margins_lo):.6f} m/s^2")
        print(f"min tangency margin at v_max: {min(margins_hi):.6f} m/s^2")
    print(f"table written to {args.out} (fingerprint {table.fingerprint()[:16]})")
    return 0


def _start_state(table, alt_m=3000.0, course_rad=0.0):
    return simplan.SimState(0.0, 0.0, 0.0, alt_m, table.grid.ref_airspeed_ms,
                            course_rad)


def cmd_simulate(args) -> int:
    try:
        cfg = _load_config(args.config)
        table = load_table(args.table)
        wind = _wind_from_args(args, cfg)
    except (ConfigError, GlidesafeError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    start = _start_state(table)
    meta = {}
    try:
        if args.sequence:
            with open(args.sequence) as fh:
                dchis_deg = json.load(fh)
            prims = []
            course = start.course_rad
            for d in dchis_deg:
                prim = lookup(table, math.radians(float(d)), wind, course)
                prims.append(prim)
                course = wrap_pi(course + prim.maneuver.delta_course_rad)
        else:
            seed = args.seed if args.seed is not None else cfg.seed or 0
            rng = np.random.default_rng(seed)
            prims = simplan.sample_random_sequence(table, wind,
                                                   start.course_rad,
                                                   args.random, rng)
            meta["seed"] = seed
    except (NoMatch, CellInfeasible, SequenceInfeasible) as exc:
        print(f"infeasible sequence: {exc}", file=sys.stderr)
        return EXIT_SEQUENCE
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    traj = simplan.run_sequence(cfg.aircraft, wind, start, prims)
    traj.meta.update(meta)
    simplan.write_csv(traj, args.out, wind)
    final = traj.final
    print(f"{len(prims)} primitives, {traj.t_s[-1]:.1f} s, "
          f"final airspeed {to_kt(final.airspeed_ms):.2f} kt, "
          f"altitude {final.alt_m:.0f} m")
    print(f"trajectory written to {args.out}")
    return 0


def cmd_plan(args) -> int:
    try:
        cfg = _load_config(args.config)
        table = load_table(args.table)
        wind = _wind_from_args(args, cfg)
        n0, e0, alt0, course0_deg = (float(x) for x in args.start.split(","))
        gn, ge, radius = (float(x) for x in args.goal.split(","))
    except (ConfigError, GlidesafeError, OSError, ValueError,
            json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    problem = simplan.PlanProblem(n0, e0, alt0, math.radians(course0_deg),
                                  gn, ge, radius, wind, table,
                                  alt_floor_m=args.alt_floor)
    try:
        prims = simplan.plan(problem)
    except NoPath as exc:
        print(f"no path: {exc}", file=sys.stderr)
        return EXIT_NOPATH

    start = simplan.SimState(0.0, n0, e0, alt0, table.grid.ref_airspeed_ms,
                             math.radians(course0_deg))
    traj = simplan.run_sequence(cfg.aircraft, wind, start, prims)
    plan_doc = {
        "start": {"north_m": n0, "east_m": e0, "alt_m": alt0,
                  "course_deg": course0_deg},
        "goal": {"north_m": gn, "east_m": ge, "radius_m": radius},
        "wind_kts": to_kt(wind.speed_ms),
        "wind_direction_deg": math.degrees(wind.direction_from_rad),
        "primitives": [{"dchi_deg": math.degrees(p.maneuver.delta_course_rad),
                        "gamma_g_deg": math.degrees(p.gamma_g_star_rad),
                        "horizon_s": p.horizon_s} for p in prims],
        "duration_s": float(traj.t_s[-1]),
        "final": {"north_m": traj.final.north_m, "east_m": traj.final.east_m,
                  "alt_m": traj.final.alt_m},
    }
    with open(args.out, "w") as fh:
        json.dump(plan_doc, fh, indent=2)
        fh.write("\n")
    traj_path = args.traj or (args.out.rsplit(".", 1)[0] + ".csv")
    simplan.write_csv(traj, traj_path, wind)
    miss = math.hypot(traj.final.north_m - gn, traj.final.east_m - ge)
    print(f"plan: {len(prims)} primitives, {traj.t_s[-1]:.1f} s, "
          f"miss distance {miss:.1f} m (radius {radius:.0f} m)")
    print(f"plan written to {args.out}, trajectory to {traj_path}")
    return 0


def cmd_analyze(args) -> int:
    try:
        lo, hi = (float(x) for x in args.envelope.split(":"))
        env = AirspeedEnvelope.from_knots(lo, hi)
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    trajs = []
    for path in args.files:
        try:
            trajs.append(simplan.read_csv(path))
        except (OSError, ValueError, GlidesafeError) as exc:
            print(f"cannot read {path}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    report = simplan.analyze(trajs, env, bins=args.bins)
    with open(args.report, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    print(f"{len(trajs)} trajectories, {report.sample_count} samples, "
          f"{report.total_sim_time_s:.1f} s simulated")
    print(f"airspeed kt: min {to_kt(report.v_min_observed_ms):.2f}, "
          f"max {to_kt(report.v_max_observed_ms):.2f}, "
          f"mean {to_kt(report.mean_ms):.2f}, "
          f"stddev {to_kt(report.stddev_ms):.2f}")
    print(f"violations: {report.violation_count}")
    print(f"report written to {args.report}")
    return 0 if report.violation_count == 0 else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glidesafe",
        description="Viability-certified glide guidance toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_syn = sub.add_parser("synthesize", help="synthesize a primitive table")
    p_syn.add_argument("--config", help="run config JSON (defaults built in)")
    p_syn.add_argument("--out", required=True, help="output table JSON")
    p_syn.add_argument("--grid", choices=["default", "ci"], default="default")
    p_syn.add_argument("--jobs", type=int, default=None,
                       help="worker processes (GLIDE_JOBS fallback)")
    p_syn.set_defaults(func=cmd_synthesize)

    p_sim = sub.add_parser("simulate", help="fly a primitive sequence")
    p_sim.add_argument("--config", help="run config JSON")
    p_sim.add_argument("--table", required=True)
    group = p_sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--sequence",
                       help="JSON file with a list of course changes, deg")
    group.add_argument("--random", type=int, metavar="N",
                       help="random sequence of N primitives")
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--wind", help="'SPEED_KTS,DIRECTION_DEG' override")
    p_sim.add_argument("--out", required=True, help="trajectory CSV path")
    p_sim.set_defaults(func=cmd_simulate)

    p_plan = sub.add_parser("plan", help="plan a primitive sequence to a goal")
    p_plan.add_argument("--config", help="run config JSON")
    p_plan.add_argument("--table", required=True)
    p_plan.add_argument("--start", required=True,
                        metavar='"N,E,alt,course"',
                        help="north m, east m, altitude m, course deg")
    p_plan.add_argument("--goal", required=True, metavar='"N,E,r"',
                        help="north m, east m, radius m")
    p_plan.add_argument("--wind", help="'SPEED_KTS,DIRECTION_DEG' override")
    p_plan.add_argument("--alt-floor", type=float, default=0.0)
    p_plan.add_argument("--out", required=True, help="plan JSON path")
    p_plan.add_argument("--traj", help="trajectory CSV path")
    p_plan.set_defaults(func=cmd_plan)

    p_an = sub.add_parser("analyze", help="forward-invariance report")
    p_an.add_argument("--envelope", required=True, metavar="LO:HI",
                      help="airspeed envelope in knots")
    p_an.add_argument("--report", required=True, help="report JSON path")
    p_an.add_argument("--bins", type=int, default=50)
    p_an.add_argument("files", nargs="+", help="trajectory CSV files")
    p_an.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
