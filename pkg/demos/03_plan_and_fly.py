"""Plan a gliding path to a goal and verify the airspeed never leaves the
envelope.

End-to-end run of the pipeline: synthesize a table whose wind-direction grid
matches the 30-degree course lattice, plan to a goal 4 km away under a 15 kt
northerly wind, fly the plan with the 3-DoF simulator, and aggregate the
forward-invariance report.  The punchline is the last block: every sample of
the closed-loop airspeed history sits strictly inside [80, 100] kt, which is
exactly what the per-primitive tangency certificates promise.
"""

import math

import numpy as np

from glidesafe import AirspeedEnvelope, ManeuverGrid, WindVector, synthesize_table
from glidesafe import simplan
from glidesafe.config import load_aircraft, packaged_aircraft_path
from glidesafe.guidance import HorizonParams, SurrogateParams
from glidesafe.units import kt, to_kt
from glidesafe.viability import GammaInterval

p = load_aircraft(packaged_aircraft_path())
env = AirspeedEnvelope.from_knots(80.0, 100.0)

grid = ManeuverGrid(
    delta_course_list_rad=tuple(math.radians(d) for d in
                                (-90, -60, -30, 0, 30, 60, 90)),
    wind_speed_list_ms=(kt(15.0),),
    wind_direction_list_rad=tuple(-math.pi + i * math.pi / 6 for i in range(12)),
)
print("synthesizing %d cells ..." % grid.size)
table = synthesize_table(p, env, grid, HorizonParams(), SurrogateParams(),
                         GammaInterval(math.radians(-10.0), 0.0))
print("table ready (%d feasible)\n" % table.feasible_count)

wind = WindVector.from_speed_direction(kt(15.0), 0.0)
goal_n, goal_e, radius = -2500.0, 3200.0, 250.0
problem = simplan.PlanProblem(0.0, 0.0, 3000.0, 0.0, goal_n, goal_e, radius,
                              wind, table)
prims = simplan.plan(problem)
print("plan to (%.0f, %.0f) m, radius %.0f m: %d primitives"
      % (goal_n, goal_e, radius, len(prims)))
for i, prim in enumerate(prims):
    print("  %2d: dchi %+4.0f deg   gamma_g* %.3f deg   %4.1f s"
          % (i, math.degrees(prim.maneuver.delta_course_rad),
             math.degrees(prim.gamma_g_star_rad), prim.horizon_s))
print()

start = simplan.SimState(0.0, 0.0, 0.0, 3000.0, kt(90.0), 0.0)
traj = simplan.run_sequence(p, wind, start, prims)
miss = math.hypot(traj.final.north_m - goal_n, traj.final.east_m - goal_e)
print("flown: %.1f s, endpoint (%.0f, %.0f) m -> miss %.0f m, "
      "altitude used %.0f m"
      % (traj.t_s[-1], traj.final.north_m, traj.final.east_m, miss,
         3000.0 - traj.final.alt_m))

report = simplan.analyze([traj], env)
print("\nairspeed over the whole flight (%d samples):" % report.sample_count)
print("  min %.2f kt   max %.2f kt   mean %.2f kt   stddev %.2f kt"
      % (to_kt(report.v_min_observed_ms), to_kt(report.v_max_observed_ms),
         to_kt(report.mean_ms), to_kt(report.stddev_ms)))
print("  envelope violations:", report.violation_count)

res, rates = simplan.air_energy_rate_residuals(traj, p, wind)
print("\nenergy bookkeeping: max |residual| of d/dt(v^2/2 + g h_air) "
      "= -D v/m is %.1e (relative);" % np.max(np.abs(res)))
print("dissipation rate is negative at every step:", bool((rates < 0).all()))
