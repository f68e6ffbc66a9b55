"""Synthesize a small primitive table and look at the certificates.

Builds a reduced maneuver grid (5 course changes x 2 wind speeds x 8
directions), runs the viability-constrained guidance optimization for every
cell, and prints the optimized commands with their tangency margins -- the
signed quantities that make each primitive a certificate rather than just a
trim solution.  Finishes with the save -> load -> save byte-identity check.
"""

import math
import tempfile
from pathlib import Path

import numpy as np

from glidesafe import AirspeedEnvelope, ManeuverGrid, Primitive
from glidesafe import load_table, save_table, synthesize_table
from glidesafe.config import load_aircraft, packaged_aircraft_path
from glidesafe.guidance import HorizonParams, SurrogateParams
from glidesafe.units import kt, to_kt
from glidesafe.viability import GammaInterval

p = load_aircraft(packaged_aircraft_path())
env = AirspeedEnvelope.from_knots(80.0, 100.0)
grid = ManeuverGrid(
    delta_course_list_rad=tuple(math.radians(d) for d in (-60, -30, 0, 30, 60)),
    wind_speed_list_ms=(0.0, kt(15.0)),
    wind_direction_list_rad=tuple(-math.pi + i * math.pi / 4 for i in range(8)),
)
print("synthesizing %d cells ..." % grid.size)
table = synthesize_table(p, env, grid, HorizonParams(), SurrogateParams(),
                         GammaInterval(math.radians(-10.0), 0.0))
print("done: %d feasible / %d total\n" % (table.feasible_count, grid.size))

# --- a slice of the table: 15 kt wind, straight-ahead cells ------------------
print("straight cells under 15 kt wind, by relative direction:")
print("  dir (deg)   gamma_g* (deg)   f~(v_min)    f~(v_max)    drop (m)")
for e in table.entries:
    m = e.maneuver
    if m.delta_course_rad != 0.0 or m.wind.speed_ms == 0.0:
        continue
    print("  %8.0f   %12.4f   %+.6f   %+.6f   %7.1f"
          % (math.degrees(m.wind.direction_from_rad),
             math.degrees(e.gamma_g_star_rad), e.tangency_min,
             e.tangency_max, e.altitude_drop_m))
print()

margins = np.array([(e.tangency_min, -e.tangency_max)
                    for e in table.entries if isinstance(e, Primitive)])
print("certification margins over the whole table (m/s^2):")
print("  min f~(v_min) = %.6f   min -f~(v_max) = %.6f"
      % (margins[:, 0].min(), margins[:, 1].min()))
print("  every primitive satisfies f~(v_min) >= 0 >= f~(v_max):",
      bool((margins >= 0).all()))
print()

# --- canonical serialization -------------------------------------------------
with tempfile.TemporaryDirectory() as d:
    p1, p2 = Path(d) / "a.json", Path(d) / "b.json"
    save_table(table, p1)
    save_table(load_table(p1), p2)
    print("table file: %d bytes, fingerprint %s..."
          % (p1.stat().st_size, table.fingerprint()[:16]))
    print("save -> load -> save byte identical:",
          p1.read_bytes() == p2.read_bytes())
