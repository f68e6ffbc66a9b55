"""Where can you point the nose without losing the airspeed envelope?

Walks the core viability result on the shipped airframe: the drag polar, the
equilibrium glide angle at the 90 kt reference, and the closed-form interval
of air-relative flight path angles for which the [80, 100] kt envelope is
forward invariant -- straight flight first, then under bank, then mapped to
ground-referenced commands under a 15 kt headwind.
"""

import math

import numpy as np

from glidesafe import AircraftParams, AirspeedEnvelope, FlightCondition, WindVector
from glidesafe.airframe import airspeed_rate, drag_N, equilibrium_glide_angle
from glidesafe.config import load_aircraft, packaged_aircraft_path
from glidesafe.units import kt, to_kt
from glidesafe.viability import (viable_gamma_air_interval,
                                 viable_gamma_ground_interval)

p = load_aircraft(packaged_aircraft_path())
env = AirspeedEnvelope.from_knots(80.0, 100.0)

print("airframe: m = %.0f kg, S = %.2f m^2, CD0 = %.3f, k = %.3f"
      % (p.mass_kg, p.wing_area_m2, p.cd0, p.induced_factor_k))
print()

# --- drag along the envelope -------------------------------------------------
print("drag polar across the envelope (level, no bank):")
for v_kt in (80, 85, 90, 95, 100):
    d = drag_N(p, FlightCondition(kt(v_kt)))
    print("  %3d kt  ->  D = %6.1f N   L/D = %5.2f"
          % (v_kt, d, p.weight_n / d))
print()

# --- equilibrium glide -------------------------------------------------------
gam_eq = equilibrium_glide_angle(p, kt(90.0))
print("equilibrium glide at 90 kt: gamma_a = %.3f deg "
      "(airspeed rate %.1e m/s^2 there)"
      % (math.degrees(gam_eq),
         airspeed_rate(p, FlightCondition(kt(90.0), gam_eq))))
print()

# --- the viable interval -----------------------------------------------------
# Lower bound ties v_max (steepest command that will not blow through the top
# of the envelope), upper bound ties v_min.
iv = viable_gamma_air_interval(p, env)
print("viable gamma_a interval for [80, 100] kt, wings level:")
print("  [%.4f, %.4f] deg  (width %.3f deg)"
      % (math.degrees(iv.lo_rad), math.degrees(iv.hi_rad),
         math.degrees(iv.width_rad)))

print("the same interval under bank (induced drag steepens everything):")
for bank_deg in (10, 20, 30):
    ivb = viable_gamma_air_interval(p, env, math.radians(bank_deg))
    print("  mu = %2d deg  ->  [%.4f, %.4f] deg"
          % (bank_deg, math.degrees(ivb.lo_rad), math.degrees(ivb.hi_rad)))
print()

# --- ground-referenced commands under wind -----------------------------------
w = WindVector.from_speed_direction(kt(15.0), 0.0)   # 15 kt from the north
for course_deg in (0, 90, 180):
    g = viable_gamma_ground_interval(p, env, 0.0, kt(90.0),
                                     math.radians(course_deg), w)
    print("course %3d deg under 15 kt northerly: gamma_g in [%.4f, %.4f] deg"
          % (course_deg, math.degrees(g.lo_rad), math.degrees(g.hi_rad)))
print()
print("headwind legs need a steeper ground command for the same air-relative")
print("behavior; the planner certifies per-cell commands for exactly this reason.")
