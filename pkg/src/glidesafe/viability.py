"""Viability of the airspeed envelope.

Contingent cones on the admissible airspeed interval, the boundary tangency
(inward-flow) test, the closed-form viable air-relative flight path angle
interval, and its projection to ground-referenced commands through the wind
triangle.
"""

import math
from dataclasses import dataclass

from .airframe import AircraftParams, drag_array, airspeed_rate_array
from .errors import AsinDomain, OutsideEnvelope
from .units import kt
from .windframe import WindVector, air_heading_for_course, gamma_air_to_ground

BOUNDARY_TOL_MS = 1e-9   # absolute tolerance classifying envelope boundary membership

_HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class AirspeedEnvelope:
    """Compact admissible airspeed interval [v_min, v_max], m/s."""

    v_min_ms: float
    v_max_ms: float

    def __post_init__(self):
        if not (0.0 < self.v_min_ms < self.v_max_ms < math.inf):
            raise ValueError("require 0 < v_min < v_max < inf")

    @classmethod
    def from_knots(cls, v_min_kts, v_max_kts):
        return cls(kt(v_min_kts), kt(v_max_kts))

    def contains(self, v_a, tol=0.0) -> bool:
        return self.v_min_ms - tol <= v_a <= self.v_max_ms + tol


@dataclass(frozen=True)
class ConeInterval:
    """Half-line or full-line interval of admissible airspeed rates."""

    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("require lower <= upper")

    def contains(self, rate: float) -> bool:
        return self.lower <= rate <= self.upper


@dataclass(frozen=True)
class GammaInterval:
    """Closed flight path angle interval, with an explicit empty flag."""

    lo_rad: float
    hi_rad: float
    empty: bool = False

    def __post_init__(self):
        if not self.empty and self.lo_rad > self.hi_rad:
            raise ValueError("non-empty interval requires lo <= hi")

    @classmethod
    def make_empty(cls):
        return cls(math.nan, math.nan, empty=True)

    def contains(self, gamma_rad: float) -> bool:
        return (not self.empty) and self.lo_rad <= gamma_rad <= self.hi_rad

    @property
    def width_rad(self) -> float:
        return 0.0 if self.empty else self.hi_rad - self.lo_rad


def contingent_cone(env: AirspeedEnvelope, v_a: float,
                    tol: float = BOUNDARY_TOL_MS) -> ConeInterval:
    """Contingent (Bouligand tangent) cone to the envelope at v_a: the full
    line in the interior, half-lines pointing inward at the boundaries."""
    if not env.contains(v_a, tol):
        raise OutsideEnvelope(f"v_a={v_a:.3f} outside [{env.v_min_ms:.3f}, {env.v_max_ms:.3f}]")
    if abs(v_a - env.v_min_ms) <= tol:
        return ConeInterval(0.0, math.inf)
    if abs(v_a - env.v_max_ms) <= tol:
        return ConeInterval(-math.inf, 0.0)
    return ConeInterval(-math.inf, math.inf)


def nagumo_boundary_ok(p: AircraftParams, env: AirspeedEnvelope,
                       gamma_air_rad: float, bank_rad: float = 0.0) -> bool:
    """True iff the airspeed rate points inward at both envelope boundaries:
    f(v_max, gamma) <= 0 and f(v_min, gamma) >= 0."""
    f_min = airspeed_rate_array(p, env.v_min_ms, gamma_air_rad, bank_rad)
    f_max = airspeed_rate_array(p, env.v_max_ms, gamma_air_rad, bank_rad)
    return f_max <= 0.0 <= f_min


def _gamma_boundary_fixed_point(p: AircraftParams, v_boundary: float,
                                bank_rad: float, tol: float = 1e-10,
                                max_iter: int = 100) -> float:
    """Solve gamma = asin(-D(v_b, gamma) / W) for one envelope boundary.

    The gamma dependence inside D (through cos^2 gamma in the induced term) is
    weak near small angles, so plain fixed-point iteration converges in a few
    steps; on oscillation the update is damped by half, and if the iteration
    fails to converge a bisection fallback on sin(gamma) + D/W finishes the job.
    """
    weight = p.weight_n

    def image(gamma):
        ratio = drag_array(p, v_boundary, gamma, bank_rad) / weight
        if ratio > 1.0:
            raise AsinDomain(f"D/W = {ratio:.3f} > 1 at v = {v_boundary:.2f} m/s")
        return math.asin(-ratio)

    gamma = image(0.0)
    damping = 1.0
    prev_step = 0.0
    for _ in range(max_iter):
        nxt = image(gamma)
        step = nxt - gamma
        if abs(step) < tol:
            return nxt
        if prev_step * step < 0.0 and abs(step) >= abs(prev_step):
            damping = 0.5
        gamma += damping * step
        prev_step = step

    # bisection fallback on g(gamma) = sin(gamma) + D/W
    def residual(g):
        return math.sin(g) + drag_array(p, v_boundary, g, bank_rad) / weight

    lo, hi = -_HALF_PI + 1e-9, 0.0
    if residual(lo) > 0.0:
        raise AsinDomain(f"drag exceeds weight at v = {v_boundary:.2f} m/s")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if residual(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def viable_gamma_air_interval(p: AircraftParams, env: AirspeedEnvelope,
                              bank_rad: float = 0.0) -> GammaInterval:
    """Closed-form viable interval of air-relative flight path angles.

    The lower bound ties the upper airspeed boundary (steepest command that
    does not accelerate past v_max), the upper bound ties the lower boundary.
    Returns an explicitly empty interval when the bounds cross, which happens
    when the envelope straddles the back side of the drag curve far enough
    that D(v_min) > D(v_max).
    """
    lo = _gamma_boundary_fixed_point(p, env.v_max_ms, bank_rad)
    hi = _gamma_boundary_fixed_point(p, env.v_min_ms, bank_rad)
    if lo > hi:
        return GammaInterval.make_empty()
    return GammaInterval(lo, hi)


def viable_gamma_ground_interval(p: AircraftParams, env: AirspeedEnvelope,
                                 bank_rad: float, airspeed_ms: float,
                                 course_rad: float, w: WindVector) -> GammaInterval:
    """Project the viable air-relative interval to ground-referenced commands
    along a course under wind.  Endpoint ordering is preserved because the
    air-to-ground mapping is monotone in gamma_air."""
    air = viable_gamma_air_interval(p, env, bank_rad)
    if air.empty:
        return air
    ends = []
    for gamma_a in (air.lo_rad, air.hi_rad):
        state = air_heading_for_course(airspeed_ms, gamma_a, course_rad, w)
        ends.append(gamma_air_to_ground(gamma_a, state, w))
    return GammaInterval(ends[0], ends[1])
