"""Steady-wind frame coupling.

Velocity composition v_g = v_a + v_w, the gamma_a -> gamma_g mapping, and the
wind-triangle solve recovering air-relative state from ground-referenced
commands along a course.

Conventions: vectors are NED (north, east, down).  Course chi and wind
direction chi_w are measured clockwise from north; chi_w is the meteorological
"from" direction, so chi_w = 0 is wind from the north (a headwind for a
northbound vehicle).  Flight path angles are negative downward, i.e.
gamma = asin(-v_down / |v|).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousSolution, DegenerateVelocity, NoSolution
from .units import wrap_pi

_EPS_SPEED = 1e-9


@dataclass(frozen=True)
class WindVector:
    """Steady inertial wind, NED components.  Horizontal by construction in
    every synthesized primitive; the factory methods enforce down = 0."""

    north_ms: float = 0.0
    east_ms: float = 0.0
    down_ms: float = 0.0

    @classmethod
    def horizontal(cls, north_ms, east_ms):
        return cls(north_ms, east_ms, 0.0)

    @classmethod
    def from_speed_direction(cls, speed_ms, direction_from_rad):
        """Wind of given speed blowing FROM the given direction."""
        if speed_ms < 0:
            raise ValueError("wind speed must be nonnegative")
        return cls(-speed_ms * math.cos(direction_from_rad),
                   -speed_ms * math.sin(direction_from_rad), 0.0)

    @property
    def speed_ms(self) -> float:
        return math.hypot(self.north_ms, self.east_ms)

    @property
    def direction_from_rad(self) -> float:
        """Meteorological 'from' direction; 0 for calm wind."""
        if self.speed_ms <= _EPS_SPEED:
            return 0.0
        return wrap_pi(math.atan2(-self.east_ms, -self.north_ms))

    def as_array(self):
        return np.array([self.north_ms, self.east_ms, self.down_ms])

    def require_horizontal(self):
        if abs(self.down_ms) > _EPS_SPEED:
            raise ValueError("horizontal wind required (down component nonzero)")


@dataclass(frozen=True)
class GroundState:
    """Ground-referenced velocity in course / flight path angle / speed form."""

    course_rad: float
    gamma_ground_rad: float
    groundspeed_ms: float

    def __post_init__(self):
        if self.groundspeed_ms <= 0:
            raise ValueError("groundspeed must be positive")


@dataclass(frozen=True)
class AirState:
    """Air-relative velocity in heading / flight path angle / speed form."""

    heading_rad: float
    gamma_air_rad: float
    airspeed_ms: float

    def __post_init__(self):
        if self.airspeed_ms <= 0:
            raise ValueError("airspeed must be positive")

    def velocity_ned(self):
        v, gam, psi = self.airspeed_ms, self.gamma_air_rad, self.heading_rad
        horiz = v * math.cos(gam)
        return np.array([horiz * math.cos(psi), horiz * math.sin(psi),
                         -v * math.sin(gam)])


def compose_ground_velocity(a: AirState, w: WindVector):
    """Ground velocity vector v_g = v_a + v_w, NED components."""
    return a.velocity_ned() + w.as_array()


def gamma_air_to_ground(gamma_air_rad: float, a: AirState, w: WindVector) -> float:
    """Map an air-relative flight path angle to the ground-referenced one at
    the air state's heading and airspeed: gamma_g = asin(-v_g_down / |v_g|).

    Monotone increasing in gamma_air at fixed airspeed, heading, and wind.
    """
    state = AirState(a.heading_rad, gamma_air_rad, a.airspeed_ms)
    vg = compose_ground_velocity(state, w)
    norm = float(np.linalg.norm(vg))
    if norm <= _EPS_SPEED:
        raise DegenerateVelocity("ground velocity magnitude ~0")
    return math.asin(-vg[2] / norm)


def gamma_ground_to_air(gamma_ground_rad: float, airspeed_ms: float,
                        course_rad: float, w: WindVector):
    """Invert the wind triangle: recover (gamma_air, groundspeed, heading) for
    a commanded ground flight path angle flown along a course at a given
    airspeed under horizontal wind.

    The triangle reduces to a quadratic in groundspeed,
        v_g^2 - 2 a cos(gamma_g) v_g + (v_w^2 - v_a^2) = 0,
    with a the along-course wind component; for v_a > v_w exactly one positive
    root exists, so the solve is exact (no iteration).  Raises NoSolution when
    no consistent triangle exists and AmbiguousSolution when two positive
    roots occur (only possible for v_a <= v_w).
    """
    w.require_horizontal()
    if airspeed_ms <= 0:
        raise ValueError("airspeed must be positive")
    cos_c, sin_c = math.cos(course_rad), math.sin(course_rad)
    along = w.north_ms * cos_c + w.east_ms * sin_c
    vw2 = w.north_ms**2 + w.east_ms**2
    cg = math.cos(gamma_ground_rad)
    b = along * cg
    disc = b * b + airspeed_ms**2 - vw2
    if disc < 0.0:
        raise NoSolution("wind faster than achievable ground progress")
    root = math.sqrt(disc)
    vg = b + root
    if vg <= _EPS_SPEED:
        raise NoSolution("no positive groundspeed solves the wind triangle")
    if b - root > _EPS_SPEED:
        raise AmbiguousSolution("two positive groundspeed roots (v_a <= v_w)")
    sin_ga = vg * math.sin(gamma_ground_rad) / airspeed_ms
    if abs(sin_ga) > 1.0:
        raise NoSolution("vertical balance unsatisfiable at this airspeed")
    gamma_air = math.asin(sin_ga)
    air_n = vg * cg * cos_c - w.north_ms
    air_e = vg * cg * sin_c - w.east_ms
    heading = math.atan2(air_e, air_n)
    return gamma_air, vg, heading


def air_heading_for_course(airspeed_ms: float, gamma_air_rad: float,
                           course_rad: float, w: WindVector) -> AirState:
    """Air state whose ground track lies along the given course, for a fixed
    air-relative flight path angle.  The heading crabs into the crosswind
    component; NoSolution when the crosswind exceeds the horizontal airspeed
    or the along-track ground progress would be non-positive."""
    w.require_horizontal()
    v_h = airspeed_ms * math.cos(gamma_air_rad)
    cos_c, sin_c = math.cos(course_rad), math.sin(course_rad)
    cross = -w.north_ms * sin_c + w.east_ms * cos_c
    s = -cross / v_h
    if abs(s) > 1.0:
        raise NoSolution("crosswind exceeds horizontal airspeed")
    heading = course_rad + math.asin(s)
    along = v_h * math.cos(heading - course_rad) + (w.north_ms * cos_c + w.east_ms * sin_c)
    if along <= 0.0:
        raise NoSolution("headwind prevents forward ground progress")
    return AirState(heading, gamma_air_rad, airspeed_ms)
