import math

import numpy as np
import pytest

from glidesafe.errors import AmbiguousSolution, DegenerateVelocity, NoSolution
from glidesafe.units import wrap_pi
from glidesafe.windframe import (AirState, WindVector, air_heading_for_course,
                                 compose_ground_velocity, gamma_air_to_ground,
                                 gamma_ground_to_air)


def test_wind_factories():
    w = WindVector.from_speed_direction(10.0, 0.0)   # from the north
    assert w.north_ms == pytest.approx(-10.0)
    assert w.east_ms == pytest.approx(0.0)
    assert w.speed_ms == pytest.approx(10.0)
    assert w.direction_from_rad == pytest.approx(0.0)

    w_e = WindVector.from_speed_direction(5.0, math.pi / 2)  # from the east
    assert w_e.east_ms == pytest.approx(-5.0)
    assert abs(w_e.north_ms) < 1e-12

    with pytest.raises(ValueError):
        WindVector.from_speed_direction(-1.0, 0.0)


def test_direction_round_trip():
    for d in np.linspace(-math.pi + 0.01, math.pi, 12):
        w = WindVector.from_speed_direction(7.0, d)
        assert wrap_pi(w.direction_from_rad - d) == pytest.approx(0.0, abs=1e-12)
    assert WindVector().direction_from_rad == 0.0


def test_headwind_steepens_ground_path():
    """50 m/s at gamma_a = -5 deg, due-north heading, 10 m/s headwind.

    Worked by hand from the velocity triangle: horizontal ground speed drops
    to 39.81 m/s and the ground path steepens to -6.247 deg; the tailwind
    case shallows to -4.167 deg.
    """
    gam_a = math.radians(-5.0)
    head = AirState(0.0, gam_a, 50.0)
    headwind = WindVector.horizontal(-10.0, 0.0)
    tailwind = WindVector.horizontal(10.0, 0.0)
    gg_head = gamma_air_to_ground(gam_a, head, headwind)
    gg_tail = gamma_air_to_ground(gam_a, head, tailwind)
    assert math.degrees(gg_head) == pytest.approx(-6.2470305896411125, abs=1e-9)
    assert math.degrees(gg_tail) == pytest.approx(-4.167254426578056, abs=1e-9)

    vg = compose_ground_velocity(head, headwind)
    assert np.linalg.norm(vg) == pytest.approx(40.047538025554765, abs=1e-9)


def test_ground_to_air_inverts_forward_map():
    rng = np.random.default_rng(11)
    for _ in range(300):
        va = rng.uniform(35.0, 70.0)
        w = WindVector.from_speed_direction(rng.uniform(0.0, 0.6) * va,
                                            rng.uniform(-math.pi, math.pi))
        course = rng.uniform(-math.pi, math.pi)
        gam_a = rng.uniform(-0.25, 0.0)
        air = air_heading_for_course(va, gam_a, course, w)
        gam_g = gamma_air_to_ground(gam_a, air, w)
        back, vg, heading = gamma_ground_to_air(gam_g, va, course, w)
        assert back == pytest.approx(gam_a, abs=1e-10)
        assert vg > 0
        assert wrap_pi(heading - air.heading_rad) == pytest.approx(0.0, abs=1e-9)


def test_ground_to_air_degenerate_cases():
    w = WindVector.horizontal(-30.0, 0.0)
    # airspeed below the wind speed, flying the headwind course: the
    # along-course quadratic has two positive roots -> ambiguous
    with pytest.raises((AmbiguousSolution, NoSolution)):
        gamma_ground_to_air(-0.05, 20.0, 0.0, w)
    # crosswind faster than the airspeed
    with pytest.raises(NoSolution):
        air_heading_for_course(10.0, -0.05, 0.0, WindVector.horizontal(0.0, 20.0))
    with pytest.raises(ValueError):
        gamma_ground_to_air(-0.05, 40.0, 0.0, WindVector(0.0, 0.0, 3.0))


def test_degenerate_ground_velocity():
    # air velocity exactly cancelled by wind
    air = AirState(0.0, 0.0, 10.0)
    w = WindVector.horizontal(-10.0, 0.0)
    with pytest.raises(DegenerateVelocity):
        gamma_air_to_ground(0.0, air, w)


def test_crab_angle_sign():
    # wind from the east pushes the nose east of course
    w = WindVector.from_speed_direction(8.0, math.pi / 2)
    air = air_heading_for_course(45.0, -0.07, 0.0, w)
    assert air.heading_rad > 0.0
    vg = compose_ground_velocity(air, w)
    # ground track must have no east component along a due-north course
    assert vg[1] == pytest.approx(0.0, abs=1e-12)
