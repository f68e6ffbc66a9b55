import math

import numpy as np
import pytest

from glidesafe.airframe import equilibrium_glide_angle
from glidesafe.errors import Infeasible, InsufficientSamples
from glidesafe.guidance import (HorizonParams, Maneuver, SurrogateParams,
                                averaged_tangency, central_difference,
                                guidance_cost, horizon_s, moving_average,
                                optimize_guidance, resample_uniform,
                                simulate_airspeed, turn_bank_rad)
from glidesafe.units import kt
from glidesafe.viability import GammaInterval
from glidesafe.windframe import WindVector


def test_horizon():
    h = HorizonParams()
    assert horizon_s(Maneuver(math.radians(90.0), WindVector()), h) == pytest.approx(30.0)
    assert horizon_s(Maneuver(0.0, WindVector()), h) == pytest.approx(10.0)
    assert horizon_s(Maneuver(math.radians(-45.0), WindVector()), h) == pytest.approx(15.0)
    capped = HorizonParams(cap_s=20.0)
    assert horizon_s(Maneuver(math.radians(90.0), WindVector()), capped) == pytest.approx(20.0)


def test_turn_bank(p182):
    h = HorizonParams()
    mu = turn_bank_rad(p182, Maneuver(math.radians(30.0), WindVector()), h)
    # coordinated standard-rate turn at 90 kt is about 13.9 deg of bank
    assert math.degrees(mu) == pytest.approx(13.9, abs=0.2)
    assert turn_bank_rad(p182, Maneuver(0.0, WindVector()), h) == 0.0


def test_maneuver_validation():
    with pytest.raises(ValueError):
        Maneuver(7.0, WindVector())
    with pytest.raises(ValueError):
        Maneuver(0.0, WindVector(), ref_airspeed_ms=-1.0)
    with pytest.raises(ValueError):
        Maneuver(0.0, WindVector(0.0, 0.0, 2.0))


def test_resample_uniform():
    # piecewise-linear signal is reconstructed exactly on the grid
    t = [0.0, 0.3, 1.0, 2.2, 3.0]
    v = [1.0, 1.6, 3.0, 0.6, 2.2]
    out = resample_uniform(list(zip(t, v)), 0.25)
    tau = np.array([s[0] for s in out])
    vals = np.array([s[1] for s in out])
    assert tau[0] == 0.0 and tau[-1] <= 3.0
    assert np.allclose(vals, np.interp(tau, t, v), atol=1e-14)
    with pytest.raises(InsufficientSamples):
        resample_uniform([(0.0, 1.0)], 0.1)


def test_moving_average_properties():
    x = np.full(40, 3.7)
    assert np.allclose(moving_average(x, 5), x, atol=1e-14)   # constants pass
    ramp = 0.3 * np.arange(40)
    sm = moving_average(ramp, 4)
    assert np.allclose(sm[4:-4], ramp[4:-4], atol=1e-12)      # interior exact
    assert np.array_equal(moving_average(ramp, 0), ramp)


def test_central_difference_exactness():
    dt = 0.05
    tau = dt * np.arange(60)
    assert np.allclose(central_difference(1.5 * tau + 2.0, dt), 1.5, atol=1e-12)
    d = central_difference(tau**2, dt)
    assert np.allclose(d[1:-1], 2.0 * tau[1:-1], atol=1e-10)
    with pytest.raises(InsufficientSamples):
        central_difference([1.0, 2.0], dt)


def test_equilibrium_tangency_small(p182, hparams, sparams):
    """At the equilibrium command the averaged surrogate is tiny when started
    from the reference airspeed itself."""
    m = Maneuver(0.0, WindVector())
    gam_eq = equilibrium_glide_angle(p182, m.ref_airspeed_ms)
    f = averaged_tangency(p182, m, hparams, sparams, gam_eq, m.ref_airspeed_ms)
    assert abs(f) < 1e-3


def test_tangency_signs_straddle_equilibrium(p182, env, hparams, sparams):
    m = Maneuver(0.0, WindVector())
    # much shallower than every equilibrium in the envelope: speeds decay
    f_shallow = averaged_tangency(p182, m, hparams, sparams,
                                  math.radians(-1.0), env.v_max_ms)
    assert f_shallow < 0.0
    # much steeper: speeds grow from the lower boundary
    f_steep = averaged_tangency(p182, m, hparams, sparams,
                                math.radians(-9.0), env.v_min_ms)
    assert f_steep > 0.0


def test_cost_nonnegative_and_zero_at_equilibrium(p182, hparams, sparams):
    m = Maneuver(0.0, WindVector())
    gam_eq = equilibrium_glide_angle(p182, m.ref_airspeed_ms)
    assert guidance_cost(p182, m, hparams, sparams, gam_eq) < 1e-8
    assert guidance_cost(p182, m, hparams, sparams, math.radians(-8.0)) > 0.0


def test_optimize_zero_wind_straight(p182, env, hparams, sparams, gamma_box):
    m = Maneuver(0.0, WindVector())
    sol = optimize_guidance(p182, env, m, hparams, sparams, gamma_box)
    assert sol.converged
    assert sol.tangency_min >= 0.0 >= sol.tangency_max
    gam_eq = equilibrium_glide_angle(p182, m.ref_airspeed_ms)
    assert sol.gamma_g_star_rad == pytest.approx(gam_eq, abs=1e-3)


def test_optimize_wind_symmetry(p182, env, hparams, sparams, gamma_box):
    """Mirroring the course change and the wind about the initial course is a
    lateral reflection of the whole problem."""
    speed, rel_dir = kt(12.0), 0.7
    m_plus = Maneuver(math.radians(60.0),
                      WindVector.from_speed_direction(speed, rel_dir))
    m_minus = Maneuver(math.radians(-60.0),
                       WindVector.from_speed_direction(speed, -rel_dir))
    s_plus = optimize_guidance(p182, env, m_plus, hparams, sparams, gamma_box)
    s_minus = optimize_guidance(p182, env, m_minus, hparams, sparams, gamma_box)
    assert s_plus.gamma_g_star_rad == pytest.approx(s_minus.gamma_g_star_rad,
                                                    abs=2e-5)


def test_optimize_infeasible(p182, env, hparams, gamma_box):
    # unsatisfiable margins force rejection
    s = SurrogateParams(margin_lo=5.0, margin_hi=5.0)
    with pytest.raises(Infeasible):
        optimize_guidance(p182, env, Maneuver(0.0, WindVector()), hparams, s,
                          gamma_box)
    with pytest.raises(Infeasible):
        optimize_guidance(p182, env, Maneuver(0.0, WindVector()), hparams,
                          SurrogateParams(), GammaInterval.make_empty())


def test_simulation_determinism(p182, hparams):
    m = Maneuver(math.radians(45.0),
                 WindVector.from_speed_direction(kt(10.0), 1.0))
    t1, v1 = simulate_airspeed(p182, m, hparams, math.radians(-5.0), kt(85.0))
    t2, v2 = simulate_airspeed(p182, m, hparams, math.radians(-5.0), kt(85.0))
    assert np.array_equal(v1, v2) and np.array_equal(t1, t2)


def test_surrogate_consistency(p182, env, hparams):
    """Refining dt and L drives the surrogate toward the endpoint difference."""
    m = Maneuver(math.radians(30.0),
                 WindVector.from_speed_direction(kt(8.0), -2.0))
    gam = math.radians(-5.0)
    t, v = simulate_airspeed(p182, m, hparams, gam, env.v_min_ms, 0.005)
    exact = (v[-1] - v[0]) / t[-1]
    err = []
    for dt_s, half_window in ((0.1, 8), (0.05, 4), (0.025, 2)):
        s = SurrogateParams(dt_s=dt_s, half_window=half_window)
        err.append(abs(averaged_tangency(p182, m, hparams, s, gam,
                                         env.v_min_ms) - exact))
    assert err[2] < err[0]
