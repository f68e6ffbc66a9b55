"""Viability-constrained guidance optimization.

A maneuver is a commanded course change flown at standard turn rate under a
steady horizontal wind.  For each maneuver this module finds the constant
ground-referenced flight path angle command minimizing the integrated squared
airspeed acceleration, subject to time-averaged tangency constraints evaluated
on trajectories initialized at both envelope boundaries: the mean airspeed
rate must be nonnegative starting from v_min and nonpositive starting from
v_max.

The tangency surrogate follows a fixed numerical pipeline: simulate, resample
onto a uniform grid by linear interpolation, smooth with a finite moving
average, differentiate with central differences, and take the discrete mean.

The simulation kernel integrates many candidate commands simultaneously as
numpy vectors, which is what makes whole-table synthesis tractable on a single
core.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .airframe import AircraftParams
from .errors import Infeasible, InsufficientSamples
from .units import kt
from .viability import AirspeedEnvelope, GammaInterval
from .windframe import WindVector

REFINE_TOL_RAD = 1e-5     # final bracket half-width for the 1-D search
_REFINE_POINTS = 17
_MAX_REFINE_PASSES = 12


@dataclass(frozen=True)
class Maneuver:
    """Commanded course change under a steady wind, at a reference airspeed."""

    delta_course_rad: float
    wind: WindVector
    ref_airspeed_ms: float = kt(90.0)
    initial_course_rad: float = 0.0

    def __post_init__(self):
        if abs(self.delta_course_rad) > 2.0 * math.pi:
            raise ValueError("course change magnitude limited to 2*pi")
        if self.ref_airspeed_ms <= 0:
            raise ValueError("reference airspeed must be positive")
        self.wind.require_horizontal()


@dataclass(frozen=True)
class HorizonParams:
    """Turn rate and the straight-segment time constant."""

    turn_rate_rad_s: float = math.radians(3.0)
    tau_s: float = 10.0
    cap_s: Optional[float] = None   # optional upper cap on turn horizons

    def __post_init__(self):
        if self.turn_rate_rad_s <= 0 or self.tau_s <= 0:
            raise ValueError("turn rate and tau must be positive")


@dataclass(frozen=True)
class SurrogateParams:
    """Uniform-grid step, smoothing half-window, and optimizer knobs."""

    dt_s: float = 0.05
    half_window: int = 5
    grid_points: int = 41
    margin_lo: float = 0.0
    margin_hi: float = 0.0

    def __post_init__(self):
        if self.dt_s <= 0:
            raise ValueError("dt must be positive")
        if self.half_window < 0 or self.grid_points < 2:
            raise ValueError("half_window >= 0 and grid_points >= 2 required")


@dataclass(frozen=True)
class GuidanceSolution:
    """Optimized command with its certification margins."""

    gamma_g_star_rad: float
    cost: float
    tangency_min: float   # mean airspeed rate starting at v_min (must be >= 0)
    tangency_max: float   # mean airspeed rate starting at v_max (must be <= 0)
    converged: bool

    def __post_init__(self):
        if self.converged and not (self.tangency_min >= 0.0 >= self.tangency_max):
            raise ValueError("converged solution must satisfy tangency signs")


def horizon_s(m: Maneuver, h: HorizonParams) -> float:
    """Maneuver horizon: |delta_course| / turn_rate for turns, tau for
    straight segments (a zero course change would otherwise give a
    zero-length horizon)."""
    if m.delta_course_rad == 0.0:
        return h.tau_s
    horizon = abs(m.delta_course_rad) / h.turn_rate_rad_s
    if h.cap_s is not None:
        horizon = min(horizon, h.cap_s)
    return horizon


def turn_bank_rad(p: AircraftParams, m: Maneuver, h: HorizonParams) -> float:
    """Bank of a coordinated turn at the commanded rate and reference
    airspeed; zero on straight segments."""
    if m.delta_course_rad == 0.0:
        return 0.0
    return math.atan(m.ref_airspeed_ms * h.turn_rate_rad_s / p.gravity_ms2)


# ---------------------------------------------------------------------------
# batch simulation kernel
# ---------------------------------------------------------------------------

def _simulate_batch(p: AircraftParams, m: Maneuver, h: HorizonParams,
                    gamma_g, v0, dt_sim):
    """Integrate airspeed for many constant commands at once.

    gamma_g and v0 are equal-length 1-D arrays (one column per candidate).
    Fixed-step RK4 on v_a_dot = f(v_a, gamma_a) with gamma_a recovered from
    the wind triangle in closed form at every stage; the course sweeps at the
    commanded rate, so the along-course wind component is a known function of
    time.  Returns (t, V, Vdot): uniform times (n+1,), airspeeds and exact
    airspeed rates (n+1, n_candidates).  Candidates whose wind triangle
    degenerates at any stage turn NaN from that point on.
    """
    gamma_g = np.asarray(gamma_g, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    horizon = horizon_s(m, h)
    n = max(2, int(round(horizon / dt_sim)))
    dt = horizon / n
    t = np.linspace(0.0, horizon, n + 1)

    sign = math.copysign(1.0, m.delta_course_rad) if m.delta_course_rad else 0.0
    rate = sign * h.turn_rate_rad_s
    chi0 = m.initial_course_rad
    # along-course wind component at step starts, midpoints, and ends
    w_n, w_e = m.wind.north_ms, m.wind.east_ms
    vw2 = w_n * w_n + w_e * w_e

    def along(times):
        chi = chi0 + rate * times
        return w_n * np.cos(chi) + w_e * np.sin(chi)

    a0 = along(t[:-1])
    am = along(t[:-1] + 0.5 * dt)
    a1 = along(t[1:])

    bank = turn_bank_rad(p, m, h)
    cos_g = np.cos(gamma_g)
    sin_g = np.sin(gamma_g)
    c_par = 0.5 * p.air_density_kgm3 * p.wing_area_m2 * p.cd0
    c_ind = (2.0 * p.induced_factor_k * p.weight_n**2
             / (p.air_density_kgm3 * p.wing_area_m2 * math.cos(bank) ** 2))
    mass, grav = p.mass_kg, p.gravity_ms2

    def deriv(v, a_scalar):
        b = a_scalar * cos_g
        v2 = v * v
        disc = b * b + v2 - vw2
        with np.errstate(invalid="ignore"):
            vg = b + np.sqrt(disc)
            sin_ga = vg * sin_g / v
            cos2_ga = 1.0 - sin_ga * sin_ga
            drag = c_par * v2 + c_ind * cos2_ga / v2
            out = -drag / mass - grav * sin_ga
        bad = (disc <= 0.0) | (vg <= 0.0) | (np.abs(sin_ga) > 1.0) | (v <= 0.0)
        if bad.any():
            out = np.where(bad, np.nan, out)
        return out

    n_cand = gamma_g.shape[0]
    V = np.empty((n + 1, n_cand))
    Vdot = np.empty((n + 1, n_cand))
    v = v0.copy()
    V[0] = v
    half = 0.5 * dt
    for i in range(n):
        k1 = deriv(v, a0[i])
        k2 = deriv(v + half * k1, am[i])
        k3 = deriv(v + half * k2, am[i])
        k4 = deriv(v + dt * k3, a1[i])
        Vdot[i] = k1
        v = v + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        V[i + 1] = v
    Vdot[n] = deriv(v, a1[-1])
    return t, V, Vdot


def simulate_airspeed(p: AircraftParams, m: Maneuver, h: HorizonParams,
                      gamma_g_rad: float, v_a0: float, dt_sim: float = 0.025):
    """Single-command airspeed trajectory; returns (t, v_a) arrays."""
    t, V, _ = _simulate_batch(p, m, h, np.array([gamma_g_rad]),
                              np.array([v_a0]), dt_sim)
    return t, V[:, 0]


# ---------------------------------------------------------------------------
# numerical surrogate pipeline
# ---------------------------------------------------------------------------

def resample_uniform(samples, dt_s):
    """Linearly interpolate time-stamped samples onto the uniform grid
    tau_k = k * dt, tau_K <= T.  samples is a sorted sequence of (t, value)
    pairs with at least two points."""
    if dt_s <= 0:
        raise ValueError("dt must be positive")
    pairs = list(samples)
    if len(pairs) < 2:
        raise InsufficientSamples("need at least two samples to resample")
    times = np.array([s[0] for s in pairs], dtype=float)
    values = np.array([s[1] for s in pairs], dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("samples must be sorted by time")
    n_grid = int(math.floor((times[-1] - times[0]) / dt_s + 1e-9))
    tau = times[0] + dt_s * np.arange(n_grid + 1)
    resampled = np.interp(tau, times, values)
    return list(zip(tau.tolist(), resampled.tolist()))


def moving_average(values, half_window):
    """Symmetric moving average of half-width L.  Near the ends the window is
    truncated symmetrically in index terms and renormalized by the actual
    count, so constants pass through unchanged everywhere."""
    x = np.asarray(values, dtype=float)
    if half_window == 0:
        return x.copy()
    n = x.shape[0]
    csum = np.concatenate([np.zeros((1,) + x.shape[1:]), np.cumsum(x, axis=0)])
    idx = np.arange(n)
    lo = np.maximum(idx - half_window, 0)
    hi = np.minimum(idx + half_window, n - 1)
    counts = (hi - lo + 1).astype(float)
    sums = csum[hi + 1] - csum[lo]
    if x.ndim > 1:
        counts = counts[:, None]
    return sums / counts


def central_difference(values, dt_s):
    """First derivative on a uniform grid: central differences at interior
    points, one-sided first-order differences at the two ends."""
    x = np.asarray(values, dtype=float)
    if x.shape[0] < 3:
        raise InsufficientSamples("need at least three samples to differentiate")
    d = np.empty_like(x)
    d[1:-1] = (x[2:] - x[:-2]) / (2.0 * dt_s)
    d[0] = (x[1] - x[0]) / dt_s
    d[-1] = (x[-1] - x[-2]) / dt_s
    return d


def _tangency_from_sim(t, V, s: SurrogateParams):
    """Apply resample -> smooth -> differentiate -> discrete mean to one or
    more simulated airspeed columns.  Returns an array of mean rates."""
    horizon = t[-1]
    dt_grid = t[1] - t[0]
    n_grid = int(math.floor(horizon / s.dt_s + 1e-9))
    tau = s.dt_s * np.arange(n_grid + 1)
    pos = tau / dt_grid
    i0 = np.clip(pos.astype(int), 0, len(t) - 2)
    frac = (pos - i0)[:, None]
    resampled = V[i0] * (1.0 - frac) + V[i0 + 1] * frac
    smoothed = moving_average(resampled, s.half_window)
    rates = central_difference(smoothed, s.dt_s)
    return np.mean(rates[:-1], axis=0)


def averaged_tangency(p: AircraftParams, m: Maneuver, h: HorizonParams,
                      s: SurrogateParams, gamma_g_rad: float, v_a0: float) -> float:
    """Time-averaged airspeed rate surrogate for the Nagumo boundary
    condition: simulate the maneuver from a boundary airspeed holding the
    command constant, then take the discrete mean of the smoothed derivative."""
    t, V, _ = _simulate_batch(p, m, h, np.array([gamma_g_rad]),
                              np.array([v_a0]), 0.5 * s.dt_s)
    return float(_tangency_from_sim(t, V, s)[0])


def guidance_cost(p: AircraftParams, m: Maneuver, h: HorizonParams,
                  s: SurrogateParams, gamma_g_rad: float,
                  v_a0: Optional[float] = None) -> float:
    """Integral of squared airspeed acceleration over the maneuver horizon,
    evaluated on the trajectory initialized at the reference airspeed."""
    v0 = m.ref_airspeed_ms if v_a0 is None else v_a0
    t, _, Vdot = _simulate_batch(p, m, h, np.array([gamma_g_rad]),
                                 np.array([v0]), 0.5 * s.dt_s)
    return float(np.trapezoid(Vdot[:, 0] ** 2, t))


# ---------------------------------------------------------------------------
# optimizer
# ---------------------------------------------------------------------------

def _evaluate_candidates(p, env, m, h, s, gammas):
    """Cost and both boundary tangency surrogates for a vector of commands,
    from a single batched simulation (three starts per candidate)."""
    gammas = np.asarray(gammas, dtype=float)
    n_cand = gammas.shape[0]
    gg = np.tile(gammas, 3)
    v0 = np.concatenate([
        np.full(n_cand, m.ref_airspeed_ms),
        np.full(n_cand, env.v_min_ms),
        np.full(n_cand, env.v_max_ms),
    ])
    t, V, Vdot = _simulate_batch(p, m, h, gg, v0, 0.5 * s.dt_s)
    cost = np.trapezoid(Vdot[:, :n_cand] ** 2, t, axis=0)
    tangency = _tangency_from_sim(t, V[:, n_cand:], s)
    return cost, tangency[:n_cand], tangency[n_cand:]


def optimize_guidance(p: AircraftParams, env: AirspeedEnvelope, m: Maneuver,
                      h: HorizonParams, s: SurrogateParams,
                      gamma_box: GammaInterval) -> GuidanceSolution:
    """Minimize the squared-acceleration cost over the command box subject to
    the boundary tangency constraints.

    Coarse grid scan keeping constraint-feasible candidates, then iterative
    grid refinement around the best feasible point down to REFINE_TOL_RAD.
    Raises Infeasible when no grid point satisfies the constraints, which
    signals the planner to reject the maneuver.
    """
    if gamma_box.empty:
        raise Infeasible("empty command box")

    def pick_best(gammas):
        cost, f_lo, f_hi = _evaluate_candidates(p, env, m, h, s, gammas)
        feasible = (np.isfinite(cost) & (f_lo >= s.margin_lo)
                    & (f_hi <= -s.margin_hi))
        if not feasible.any():
            return None
        masked = np.where(feasible, cost, np.inf)
        i = int(np.argmin(masked))
        return gammas[i], float(cost[i]), float(f_lo[i]), float(f_hi[i])

    grid = np.linspace(gamma_box.lo_rad, gamma_box.hi_rad, s.grid_points)
    best = pick_best(grid)
    if best is None:
        raise Infeasible(
            f"no feasible command among {s.grid_points} grid points in "
            f"[{math.degrees(gamma_box.lo_rad):.2f}, "
            f"{math.degrees(gamma_box.hi_rad):.2f}] deg")
    spacing = grid[1] - grid[0]
    for _ in range(_MAX_REFINE_PASSES):
        if spacing <= REFINE_TOL_RAD:
            break
        lo = max(gamma_box.lo_rad, best[0] - spacing)
        hi = min(gamma_box.hi_rad, best[0] + spacing)
        fine = np.linspace(lo, hi, _REFINE_POINTS)
        refined = pick_best(fine)
        spacing = fine[1] - fine[0]
        if refined is not None and refined[1] <= best[1]:
            best = refined
    gamma_star, cost, f_lo, f_hi = best
    return GuidanceSolution(gamma_g_star_rad=float(gamma_star), cost=cost,
                            tangency_min=f_lo, tangency_max=f_hi,
                            converged=True)
