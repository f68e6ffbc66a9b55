"""3-DoF point-mass gliding simulator, primitive-sequence execution, a
best-first planner over the primitive table, and forward-invariance analysis
of the resulting airspeed trajectories.

The simulator integrates exactly the dynamics the viability analysis is
derived on: airspeed acceleration from the drag polar and gravity, with the
air-relative flight path angle recovered from the commanded ground-referenced
one through the wind triangle at every integration stage.  Fixed-step
fourth-order integration keeps runs deterministic and order-verifiable.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .airframe import AircraftParams
from .errors import (CellInfeasible, EmptyInput, NoMatch, NoPath,
                     NonFiniteState, SequenceInfeasible, WindTriangleFailure)
from .primitives import Primitive, PrimitiveTable, lookup
from .units import to_kt, wrap_pi
from .viability import AirspeedEnvelope
from .windframe import WindVector

DEFAULT_DT_S = 0.01

CSV_COLUMNS = ("t_s", "north_m", "east_m", "alt_m", "airspeed_kts",
               "gamma_g_deg", "gamma_a_deg", "course_deg", "bank_deg")


@dataclass(frozen=True)
class SimState:
    """Instantaneous simulator state with the active command."""

    t_s: float
    north_m: float
    east_m: float
    alt_m: float
    airspeed_ms: float
    course_rad: float
    gamma_g_cmd_rad: float = 0.0
    bank_rad: float = 0.0

    def __post_init__(self):
        if self.airspeed_ms <= 0 or not math.isfinite(self.alt_m):
            raise ValueError("invalid simulator state")


@dataclass
class Trajectory:
    """Time-stamped simulation samples stored as columnar arrays."""

    t_s: np.ndarray
    north_m: np.ndarray
    east_m: np.ndarray
    alt_m: np.ndarray
    airspeed_ms: np.ndarray
    course_rad: np.ndarray
    gamma_g_rad: np.ndarray
    bank_rad: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.t_s) == 0:
            raise ValueError("empty trajectory")
        if np.any(np.diff(self.t_s) <= 0):
            raise ValueError("time stamps must be strictly increasing")

    def __len__(self):
        return len(self.t_s)

    def state(self, i: int) -> SimState:
        return SimState(float(self.t_s[i]), float(self.north_m[i]),
                        float(self.east_m[i]), float(self.alt_m[i]),
                        float(self.airspeed_ms[i]), float(self.course_rad[i]),
                        float(self.gamma_g_rad[i]), float(self.bank_rad[i]))

    @property
    def final(self) -> SimState:
        return self.state(len(self) - 1)

    def gamma_air_rad(self, w: WindVector) -> np.ndarray:
        """Air-relative flight path angle at every sample, from the closed
        form wind-triangle solve."""
        along = (w.north_ms * np.cos(self.course_rad)
                 + w.east_ms * np.sin(self.course_rad))
        cg = np.cos(self.gamma_g_rad)
        b = along * cg
        vw2 = w.north_ms**2 + w.east_ms**2
        vg = b + np.sqrt(b * b + self.airspeed_ms**2 - vw2)
        return np.arcsin(vg * np.sin(self.gamma_g_rad) / self.airspeed_ms)

    def groundspeed_ms(self, w: WindVector) -> np.ndarray:
        along = (w.north_ms * np.cos(self.course_rad)
                 + w.east_ms * np.sin(self.course_rad))
        b = along * np.cos(self.gamma_g_rad)
        vw2 = w.north_ms**2 + w.east_ms**2
        return b + np.sqrt(b * b + self.airspeed_ms**2 - vw2)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def _make_deriv(p: AircraftParams, w: WindVector, gamma_g: float, bank: float,
                turn_rate: float):
    """Derivative closure in plain floats; the inner loops dominate campaign
    runtime, so this avoids numpy scalar overhead."""
    sin_gg, cos_gg = math.sin(gamma_g), math.cos(gamma_g)
    w_n, w_e = w.north_ms, w.east_ms
    vw2 = w_n * w_n + w_e * w_e
    c_par = 0.5 * p.air_density_kgm3 * p.wing_area_m2 * p.cd0
    c_ind = (2.0 * p.induced_factor_k * p.weight_n**2
             / (p.air_density_kgm3 * p.wing_area_m2 * math.cos(bank) ** 2))
    mass, grav = p.mass_kg, p.gravity_ms2

    def deriv(v, chi):
        cos_c, sin_c = math.cos(chi), math.sin(chi)
        b = (w_n * cos_c + w_e * sin_c) * cos_gg
        disc = b * b + v * v - vw2
        if disc <= 0.0 or v <= 0.0:
            raise WindTriangleFailure(f"degenerate wind triangle at v={v:.2f}")
        vg = b + math.sqrt(disc)
        sin_ga = vg * sin_gg / v
        if abs(sin_ga) > 1.0:
            raise WindTriangleFailure("vertical balance unsatisfiable")
        cos2_ga = 1.0 - sin_ga * sin_ga
        drag = c_par * v * v + c_ind * cos2_ga / (v * v)
        v_dot = -drag / mass - grav * sin_ga
        vg_h = vg * cos_gg
        return (v_dot, vg_h * cos_c, vg_h * sin_c, vg * sin_gg, turn_rate)

    return deriv


def _rk4(deriv, v, n, e, alt, chi, dt):
    half = 0.5 * dt
    d1 = deriv(v, chi)
    d2 = deriv(v + half * d1[0], chi + half * d1[4])
    d3 = deriv(v + half * d2[0], chi + half * d2[4])
    d4 = deriv(v + dt * d3[0], chi + dt * d3[4])
    sixth = dt / 6.0
    v += sixth * (d1[0] + 2.0 * (d2[0] + d3[0]) + d4[0])
    n += sixth * (d1[1] + 2.0 * (d2[1] + d3[1]) + d4[1])
    e += sixth * (d1[2] + 2.0 * (d2[2] + d3[2]) + d4[2])
    alt += sixth * (d1[3] + 2.0 * (d2[3] + d3[3]) + d4[3])
    chi += sixth * (d1[4] + 2.0 * (d2[4] + d3[4]) + d4[4])
    return v, n, e, alt, chi


def step(p: AircraftParams, w: WindVector, state: SimState, dt: float,
         turn_rate_rad_s: float = 0.0) -> SimState:
    """Advance one fixed RK4 step under the state's stored command."""
    deriv = _make_deriv(p, w, state.gamma_g_cmd_rad, state.bank_rad,
                        turn_rate_rad_s)
    v, n, e, alt, chi = _rk4(deriv, state.airspeed_ms, state.north_m,
                             state.east_m, state.alt_m, state.course_rad, dt)
    if not all(map(math.isfinite, (v, n, e, alt, chi))):
        raise NonFiniteState(f"non-finite state at t={state.t_s + dt:.2f}")
    return SimState(state.t_s + dt, n, e, alt, v, chi,
                    state.gamma_g_cmd_rad, state.bank_rad)


def run_primitive(p: AircraftParams, w: WindVector, start: SimState,
                  prim: Primitive, dt: float = DEFAULT_DT_S) -> Trajectory:
    """Execute one certified primitive: hold its command and the signed
    standard-rate course command for its horizon.  The final course equals the
    start course plus the commanded change to rounding precision."""
    horizon = prim.horizon_s
    dchi = prim.maneuver.delta_course_rad
    rate = dchi / horizon if dchi != 0.0 else 0.0
    bank = (math.atan(prim.maneuver.ref_airspeed_ms * abs(rate) / p.gravity_ms2)
            if rate != 0.0 else 0.0)
    gamma_g = prim.gamma_g_star_rad
    deriv = _make_deriv(p, w, gamma_g, bank, rate)

    n_full = int(math.floor(horizon / dt + 1e-12))
    remainder = horizon - n_full * dt
    steps = [dt] * n_full + ([remainder] if remainder > 1e-12 else [])

    count = len(steps) + 1
    t_arr = np.empty(count)
    cols = [np.empty(count) for _ in range(5)]
    t = start.t_s
    v, n, e, alt, chi = (start.airspeed_ms, start.north_m, start.east_m,
                         start.alt_m, start.course_rad)
    t_arr[0] = t
    for c, val in zip(cols, (n, e, alt, v, chi)):
        c[0] = val
    for i, h in enumerate(steps, start=1):
        v, n, e, alt, chi = _rk4(deriv, v, n, e, alt, chi, h)
        if not all(map(math.isfinite, (v, n, e, alt, chi))):
            raise NonFiniteState(f"non-finite state at t={t:.2f}")
        t += h
        t_arr[i] = t
        for c, val in zip(cols, (n, e, alt, v, chi)):
            c[i] = val
    return Trajectory(t_arr, cols[0], cols[1], cols[2], cols[3], cols[4],
                      np.full(count, gamma_g), np.full(count, bank),
                      meta={"wind_north_ms": w.north_ms,
                            "wind_east_ms": w.east_ms})


def run_sequence(p: AircraftParams, w: WindVector, start: SimState,
                 prims, dt: float = DEFAULT_DT_S) -> Trajectory:
    """Concatenate primitives with state continuity into one trajectory."""
    meta = {"wind_north_ms": w.north_ms, "wind_east_ms": w.east_ms}
    if not prims:
        return Trajectory(*[np.array([x]) for x in
                            (start.t_s, start.north_m, start.east_m,
                             start.alt_m, start.airspeed_ms, start.course_rad,
                             start.gamma_g_cmd_rad, start.bank_rad)],
                          meta=meta)
    pieces = []
    state = start
    for prim in prims:
        traj = run_primitive(p, w, state, prim, dt)
        pieces.append(traj)
        state = traj.final
    arrays = []
    for name in ("t_s", "north_m", "east_m", "alt_m", "airspeed_ms",
                 "course_rad", "gamma_g_rad", "bank_rad"):
        parts = [getattr(pieces[0], name)]
        parts += [getattr(tr, name)[1:] for tr in pieces[1:]]  # drop junctions
        arrays.append(np.concatenate(parts))
    meta["primitive_count"] = len(prims)
    return Trajectory(*arrays, meta=meta)


def sample_random_sequence(table: PrimitiveTable, w: WindVector,
                           start_course_rad: float, count: int, rng) -> list:
    """Seeded random sequence of feasible primitives; at each step a course
    change is drawn among grid values whose cell is feasible for the wind
    seen from the current course."""
    prims = []
    course = start_course_rad
    dchis = list(table.grid.delta_course_list_rad)
    for _ in range(count):
        order = list(rng.permutation(len(dchis)))
        chosen = None
        for idx in order:
            try:
                chosen = lookup(table, dchis[idx], w, course)
                break
            except (NoMatch, CellInfeasible):
                continue
        if chosen is None:
            raise SequenceInfeasible("no feasible primitive at current course")
        prims.append(chosen)
        course = wrap_pi(course + chosen.maneuver.delta_course_rad)
    return prims


# ---------------------------------------------------------------------------
# planning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanProblem:
    start_north_m: float
    start_east_m: float
    start_alt_m: float
    start_course_rad: float
    goal_north_m: float
    goal_east_m: float
    goal_radius_m: float
    wind: WindVector
    table: PrimitiveTable
    alt_floor_m: float = 0.0
    position_cell_m: float = 50.0
    max_expansions: int = 400000

    def __post_init__(self):
        if self.goal_radius_m <= 0:
            raise ValueError("goal radius must be positive")


def plan(problem: PlanProblem) -> list:
    """Best-first search over (position, course, altitude) states using table
    primitives as edges.

    Successor positions come from the stored canonical-frame displacements
    rotated to the state's course; edge cost is the primitive horizon and the
    heuristic is straight-line distance over the best groundspeed estimate,
    which keeps it admissible.  Raises NoPath when the goal cannot be reached
    above the altitude floor.
    """
    table = problem.table
    wind = problem.wind
    best_speed = table.grid.ref_airspeed_ms + wind.speed_ms
    cell = problem.position_cell_m
    course_quant = math.pi / 180.0 * 0.5   # course keys at half-degree bins

    def heuristic(n, e):
        return math.hypot(problem.goal_north_m - n,
                          problem.goal_east_m - e) / best_speed

    def key(n, e, course):
        return (round(n / cell), round(e / cell),
                round(wrap_pi(course) / course_quant))

    start = (problem.start_north_m, problem.start_east_m,
             problem.start_alt_m, problem.start_course_rad)
    counter = 0
    frontier = [(heuristic(start[0], start[1]), counter, start, 0.0, ())]
    best_g = {key(start[0], start[1], start[3]): 0.0}
    expansions = 0
    while frontier:
        _, _, (n, e, alt, course), g, path = heapq.heappop(frontier)
        if math.hypot(problem.goal_north_m - n, problem.goal_east_m - e) \
                <= problem.goal_radius_m:
            return list(path)
        expansions += 1
        if expansions > problem.max_expansions:
            break
        cos_c, sin_c = math.cos(course), math.sin(course)
        for dchi in table.grid.delta_course_list_rad:
            try:
                prim = lookup(table, dchi, wind, course)
            except (NoMatch, CellInfeasible):
                continue
            dn, de = prim.ground_displacement_m
            n2 = n + dn * cos_c - de * sin_c
            e2 = e + dn * sin_c + de * cos_c
            alt2 = alt - prim.altitude_drop_m
            if alt2 < problem.alt_floor_m:
                continue
            course2 = wrap_pi(course + dchi)
            g2 = g + prim.horizon_s
            k = key(n2, e2, course2)
            if best_g.get(k, math.inf) <= g2:
                continue
            best_g[k] = g2
            counter += 1
            heapq.heappush(frontier, (g2 + heuristic(n2, e2), counter,
                                      (n2, e2, alt2, course2), g2,
                                      path + (prim,)))
    raise NoPath("goal unreachable from feasible primitives before the "
                 "altitude floor")


# ---------------------------------------------------------------------------
# analysis
# ---------------------------------------------------------------------------

@dataclass
class InvarianceReport:
    """Aggregate airspeed statistics over one or more trajectories."""

    v_min_observed_ms: float
    v_max_observed_ms: float
    mean_ms: float
    stddev_ms: float
    violation_count: int
    histogram_edges_ms: np.ndarray
    histogram_counts: np.ndarray
    total_sim_time_s: float
    sample_count: int

    def to_dict(self) -> dict:
        return {
            "v_min_kts": to_kt(self.v_min_observed_ms),
            "v_max_kts": to_kt(self.v_max_observed_ms),
            "mean_kts": to_kt(self.mean_ms),
            "stddev_kts": to_kt(self.stddev_ms),
            "violation_count": self.violation_count,
            "histogram_edges_kts": [to_kt(x) for x in self.histogram_edges_ms],
            "histogram_counts": [int(c) for c in self.histogram_counts],
            "total_sim_time_s": self.total_sim_time_s,
            "sample_count": self.sample_count,
        }


def analyze(trajs, env: AirspeedEnvelope, bins: int = 50,
            margin_kts: float = 2.0) -> InvarianceReport:
    """Aggregate min/max/mean/stddev, histogram, and envelope violation count
    over all samples of all trajectories.  Accepts any iterable (including a
    generator, so campaigns need not be held in memory at once)."""
    from .units import kt as _kt
    edges = np.linspace(env.v_min_ms - _kt(margin_kts),
                        env.v_max_ms + _kt(margin_kts), bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    v_min, v_max = math.inf, -math.inf
    total, total_sq, n_samples = 0.0, 0.0, 0
    violations = 0
    sim_time = 0.0
    seen = False
    for traj in trajs:
        seen = True
        v = traj.airspeed_ms
        counts += np.histogram(v, bins=edges)[0]
        v_min = min(v_min, float(np.min(v)))
        v_max = max(v_max, float(np.max(v)))
        total += float(np.sum(v))
        total_sq += float(np.sum(v * v))
        n_samples += len(v)
        violations += int(np.sum((v < env.v_min_ms) | (v > env.v_max_ms)))
        sim_time += float(traj.t_s[-1] - traj.t_s[0])
    if not seen:
        raise EmptyInput("no trajectories to analyze")
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    return InvarianceReport(v_min, v_max, mean, math.sqrt(var), violations,
                            edges, counts, sim_time, n_samples)


def air_energy_rate_residuals(traj: Trajectory, p: AircraftParams,
                              w: WindVector):
    """Per-step relative residual of the air-mass specific energy balance
    d/dt(v_a^2/2 + g h_air) = -D v_a / m, plus the dissipation rates
    themselves.  Returns (residuals, mean_rates) with mean_rates <= 0 expected
    up to integration error.

    The command is piecewise constant and held over each step, so each step's
    terms are evaluated under the command stored at the step's *end* sample;
    the sample at a primitive junction still carries the previous command.
    """
    from .airframe import drag_array
    v = traj.airspeed_ms
    gg = traj.gamma_g_rad[1:]              # command active over step j
    bank = traj.bank_rad[1:]
    along = (w.north_ms * np.cos(traj.course_rad)
             + w.east_ms * np.sin(traj.course_rad))
    vw2 = w.north_ms**2 + w.east_ms**2
    rates = []
    for sl in (slice(None, -1), slice(1, None)):      # step start / end
        b = along[sl] * np.cos(gg)
        vg = b + np.sqrt(b * b + v[sl] ** 2 - vw2)
        gamma_a = np.arcsin(vg * np.sin(gg) / v[sl])
        drag = drag_array(p, v[sl], gamma_a, bank)
        rates.append((-drag * v[sl] / p.mass_kg,       # specific power, W/kg
                      v[sl] * np.sin(gamma_a)))
    dt = np.diff(traj.t_s)
    d_kinetic = np.diff(v * v / 2.0) / dt
    lhs = d_kinetic + p.gravity_ms2 * 0.5 * (rates[0][1] + rates[1][1])
    rhs_mid = 0.5 * (rates[0][0] + rates[1][0])
    scale = np.maximum(np.abs(rhs_mid), 1e-6)
    residuals = (lhs - rhs_mid) / scale
    return residuals, rhs_mid


# ---------------------------------------------------------------------------
# trajectory I/O
# ---------------------------------------------------------------------------

def write_csv(traj: Trajectory, path, w: WindVector = None) -> None:
    """Write the trajectory as CSV with knots/degrees at the boundary.
    Metadata (wind, seed, counts) goes into leading '#' comment lines."""
    if w is None:
        w = WindVector(traj.meta.get("wind_north_ms", 0.0),
                       traj.meta.get("wind_east_ms", 0.0))
    gamma_a = traj.gamma_air_rad(w)
    with open(path, "w") as fh:
        for k in sorted(traj.meta):
            fh.write(f"# {k}={traj.meta[k]}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for i in range(len(traj)):
            fh.write("%.6f,%.3f,%.3f,%.3f,%.9f,%.9f,%.9f,%.9f,%.9f\n" % (
                traj.t_s[i], traj.north_m[i], traj.east_m[i], traj.alt_m[i],
                to_kt(traj.airspeed_ms[i]), math.degrees(traj.gamma_g_rad[i]),
                math.degrees(gamma_a[i]), math.degrees(traj.course_rad[i]),
                math.degrees(traj.bank_rad[i])))


def read_csv(path) -> Trajectory:
    """Read a trajectory CSV written by write_csv."""
    meta = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                k, _, val = line[1:].strip().partition("=")
                try:
                    meta[k] = float(val)
                except ValueError:
                    meta[k] = val
                continue
            if line.startswith(CSV_COLUMNS[0]):
                continue
            rows.append([float(x) for x in line.split(",")])
    if not rows:
        raise EmptyInput(f"no samples in {path}")
    data = np.array(rows)
    from .units import kt as _kt
    return Trajectory(data[:, 0], data[:, 1], data[:, 2], data[:, 3],
                      _kt(data[:, 4]), np.radians(data[:, 7]),
                      np.radians(data[:, 5]), np.radians(data[:, 8]),
                      meta=meta)
