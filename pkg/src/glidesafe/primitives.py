"""Maneuver-primitive table: discretize the maneuver space, batch-synthesize
certified commands, persist and query the result.

Wind enters the table by (speed, direction) relative to a canonical initial
course of zero, which makes the table course-invariant: at query time the
relative direction is computed from the actual course.  Synthesis is a
deterministic, order-preserving map over grid cells (row-major: course change
outer, wind speed middle, wind direction inner), optionally parallelized.
"""

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .airframe import AircraftParams
from .errors import (CellInfeasible, Infeasible, InvariantViolation, NoMatch,
                     SchemaMismatch)
from .guidance import (HorizonParams, Maneuver, SurrogateParams,
                       _simulate_batch, horizon_s, optimize_guidance)
from .units import kt, to_kt, wrap_pi
from .viability import AirspeedEnvelope, GammaInterval
from .windframe import WindVector

SCHEMA_VERSION = 1


def _default_dchi():
    return tuple(math.radians(d) for d in range(-90, 91, 15))


def _default_speeds():
    return tuple(kt(v) for v in np.linspace(0.0, 15.6, 9))


def _default_directions(count=24):
    step = 2.0 * math.pi / count
    return tuple(-math.pi + i * step for i in range(count))


@dataclass(frozen=True)
class ManeuverGrid:
    """Cartesian discretization of course change x wind speed x wind
    direction, at a fixed reference airspeed."""

    delta_course_list_rad: tuple = field(default_factory=_default_dchi)
    wind_speed_list_ms: tuple = field(default_factory=_default_speeds)
    wind_direction_list_rad: tuple = field(default_factory=_default_directions)
    ref_airspeed_ms: float = kt(90.0)

    def __post_init__(self):
        for name in ("delta_course_list_rad", "wind_speed_list_ms",
                     "wind_direction_list_rad"):
            values = getattr(self, name)
            if len(values) == 0:
                raise ValueError(f"{name} must be non-empty")
            if len(set(values)) != len(values):
                raise ValueError(f"{name} contains duplicates")

    @classmethod
    def default(cls):
        return cls()

    @classmethod
    def ci_subsample(cls):
        """Reduced grid for continuous-integration runs: 13 x 3 x 8 cells."""
        return cls(wind_speed_list_ms=tuple(kt(v) for v in np.linspace(0.0, 15.6, 3)),
                   wind_direction_list_rad=_default_directions(8))

    @property
    def size(self) -> int:
        return (len(self.delta_course_list_rad) * len(self.wind_speed_list_ms)
                * len(self.wind_direction_list_rad))

    def cells(self):
        """Row-major cell parameter triples (dchi, wind_speed, wind_dir)."""
        for dchi in self.delta_course_list_rad:
            for speed in self.wind_speed_list_ms:
                for direction in self.wind_direction_list_rad:
                    yield dchi, speed, direction


@dataclass(frozen=True)
class Primitive:
    """A certified maneuver: course change plus the optimized constant
    ground-referenced flight path angle command and its bookkeeping."""

    maneuver: Maneuver
    gamma_g_star_rad: float
    horizon_s: float
    cost: float
    tangency_min: float
    tangency_max: float
    altitude_drop_m: float
    ground_displacement_m: tuple   # (north, east) over the horizon

    def __post_init__(self):
        if not (self.tangency_min >= 0.0 >= self.tangency_max):
            raise ValueError("primitive must carry certified tangency signs")
        if self.altitude_drop_m < 0:
            raise ValueError("gliding primitives cannot gain altitude")


@dataclass(frozen=True)
class InfeasibleCell:
    """Marker kept in the table for maneuvers with no viable command."""

    maneuver: Maneuver
    horizon_s: float
    reason: str = ""


TableEntry = Union[Primitive, InfeasibleCell]


@dataclass(frozen=True)
class PrimitiveTable:
    grid: ManeuverGrid
    entries: tuple
    aircraft: AircraftParams
    envelope: AirspeedEnvelope
    horizon: HorizonParams
    surrogate: SurrogateParams
    gamma_box: GammaInterval

    def __post_init__(self):
        if len(self.entries) != self.grid.size:
            raise InvariantViolation("entry count does not match grid size")

    @property
    def feasible_count(self) -> int:
        return sum(isinstance(e, Primitive) for e in self.entries)

    def fingerprint(self) -> str:
        return hashlib.sha256(_header_json(self).encode()).hexdigest()


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------

def _cell_maneuver(grid: ManeuverGrid, dchi, speed, direction) -> Maneuver:
    wind = WindVector.from_speed_direction(speed, direction)
    return Maneuver(dchi, wind, ref_airspeed_ms=grid.ref_airspeed_ms,
                    initial_course_rad=0.0)


def _displacement(p, m, h, gamma_g, dt_sim):
    """Ground displacement and altitude drop of a primitive flown from the
    reference airspeed, by trapezoidal integration of the ground velocity."""
    t, V, _ = _simulate_batch(p, m, h, np.array([gamma_g]),
                              np.array([m.ref_airspeed_ms]), dt_sim)
    v = V[:, 0]
    sign = math.copysign(1.0, m.delta_course_rad) if m.delta_course_rad else 0.0
    chi = m.initial_course_rad + sign * h.turn_rate_rad_s * t
    w_n, w_e = m.wind.north_ms, m.wind.east_ms
    along = w_n * np.cos(chi) + w_e * np.sin(chi)
    cg, sg = math.cos(gamma_g), math.sin(gamma_g)
    b = along * cg
    vg = b + np.sqrt(b * b + v * v - (w_n**2 + w_e**2))
    north = np.trapezoid(vg * cg * np.cos(chi), t)
    east = np.trapezoid(vg * cg * np.sin(chi), t)
    drop = -np.trapezoid(vg * sg, t)
    return float(drop), (float(north), float(east))


def _solve_cell(args):
    p, env, grid, h, s, box, dchi, speed, direction = args
    m = _cell_maneuver(grid, dchi, speed, direction)
    horizon = horizon_s(m, h)
    try:
        sol = optimize_guidance(p, env, m, h, s, box)
    except Infeasible as exc:
        return InfeasibleCell(m, horizon, str(exc))
    drop, disp = _displacement(p, m, h, sol.gamma_g_star_rad, 0.5 * s.dt_s)
    return Primitive(m, sol.gamma_g_star_rad, horizon, sol.cost,
                     sol.tangency_min, sol.tangency_max, drop, disp)


def synthesize_table(p: AircraftParams, env: AirspeedEnvelope,
                     grid: ManeuverGrid, h: HorizonParams, s: SurrogateParams,
                     gamma_box: GammaInterval, jobs: Optional[int] = None,
                     progress=None) -> PrimitiveTable:
    """Solve the guidance optimization for every grid cell.

    Results are merged in deterministic row-major order regardless of worker
    count.  Calm-wind cells are direction-independent and solved once per
    course change, then replicated exactly.
    """
    jobs = jobs or int(os.environ.get("GLIDE_JOBS", "1"))
    tasks = []
    cache_keys = []
    cache = {}
    for dchi, speed, direction in grid.cells():
        key = (dchi, speed, direction if speed > 0.0 else None)
        cache_keys.append(key)
        if key not in cache:
            cache[key] = len(tasks)
            tasks.append((p, env, grid, h, s, gamma_box, dchi, speed, direction))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = []
            for i, res in enumerate(pool.map(_solve_cell, tasks, chunksize=8)):
                results.append(res)
                if progress:
                    progress(i + 1, len(tasks))
    else:
        results = []
        for i, task in enumerate(tasks):
            results.append(_solve_cell(task))
            if progress:
                progress(i + 1, len(tasks))

    entries = tuple(results[cache[key]] for key in cache_keys)
    return PrimitiveTable(grid, entries, p, env, h, s, gamma_box)


# ---------------------------------------------------------------------------
# lookup
# ---------------------------------------------------------------------------

def lookup(table: PrimitiveTable, delta_course_rad: float, wind: WindVector,
           course_rad: float = 0.0) -> Primitive:
    """Primitive at the nearest grid cell for the given wind, seen from the
    given course.  The course change must match a grid value exactly; wind
    speed uses nearest-neighbor (ties toward lower speed) and wind direction
    the circular nearest (ties toward the smaller angle)."""
    grid = table.grid
    dchi_idx = None
    for i, dchi in enumerate(grid.delta_course_list_rad):
        if abs(dchi - delta_course_rad) <= 1e-9:
            dchi_idx = i
            break
    if dchi_idx is None:
        raise NoMatch(f"course change {math.degrees(delta_course_rad):.2f} deg "
                      "not in table grid")

    speeds = grid.wind_speed_list_ms
    speed = wind.speed_ms
    speed_idx = min(range(len(speeds)),
                    key=lambda i: (abs(speeds[i] - speed), speeds[i]))

    rel_dir = wrap_pi(wind.direction_from_rad - course_rad)
    dirs = grid.wind_direction_list_rad

    def circ_dist(d):
        return abs(wrap_pi(d - rel_dir))

    dir_idx = min(range(len(dirs)), key=lambda i: (circ_dist(dirs[i]), dirs[i]))

    n_speed, n_dir = len(speeds), len(dirs)
    idx = (dchi_idx * n_speed + speed_idx) * n_dir + dir_idx
    entry = table.entries[idx]
    if isinstance(entry, InfeasibleCell):
        raise CellInfeasible(
            f"cell (dchi={math.degrees(delta_course_rad):.0f} deg, "
            f"v_w={to_kt(speeds[speed_idx]):.1f} kt, "
            f"dir={math.degrees(dirs[dir_idx]):.0f} deg) is infeasible")
    return entry


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _canon_display(x, to_disp, from_disp):
    """Display value whose parse -> convert -> render round trip is a fixed
    point, so repeated save/load cycles are byte-identical.  Unit conversion
    can wobble by one ulp; iterate to a fixed point and break the (rare)
    two-cycle deterministically."""
    d = to_disp(x)
    seen = []
    for _ in range(8):
        if d in seen:
            return min(seen[seen.index(d):])
        seen.append(d)
        d = to_disp(from_disp(d))
    return d


def _canon_kt(x_ms):
    return _canon_display(x_ms, to_kt, kt)


def _canon_deg(x_rad):
    return _canon_display(x_rad, math.degrees, math.radians)


def _fmt(x) -> str:
    """Canonical decimal rendering with 17 significant digits (lossless for
    binary64, reproducible across writers)."""
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite value in table serialization")
    return format(float(x), ".17g")


def _obj(pairs) -> str:
    return "{" + ",".join(f'"{k}":{v}' for k, v in pairs) + "}"


def _arr(items) -> str:
    return "[" + ",".join(items) + "]"


def _header_json(table: PrimitiveTable) -> str:
    p, env, grid = table.aircraft, table.envelope, table.grid
    h, s, box = table.horizon, table.surrogate, table.gamma_box
    aircraft = _obj([("mass_kg", _fmt(p.mass_kg)),
                     ("wing_area_m2", _fmt(p.wing_area_m2)),
                     ("cd0", _fmt(p.cd0)),
                     ("induced_k", _fmt(p.induced_factor_k)),
                     ("rho", _fmt(p.air_density_kgm3)),
                     ("g", _fmt(p.gravity_ms2))])
    envelope = _obj([("v_min_kts", _fmt(_canon_kt(env.v_min_ms))),
                     ("v_max_kts", _fmt(_canon_kt(env.v_max_ms)))])
    grid_json = _obj([
        ("dchi_deg", _arr(_fmt(_canon_deg(d)) for d in grid.delta_course_list_rad)),
        ("wind_kts", _arr(_fmt(_canon_kt(v)) for v in grid.wind_speed_list_ms)),
        ("wind_dir_deg", _arr(_fmt(_canon_deg(d)) for d in grid.wind_direction_list_rad)),
        ("ref_airspeed_kts", _fmt(_canon_kt(grid.ref_airspeed_ms))),
    ])
    horizon = _obj([("turn_rate_dps", _fmt(_canon_deg(h.turn_rate_rad_s))),
                    ("tau_s", _fmt(h.tau_s)),
                    ("cap_s", _fmt(h.cap_s))])
    surrogate = _obj([("dt_s", _fmt(s.dt_s)),
                      ("half_window", _fmt(s.half_window)),
                      ("grid_points", _fmt(s.grid_points)),
                      ("margin_lo", _fmt(s.margin_lo)),
                      ("margin_hi", _fmt(s.margin_hi)),
                      ("gamma_box_deg", _arr([_fmt(_canon_deg(box.lo_rad)),
                                              _fmt(_canon_deg(box.hi_rad))]))])
    return _obj([("schema_version", _fmt(SCHEMA_VERSION)),
                 ("aircraft", aircraft),
                 ("envelope", envelope),
                 ("grid", grid_json),
                 ("horizon", horizon),
                 ("surrogate", surrogate)])


def _entry_json(entry: TableEntry, dchi, speed, direction) -> str:
    feasible = isinstance(entry, Primitive)
    pairs = [("dchi_deg", _fmt(_canon_deg(dchi))),
             ("wind_kts", _fmt(_canon_kt(speed))),
             ("wind_dir_deg", _fmt(_canon_deg(direction))),
             ("feasible", _fmt(feasible))]
    if feasible:
        pairs += [("gamma_g_deg", _fmt(_canon_deg(entry.gamma_g_star_rad))),
                  ("horizon_s", _fmt(entry.horizon_s)),
                  ("cost", _fmt(entry.cost)),
                  ("f_tilde_vmin", _fmt(entry.tangency_min)),
                  ("f_tilde_vmax", _fmt(entry.tangency_max)),
                  ("alt_drop_m", _fmt(entry.altitude_drop_m)),
                  ("disp_north_m", _fmt(entry.ground_displacement_m[0])),
                  ("disp_east_m", _fmt(entry.ground_displacement_m[1]))]
    else:
        pairs += [("gamma_g_deg", "null"),
                  ("horizon_s", _fmt(entry.horizon_s)),
                  ("cost", "null"),
                  ("f_tilde_vmin", "null"),
                  ("f_tilde_vmax", "null"),
                  ("alt_drop_m", "null"),
                  ("disp_north_m", "null"),
                  ("disp_east_m", "null")]
    return _obj(pairs)


def save_table(table: PrimitiveTable, path) -> None:
    """Write the table as canonical JSON; identical tables produce
    byte-identical files."""
    header = _header_json(table)
    entry_strs = [_entry_json(e, d, v, c)
                  for e, (d, v, c) in zip(table.entries, table.grid.cells())]
    body = _obj([("header", header),
                 ("fingerprint", f'"{table.fingerprint()}"'),
                 ("entries", _arr(entry_strs))])
    with open(path, "w") as fh:
        fh.write(body + "\n")


def load_table(path) -> PrimitiveTable:
    """Read a table file, validate invariants and the config fingerprint."""
    with open(path) as fh:
        doc = json.load(fh)
    try:
        header = doc["header"]
        stored_fp = doc["fingerprint"]
        raw_entries = doc["entries"]
        if int(header["schema_version"]) != SCHEMA_VERSION:
            raise SchemaMismatch(f"schema_version {header['schema_version']}")
        a = header["aircraft"]
        p = AircraftParams(a["mass_kg"], a["wing_area_m2"], a["cd0"],
                           a["induced_k"], a["rho"], a["g"])
        env = AirspeedEnvelope.from_knots(header["envelope"]["v_min_kts"],
                                          header["envelope"]["v_max_kts"])
        gj = header["grid"]
        grid = ManeuverGrid(
            tuple(math.radians(d) for d in gj["dchi_deg"]),
            tuple(kt(v) for v in gj["wind_kts"]),
            tuple(math.radians(d) for d in gj["wind_dir_deg"]),
            kt(gj["ref_airspeed_kts"]))
        hj = header["horizon"]
        h = HorizonParams(math.radians(hj["turn_rate_dps"]), hj["tau_s"],
                          hj.get("cap_s"))
        sj = header["surrogate"]
        s = SurrogateParams(sj["dt_s"], int(sj["half_window"]),
                            int(sj["grid_points"]), sj["margin_lo"],
                            sj["margin_hi"])
        box = GammaInterval(math.radians(sj["gamma_box_deg"][0]),
                            math.radians(sj["gamma_box_deg"][1]))
    except (KeyError, TypeError) as exc:
        raise SchemaMismatch(f"malformed table file: {exc}") from None

    if len(raw_entries) != grid.size:
        raise InvariantViolation("entry count does not match grid size")
    entries = []
    for rec, (dchi, speed, direction) in zip(raw_entries, grid.cells()):
        m = _cell_maneuver(grid, dchi, speed, direction)
        try:
            if rec["feasible"]:
                entries.append(Primitive(
                    m, math.radians(rec["gamma_g_deg"]), rec["horizon_s"],
                    rec["cost"], rec["f_tilde_vmin"], rec["f_tilde_vmax"],
                    rec["alt_drop_m"], (rec["disp_north_m"], rec["disp_east_m"])))
            else:
                entries.append(InfeasibleCell(m, rec["horizon_s"]))
        except (KeyError, TypeError) as exc:
            raise SchemaMismatch(f"malformed entry: {exc}") from None
        except ValueError as exc:
            raise InvariantViolation(str(exc)) from None
    table = PrimitiveTable(grid, tuple(entries), p, env, h, s, box)
    if table.fingerprint() != stored_fp:
        raise SchemaMismatch("config fingerprint mismatch")
    return table
