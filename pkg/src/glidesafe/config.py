"""Run configuration loading.

Configs live in JSON with presentation units (knots, degrees) at the boundary
and SI everywhere inside the library.  Aircraft parameters come from their own
JSON file (keys carry units: mass_kg, wing_area_m2, cd0, induced_k, rho, g);
the packaged cessna182.json is the default when no aircraft file is given.
"""

import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .airframe import AircraftParams
from .errors import ConfigError
from .guidance import HorizonParams, SurrogateParams
from .primitives import ManeuverGrid
from .units import kt
from .viability import AirspeedEnvelope, GammaInterval
from .windframe import WindVector

_AIRCRAFT_REQUIRED = ("mass_kg", "wing_area_m2", "cd0", "induced_k")


def packaged_aircraft_path() -> str:
    return str(resources.files("glidesafe").joinpath("data/cessna182.json"))


def load_aircraft(path) -> AircraftParams:
    """Aircraft parameters from JSON.  rho and g default to sea-level
    standard values when absent."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read aircraft file {path}: {exc}") from None
    missing = [k for k in _AIRCRAFT_REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"aircraft file {path} missing keys: {missing}")
    try:
        return AircraftParams(float(raw["mass_kg"]), float(raw["wing_area_m2"]),
                              float(raw["cd0"]), float(raw["induced_k"]),
                              float(raw.get("rho", 1.225)),
                              float(raw.get("g", 9.81)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid aircraft parameters in {path}: {exc}") from None


@dataclass
class RunConfig:
    aircraft: AircraftParams
    envelope: AirspeedEnvelope
    grid: ManeuverGrid
    horizon: HorizonParams
    surrogate: SurrogateParams
    gamma_box: GammaInterval
    wind: WindVector = field(default_factory=WindVector)
    seed: Optional[int] = None
    outputs: dict = field(default_factory=dict)


def default_run_config() -> RunConfig:
    return RunConfig(aircraft=load_aircraft(packaged_aircraft_path()),
                     envelope=AirspeedEnvelope.from_knots(80.0, 100.0),
                     grid=ManeuverGrid.default(),
                     horizon=HorizonParams(),
                     surrogate=SurrogateParams(),
                     gamma_box=GammaInterval(math.radians(-10.0), 0.0))


def _grid_from_dict(d: dict) -> ManeuverGrid:
    kwargs = {}
    if "dchi_deg" in d:
        kwargs["delta_course_list_rad"] = tuple(math.radians(x)
                                                for x in d["dchi_deg"])
    if "wind_kts" in d:
        kwargs["wind_speed_list_ms"] = tuple(kt(x) for x in d["wind_kts"])
    if "wind_dir_deg" in d:
        kwargs["wind_direction_list_rad"] = tuple(math.radians(x)
                                                  for x in d["wind_dir_deg"])
    if "ref_airspeed_kts" in d:
        kwargs["ref_airspeed_ms"] = kt(d["ref_airspeed_kts"])
    return ManeuverGrid(**kwargs)


def load_run_config(path) -> RunConfig:
    """Parse a run config JSON file.

    All sections are optional and fall back to the defaults above; the
    aircraft entry may be a path (resolved relative to the config file) or an
    inline parameter object.
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    try:
        ac = raw.get("aircraft")
        if ac is None:
            aircraft = load_aircraft(packaged_aircraft_path())
        elif isinstance(ac, str):
            ac_path = ac if os.path.isabs(ac) else os.path.join(
                os.path.dirname(os.path.abspath(path)), ac)
            aircraft = load_aircraft(ac_path)
        elif isinstance(ac, dict):
            missing = [k for k in _AIRCRAFT_REQUIRED if k not in ac]
            if missing:
                raise ConfigError(f"inline aircraft missing keys: {missing}")
            aircraft = AircraftParams(
                float(ac["mass_kg"]), float(ac["wing_area_m2"]),
                float(ac["cd0"]), float(ac["induced_k"]),
                float(ac.get("rho", 1.225)), float(ac.get("g", 9.81)))
        else:
            raise ConfigError("aircraft must be a path or an object")

        env_kts = raw.get("envelope_kts", [80.0, 100.0])
        if len(env_kts) != 2:
            raise ConfigError("envelope_kts must be [v_min, v_max]")
        try:
            envelope = AirspeedEnvelope.from_knots(float(env_kts[0]),
                                                   float(env_kts[1]))
        except ValueError as exc:
            raise ConfigError(f"invalid envelope: {exc}") from None

        grid = _grid_from_dict(raw.get("grid", {}))

        hz = raw.get("horizon", {})
        horizon = HorizonParams(
            turn_rate_rad_s=math.radians(hz.get("turn_rate_dps", 3.0)),
            tau_s=float(hz.get("tau_s", 10.0)),
            cap_s=hz.get("cap_s"))

        sg = raw.get("surrogate", {})
        surrogate = SurrogateParams(
            dt_s=float(sg.get("dt_s", 0.05)),
            half_window=int(sg.get("half_window", 5)),
            grid_points=int(sg.get("grid_points", 41)),
            margin_lo=float(sg.get("margin_lo", 0.0)),
            margin_hi=float(sg.get("margin_hi", 0.0)))
        box_deg = sg.get("gamma_box_deg", [-10.0, 0.0])
        if len(box_deg) != 2 or box_deg[0] > box_deg[1]:
            raise ConfigError("gamma_box_deg must be [lo, hi] with lo <= hi")
        gamma_box = GammaInterval(math.radians(float(box_deg[0])),
                                  math.radians(float(box_deg[1])))

        wd = raw.get("wind", {})
        wind = WindVector.from_speed_direction(
            kt(wd.get("speed_kts", 0.0)),
            math.radians(wd.get("direction_deg", 0.0)))

        seed = raw.get("seed")
        if seed is not None:
            seed = int(seed)
        outputs = raw.get("outputs", {})
        if not isinstance(outputs, dict):
            raise ConfigError("outputs must be an object")
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from None
    return RunConfig(aircraft, envelope, grid, horizon, surrogate, gamma_box,
                     wind, seed, outputs)
