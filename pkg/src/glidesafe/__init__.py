"""Airspeed-viability certification for unpowered fixed-wing guidance.

The package certifies ground-referenced flight path angle commands that keep
airspeed inside a prescribed envelope during gliding flight in steady
horizontal wind, synthesizes a table of certified maneuver primitives, and
validates forward invariance by simulating trajectories assembled from them.
"""

from .airframe import AircraftParams, FlightCondition
from .guidance import HorizonParams, Maneuver, SurrogateParams
from .primitives import (ManeuverGrid, Primitive, PrimitiveTable, load_table,
                         lookup, save_table, synthesize_table)
from .viability import AirspeedEnvelope, GammaInterval
from .windframe import WindVector

__version__ = "0.1.0"

__all__ = [
    "AircraftParams",
    "FlightCondition",
    "AirspeedEnvelope",
    "GammaInterval",
    "WindVector",
    "Maneuver",
    "HorizonParams",
    "SurrogateParams",
    "ManeuverGrid",
    "Primitive",
    "PrimitiveTable",
    "synthesize_table",
    "save_table",
    "load_table",
    "lookup",
]
