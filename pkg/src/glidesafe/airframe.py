"""Point-mass unpowered aerodynamic model.

Quadratic drag polar, coordinated-turn lift balance, and the airspeed
acceleration vector field f(v_a, gamma_a) that every viability check in the
package is built on.  All functions are pure and take explicit parameter
objects, so they are safe for concurrent read-only use.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NoEquilibrium

_HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class AircraftParams:
    """Mass, geometry, drag polar, and environment constants of the glider."""

    mass_kg: float
    wing_area_m2: float
    cd0: float
    induced_factor_k: float
    air_density_kgm3: float = 1.225
    gravity_ms2: float = 9.81

    def __post_init__(self):
        if self.mass_kg <= 0 or self.wing_area_m2 <= 0:
            raise ValueError("mass and wing area must be positive")
        if self.air_density_kgm3 <= 0 or self.gravity_ms2 <= 0:
            raise ValueError("air density and gravity must be positive")
        if self.cd0 < 0 or self.induced_factor_k < 0:
            raise ValueError("drag polar coefficients must be nonnegative")

    @property
    def weight_n(self) -> float:
        return self.mass_kg * self.gravity_ms2


@dataclass(frozen=True)
class FlightCondition:
    """Instantaneous airspeed, air-relative flight path angle, and bank."""

    airspeed_ms: float
    gamma_air_rad: float = 0.0
    bank_rad: float = 0.0

    def __post_init__(self):
        if self.airspeed_ms <= 0:
            raise ValueError("airspeed must be positive")
        if abs(self.bank_rad) >= _HALF_PI:
            raise ValueError("bank magnitude must be below 90 deg")
        if abs(self.gamma_air_rad) >= _HALF_PI:
            raise ValueError("flight path angle magnitude must be below 90 deg")


def lift_coefficient(p: AircraftParams, c: FlightCondition) -> float:
    """Lift coefficient balancing weight normal to the flight path in a
    coordinated turn: C_L = 2 W cos(gamma_a) / (rho S v_a^2 cos(mu))."""
    q_area = p.air_density_kgm3 * p.wing_area_m2 * c.airspeed_ms**2
    return 2.0 * p.weight_n * math.cos(c.gamma_air_rad) / (q_area * math.cos(c.bank_rad))


def drag_N(p: AircraftParams, c: FlightCondition) -> float:
    """Total drag from the quadratic polar, newtons.

    Parasite term grows with v^2, induced term decays with v^2 and scales with
    (cos gamma_a / cos mu)^2 through the lift requirement.
    """
    return drag_array(p, c.airspeed_ms, c.gamma_air_rad, c.bank_rad)


def drag_array(p: AircraftParams, v_a, gamma_a, bank_rad=0.0):
    """Vectorized drag polar; accepts scalars or ndarrays."""
    rho_s = p.air_density_kgm3 * p.wing_area_m2
    v2 = np.multiply(v_a, v_a)
    parasite = 0.5 * rho_s * p.cd0 * v2
    load = np.cos(gamma_a) / np.cos(bank_rad)
    induced = 2.0 * p.induced_factor_k * p.weight_n**2 / (rho_s * v2) * load * load
    return parasite + induced


def airspeed_rate(p: AircraftParams, c: FlightCondition) -> float:
    """Airspeed acceleration v_a_dot = -D/m - g sin(gamma_a), m/s^2.

    This is the vector field every viability check evaluates at the envelope
    boundaries.
    """
    return airspeed_rate_array(p, c.airspeed_ms, c.gamma_air_rad, c.bank_rad)


def airspeed_rate_array(p: AircraftParams, v_a, gamma_a, bank_rad=0.0):
    """Vectorized airspeed acceleration; accepts scalars or ndarrays."""
    drag = drag_array(p, v_a, gamma_a, bank_rad)
    return -drag / p.mass_kg - p.gravity_ms2 * np.sin(gamma_a)


def equilibrium_glide_angle(p: AircraftParams, v_a: float, bank_rad: float = 0.0) -> float:
    """Air-relative flight path angle at which drag exactly balances the
    along-path gravity component, so airspeed is constant.

    Found by bracketed root-finding of airspeed_rate on (-pi/2, 0].  Raises
    NoEquilibrium when drag exceeds weight across the whole bracket.
    """
    def rate(gamma):
        return airspeed_rate_array(p, v_a, gamma, bank_rad)

    if rate(0.0) == 0.0:  # zero-drag polar
        return 0.0
    lo = -_HALF_PI + 1e-9
    if rate(lo) <= 0.0:
        raise NoEquilibrium(
            f"no gliding equilibrium at v_a={v_a:.2f} m/s: drag exceeds weight")
    return brentq(rate, lo, 0.0, xtol=1e-13, rtol=8.9e-16)
