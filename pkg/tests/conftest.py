import math
import sys

import pytest

from glidesafe.airframe import AircraftParams
from glidesafe.config import load_aircraft, packaged_aircraft_path
from glidesafe.guidance import HorizonParams, SurrogateParams
from glidesafe.primitives import ManeuverGrid, synthesize_table
from glidesafe.units import kt
from glidesafe.viability import AirspeedEnvelope, GammaInterval


@pytest.fixture(scope="session")
def p182():
    """Shipped default aircraft (1200 kg operating weight)."""
    return load_aircraft(packaged_aircraft_path())


@pytest.fixture(scope="session")
def p_heavy():
    # max-gross variant used by several hand-checked reference numbers
    return AircraftParams(1406.0, 16.17, 0.027, 0.054)


@pytest.fixture(scope="session")
def env():
    return AirspeedEnvelope.from_knots(80.0, 100.0)


@pytest.fixture(scope="session")
def hparams():
    return HorizonParams()


@pytest.fixture(scope="session")
def sparams():
    return SurrogateParams()


@pytest.fixture(scope="session")
def gamma_box():
    return GammaInterval(math.radians(-10.0), 0.0)


@pytest.fixture(scope="session")
def ci_table(p182, env, hparams, sparams, gamma_box):
    """Session-wide table on the reduced 13 x 3 x 8 grid."""
    return synthesize_table(p182, env, ManeuverGrid.ci_subsample(),
                            hparams, sparams, gamma_box)


@pytest.fixture(scope="session")
def campaign_table(p182, env, hparams, sparams, gamma_box):
    """Table whose wind-direction grid (15 deg) matches the course lattice, so
    campaign lookups under a fixed 15 kt wind hit exact cells."""
    grid = ManeuverGrid(
        wind_speed_list_ms=(kt(15.0),),
        wind_direction_list_rad=tuple(-math.pi + i * math.pi / 12
                                      for i in range(24)))
    return synthesize_table(p182, env, grid, hparams, sparams, gamma_box)


@pytest.fixture(scope="session")
def tiny_table(p182, env, hparams, sparams, gamma_box):
    """Small table for serialization / lookup / simulator unit tests."""
    grid = ManeuverGrid(
        delta_course_list_rad=tuple(math.radians(d) for d in (-30.0, 0.0, 30.0)),
        wind_speed_list_ms=(0.0, kt(15.0)),
        wind_direction_list_rad=tuple(-math.pi + i * math.pi / 2
                                      for i in range(4)))
    return synthesize_table(p182, env, grid, hparams, sparams, gamma_box)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # Look up the module instance pytest actually ran; a fresh import here
    # would see an empty RESULTS list.
    mod = next((m for name, m in sys.modules.items()
                if name.rpartition(".")[2] == "test_acceptance"), None)
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
