from __future__ import annotations

import numpy as np
import pytest

from berthplan.geometry import Polygon, ShipDomain
from berthplan.ship import default_ship
from berthplan.states import ActuatorState, State, WindCondition


@pytest.fixture(scope="session")
def ship():
    return default_ship()


@pytest.fixture(scope="session")
def square():
    return Polygon([(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)])


@pytest.fixture(scope="session")
def basin():
    from berthplan.io import load_port, bundled_path
    return load_port(bundled_path("port_basin.yaml")).polygon


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


@pytest.fixture
def calm():
    return WindCondition(gamma_t=0.0, speed=0.0)


@pytest.fixture
def neutral_actuators():
    return ActuatorState(0.0, 0.0, 0.0, 0.0)


@pytest.fixture
def rest_state():
    return State(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
