import math

import numpy as np
import pytest

from geomgate.evolution import DeviceParams
from geomgate.qcore import GateSpec

SQ2 = math.sqrt(2.0)

# independent textbook matrices, written out literally
STANDARD_GATES = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / SQ2,
    "Rx(pi)": np.array([[0, -1j], [-1j, 0]], dtype=complex),
    "Rx(pi/2)": np.array([[1, -1j], [-1j, 1]], dtype=complex) / SQ2,
    "Ry(pi)": np.array([[0, -1], [1, 0]], dtype=complex),
    "Ry(pi/2)": np.array([[1, -1], [1, 1]], dtype=complex) / SQ2,
    "Rz(pi)": np.array([[-1j, 0], [0, 1j]], dtype=complex),
    "Rz(pi/2)": np.array([[1 - 1j, 0], [0, 1 + 1j]], dtype=complex) / SQ2,
}


def random_spec(rng) -> GateSpec:
    return GateSpec(rng.uniform(0.0, math.pi),
                    rng.uniform(-math.pi, math.pi),
                    rng.uniform(-2.0 * math.pi, 2.0 * math.pi))


@pytest.fixture
def device() -> DeviceParams:
    return DeviceParams.default_xmon()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)
