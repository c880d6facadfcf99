"""Shared fixtures: reference transmon models, drive and target gate."""

import math

import numpy as np
import pytest

from fitness import TargetGate
from model import DriveConfig, TransmonModel


@pytest.fixture
def drive() -> DriveConfig:
    """25 GHz generator, T_g = 0.04 ns."""
    return DriveConfig.from_ghz(25.0)


@pytest.fixture
def model5() -> TransmonModel:
    """5 GHz qubit (exactly five ticks per period), 0.25 GHz anharmonicity, d = 5."""
    return TransmonModel.from_ghz(5.0, 0.25, 0.032, 5)


@pytest.fixture
def model2() -> TransmonModel:
    return TransmonModel.from_ghz(5.0, 0.25, 0.032, 2)


@pytest.fixture
def model3() -> TransmonModel:
    return TransmonModel.from_ghz(5.0, 0.25, 0.032, 3)


@pytest.fixture
def grid_model() -> TransmonModel:
    """First frequency of the reference grid."""
    return TransmonModel.from_ghz(4.54643, 0.25, 0.032, 5)


@pytest.fixture
def y90() -> TargetGate:
    return TargetGate(math.pi / 2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20221)
