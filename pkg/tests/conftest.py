"""
Test configuration and fixtures for the repair toolkit tests.

Provides plant instances, small hand-built controllers and a toy partition whose
classification is known in closed form.
"""

import numpy as np
import pytest

# Import core module to trigger registry auto-discovery
import app.core  # noqa: F401
from app.core.controller import DenseLayer, MlpParams
from app.core.energy import EnergyConfig, RobustnessOracle
from app.core.registry import get_plant
from app.core.region import partition
from app.core.services.annealing import AnnealConfig
from app.core.services.repair import RepairSettings
from app.core.stl import parse_formula


def linear_controller(weights: list[list[float]], bias: list[float]) -> MlpParams:
    """Single identity layer u = W x + b."""
    return MlpParams((DenseLayer(np.array(weights), np.array(bias), "identity"),))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def uuv_plant():
    return get_plant("uuv")


@pytest.fixture
def mc_plant():
    return get_plant("mc")


@pytest.fixture
def toy_plant():
    return get_plant("toy")


@pytest.fixture
def hold_plant():
    return get_plant("hold")


@pytest.fixture
def toy_formula(toy_plant):
    return parse_formula(toy_plant.formula, toy_plant.state_names)


@pytest.fixture
def toy_regions(toy_plant):
    """Two regions: [-0.05, 0] and [0, 0.05]."""
    return partition(toy_plant.initial_lower, toy_plant.initial_upper, toy_plant.partition_steps)


@pytest.fixture
def toy_mixed_controller():
    """u = 0.01: the right region verifies, most of the left one fails."""
    return linear_controller([[0.0]], [0.01])


@pytest.fixture
def toy_oracle(toy_plant, toy_formula):
    return RobustnessOracle(toy_plant, toy_formula)


@pytest.fixture
def repair_settings():
    return RepairSettings(K=10, seed=3, refine_depth=1, max_rounds=10, record_timing=False)


@pytest.fixture
def energy_config():
    return EnergyConfig(K=10)


@pytest.fixture
def anneal_config():
    return AnnealConfig(sigma=0.05, tau0=1.0, alpha=0.9, max_iter=40, seed=3)


@pytest.fixture
def uuv_controller(uuv_plant):
    return MlpParams.build(uuv_plant.layer_sizes, uuv_plant.activations, np.random.default_rng(7), scale=0.5)


@pytest.fixture
def mc_controller(mc_plant):
    return MlpParams.build(mc_plant.layer_sizes, mc_plant.activations, np.random.default_rng(7))
