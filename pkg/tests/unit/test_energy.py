"""
Unit tests for the barrier energy and its Monte Carlo estimator.

The hold plant keeps its state, so rob(x) = x and the integral energy has a closed
form that the quadrature oracle reproduces.
"""

import math

import numpy as np
import pytest

from app.config import settings
from app.core.energy import (
    EnergyConfig,
    RobustnessOracle,
    energy_from_robustness,
    evaluate_energy,
    exact_energy_oracle,
    log_barrier,
)
from app.core.exceptions import EnergyError
from app.core.region import partition, sample_region
from app.core.stl import parse_formula
from tests.conftest import linear_controller

IDLE = linear_controller([[0.0]], [0.0])


@pytest.fixture
def hold_setup(hold_plant):
    """Repair region [-1, 0]; protected regions [1, 2] and [2, 3]."""
    formula = parse_formula(hold_plant.formula, hold_plant.state_names)
    regions = partition(hold_plant.initial_lower, hold_plant.initial_upper, hold_plant.partition_steps)
    return hold_plant, formula, regions[0], [regions[2], regions[3]]


def _estimates(plant, formula, region, protected, cfg, K, resamples):
    oracle = RobustnessOracle(plant, formula, max_entries=4)
    values = []
    for seed in range(resamples):
        repair_states = plant.embed(sample_region(region, K, seed))
        protected_states = plant.embed(np.concatenate([sample_region(r, K, seed) for r in protected]))
        values.append(evaluate_energy(repair_states, protected_states, IDLE, plant, formula, cfg, oracle).energy)
    return np.array(values)


class TestLogBarrier:
    """Test suite for log_barrier."""

    def test_values(self):
        assert log_barrier(1.0) == 0.0
        assert log_barrier(math.e) == pytest.approx(1.0)
        assert log_barrier(0.0) == -1000.0
        assert log_barrier(-3.0) == -1000.0
        assert log_barrier(1e-300) == pytest.approx(math.log(1e-300))

    def test_custom_floor_and_arrays(self):
        values = log_barrier(np.array([-1.0, 1e-9, 1.0]), floor=-10.0)

        np.testing.assert_allclose(values, [-10.0, -10.0, 0.0])


class TestEnergy:
    """Test suite for the energy estimator."""

    def test_without_protected_samples(self):
        estimate = energy_from_robustness(np.array([-1.0, 0.5]), np.empty(0), EnergyConfig())

        assert estimate.energy == pytest.approx(-0.25)
        assert estimate.rho_min == settings.TOP_ROBUSTNESS

    def test_barrier_term_and_rho_min(self):
        estimate = energy_from_robustness(np.array([1.0]), np.array([1.0, math.e]), EnergyConfig(lam=2.0))

        assert estimate.energy == pytest.approx(1.0 + 2.0 * 0.5)
        assert estimate.rho_min == 1.0

    def test_negative_protected_hits_floor(self):
        estimate = energy_from_robustness(np.array([0.0]), np.array([-0.1, 1.0]), EnergyConfig(barrier_floor=-50.0))

        assert estimate.energy == pytest.approx(-25.0)
        assert estimate.rho_min == -0.1

    def test_empty_repair_set(self, hold_setup):
        plant, formula, _, _ = hold_setup

        with pytest.raises(EnergyError):
            evaluate_energy(np.empty((0, 1)), np.ones((2, 1)), IDLE, plant, formula, EnergyConfig())

    def test_closed_form_on_hold_plant(self, hold_setup):
        plant, formula, _, _ = hold_setup
        estimate = evaluate_energy(
            np.array([[-1.0], [-0.5]]), np.array([[1.0], [math.e]]), IDLE, plant, formula, EnergyConfig()
        )

        assert estimate.energy == pytest.approx(-0.75 + 0.5)

    def test_oracle_caches_and_counts(self, hold_setup):
        plant, formula, _, _ = hold_setup
        oracle = RobustnessOracle(plant, formula)
        states = np.array([[0.5], [2.0]])

        first = oracle(IDLE, states)
        second = oracle(IDLE, states.copy())

        assert second is first
        assert oracle.evaluations == 2
        assert not first.flags.writeable
        np.testing.assert_allclose(first, [0.5, 2.0])

    def test_oracle_evicts_oldest(self, hold_setup):
        plant, formula, _, _ = hold_setup
        oracle = RobustnessOracle(plant, formula, max_entries=1)

        oracle(IDLE, np.array([[1.0]]))
        oracle(IDLE, np.array([[2.0]]))
        oracle(IDLE, np.array([[1.0]]))

        assert oracle.evaluations == 3


class TestMonteCarloEstimator:
    """The sampled energy is an unbiased estimate of the integral energy."""

    def test_quadrature_matches_closed_form(self, hold_setup):
        plant, formula, region, protected = hold_setup
        expected = -0.5 + (3.0 * math.log(3.0) - 3.0 + 1.0) / 2.0

        assert exact_energy_oracle(region, protected, IDLE, plant, formula, EnergyConfig()) == pytest.approx(
            expected, abs=1e-4
        )

    def test_unbiased_within_four_standard_errors(self, hold_setup):
        plant, formula, region, protected = hold_setup
        cfg = EnergyConfig(K=20)
        exact = exact_energy_oracle(region, protected, IDLE, plant, formula, cfg)

        values = _estimates(plant, formula, region, protected, cfg, K=20, resamples=2000)

        standard_error = values.std(ddof=1) / math.sqrt(len(values))
        assert abs(values.mean() - exact) <= 4.0 * standard_error

    def test_variance_scales_inversely_with_k(self, hold_setup):
        plant, formula, region, protected = hold_setup
        cfg = EnergyConfig()

        small = _estimates(plant, formula, region, protected, cfg, K=10, resamples=2000)
        large = _estimates(plant, formula, region, protected, cfg, K=40, resamples=2000)

        assert 3.2 <= small.var(ddof=1) / large.var(ddof=1) <= 5.0

    def test_grid_density_floor(self, hold_setup):
        plant, formula, region, protected = hold_setup

        with pytest.raises(EnergyError, match="at least 50"):
            exact_energy_oracle(region, protected, IDLE, plant, formula, EnergyConfig(), grid_density=10)
