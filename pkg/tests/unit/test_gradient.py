"""
Unit tests for the gradient-ascent baseline.
"""

import numpy as np
import pytest

from app.core.energy import EnergyConfig
from app.core.registry import get_optimizer_class
from app.core.services.annealing import AnnealConfig
from app.core.services.gradient import (
    GradientAscentOptimizer,
    GradientConfig,
    finite_difference_gradient,
    gradient_ascent,
    smoothed_energy,
)

TARGET = np.array([1.5, -2.0, 0.25])


def concave_quadratic(theta: np.ndarray) -> float:
    return -float(np.sum((theta - TARGET) ** 2))


class TestGradientAscent:
    """Test suite for gradient_ascent and finite_difference_gradient."""

    def test_finite_differences_match_analytic_gradient(self):
        def objective(theta):
            return theta[0] ** 2 + 3.0 * theta[1] - np.sin(theta[2])

        theta = np.array([1.0, 2.0, 0.3])
        expected = np.array([2.0, 3.0, -np.cos(0.3)])

        np.testing.assert_allclose(finite_difference_gradient(objective, theta, 1e-5), expected, atol=1e-6)

    def test_converges_on_quadratic(self):
        theta, history = gradient_ascent(concave_quadratic, np.zeros(3), eta=0.1, steps=200)

        np.testing.assert_allclose(theta, TARGET, atol=1e-6)
        assert len(history) == 200
        assert all(step.accepted for step in history)

    def test_zero_step_size_returns_start(self):
        start = np.array([3.0, 3.0, 3.0])
        theta, history = gradient_ascent(concave_quadratic, start, eta=0.0, steps=50)

        np.testing.assert_array_equal(theta, start)
        assert history == []

    def test_rejected_step_ends_run(self):
        theta, history = gradient_ascent(
            concave_quadratic, np.zeros(3), eta=0.1, steps=50, accept=lambda candidate: candidate[0] < 0.5
        )

        assert theta[0] < 0.5
        assert not history[-1].accepted
        assert all(step.accepted for step in history[:-1])
        assert len(history) < 50

    def test_start_is_not_modified(self):
        start = np.zeros(3)
        gradient_ascent(concave_quadratic, start, eta=0.1, steps=5)

        np.testing.assert_array_equal(start, np.zeros(3))


class TestGradientAscentOptimizer:
    """The registered "grad" inner step."""

    def test_registered(self):
        assert get_optimizer_class("grad") is GradientAscentOptimizer

    def test_smoothed_energy_tracks_exact_energy(self, toy_plant, toy_formula, toy_mixed_controller):
        repair = np.array([[-0.04], [-0.03]])
        protected = np.array([[0.02]])
        energy = EnergyConfig()

        value = smoothed_energy(repair, protected, toy_mixed_controller, toy_plant, toy_formula, energy, beta=10.0)

        exact = np.mean([-0.03, -0.02]) + np.log(0.03)
        assert value == pytest.approx(exact)

    def test_protected_samples_stay_safe(self, toy_plant, toy_formula, toy_mixed_controller, toy_oracle):
        repair = np.array([[-0.04], [-0.03], [-0.02]])
        protected = np.array([[0.001], [0.01], [0.04]])
        optimizer = GradientAscentOptimizer(EnergyConfig(), AnnealConfig(), GradientConfig(etas=(1.0, 0.1), steps=5))

        result = optimizer.improve(repair, protected, toy_mixed_controller, toy_plant, toy_formula, toy_oracle, 0, 0)

        assert np.all(toy_oracle(result.params, protected) >= 0)
        assert {r.tau for r in result.records} <= {1.0, 0.1}
        assert [r.iteration for r in result.records] == list(range(len(result.records)))

    def test_improves_exact_energy(self, toy_plant, toy_formula, toy_mixed_controller, toy_oracle):
        repair = np.array([[-0.04], [-0.03]])
        optimizer = GradientAscentOptimizer(EnergyConfig(), AnnealConfig(), GradientConfig(etas=(0.1,), steps=3))

        result = optimizer.improve(
            repair, np.empty((0, 1)), toy_mixed_controller, toy_plant, toy_formula, toy_oracle, 0, 0
        )

        assert result.changed
        assert toy_oracle(result.params, repair).mean() > toy_oracle(toy_mixed_controller, repair).mean()
