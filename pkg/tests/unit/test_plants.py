"""
Unit tests for plant dynamics and closed-loop simulation.
"""

import numpy as np
import pytest

from app.core.exceptions import DimensionMismatchError, HorizonTooShortError
from app.core.plants import step_mc, step_uuv
from app.core.plants.mountain_car import GOAL_POSITION, MAX_SPEED, MIN_POSITION
from app.core.registry import get_plant, list_registered_plants
from app.core.simulation import rob, rob_batch, rollout, rollout_batch
from app.core.stl import parse_formula
from app.core.verifier.interval import IntervalBox
from app.workers.pool import WorkPool
from tests.conftest import linear_controller


class TestRegistry:
    def test_plants_registered(self):
        assert {"uuv", "mc", "toy", "shift", "hold"} <= set(list_registered_plants())

    def test_unknown_plant_lists_available(self):
        with pytest.raises(KeyError, match="Available"):
            get_plant("submarine")


class TestUuvDynamics:
    """Test suite for the UUV kinematics."""

    def test_heading_zero_moves_along_x(self):
        state = np.array([0.0, 15.0, 0.0, 0.4855])

        np.testing.assert_allclose(step_uuv(state, np.array(0.0)), [0.4855, 15.0, 0.0, 0.4855])

    def test_heading_ninety_moves_along_y(self):
        state = np.array([0.0, 15.0, 90.0, 0.4855])
        nxt = step_uuv(state, np.array(5.0))

        assert nxt[0] == pytest.approx(0.0, abs=1e-12)
        assert nxt[1] == pytest.approx(15.4855)
        assert nxt[2] == 95.0

    def test_turn_rate_is_clamped(self, uuv_plant):
        np.testing.assert_array_equal(uuv_plant.act(np.array([[3.0], [-0.5]])), [[5.0], [-2.5]])

    def test_turn_box_is_clamped_after_scaling(self, uuv_plant):
        box = uuv_plant.act_box(IntervalBox(np.array([-2.0]), np.array([3.0])))

        np.testing.assert_array_equal(box.lower, [-5.0])
        np.testing.assert_array_equal(box.upper, [5.0])
        np.testing.assert_array_equal(uuv_plant.act(np.array([-2.0, 1.0, 0.2])), [-5.0, 5.0, 1.0])

    def test_observation(self, uuv_plant):
        np.testing.assert_array_equal(uuv_plant.observe(np.array([1.0, 14.0, 20.0, 0.4855])), [20.0, 4.0])

    def test_embed_fills_fixed_coordinates(self, uuv_plant):
        states = uuv_plant.embed(np.array([[12.5, 15.0]]))

        np.testing.assert_array_equal(states, [[0.0, 12.5, 15.0, 0.4855]])


class TestMountainCarDynamics:
    """Test suite for the mountain car transition."""

    def test_velocity_clamp(self):
        nxt = step_mc(np.array([0.5, 0.0699]), np.array(1.0))

        assert nxt[1] == MAX_SPEED

    def test_left_wall_stops_the_car(self):
        nxt = step_mc(np.array([-1.19, -0.05]), np.array(-1.0))

        assert nxt[0] == MIN_POSITION
        assert nxt[1] == 0.0

    def test_gravity_pulls_from_rest_at_origin(self):
        nxt = step_mc(np.array([0.0, 0.0]), np.array(0.0))

        assert nxt[1] == pytest.approx(-0.0025)
        assert nxt[0] == pytest.approx(-0.0025)

    def test_wall_resets_velocity_from_the_boundary(self):
        nxt = step_mc(np.array([MIN_POSITION, -0.01]), np.array(0.0))

        assert nxt[0] == MIN_POSITION
        assert nxt[1] == 0.0

    def test_robustness_never_exceeds_ceiling(self, mc_plant, mc_controller):
        formula = parse_formula(mc_plant.formula, mc_plant.state_names)
        rng = np.random.default_rng(3)
        initial = mc_plant.embed(rng.uniform(mc_plant.initial_lower, mc_plant.initial_upper, size=(200, 2)))

        robs = rob_batch(mc_plant, formula, mc_controller, initial)

        assert np.all(robs <= 0.6 - GOAL_POSITION + 1e-12)


class TestSimulation:
    """Rollouts and rob."""

    def test_rollout_shape_and_start(self, uuv_plant, uuv_controller):
        s0 = uuv_plant.embed(np.array([15.0, 20.0]))
        trajectory = rollout(uuv_plant, uuv_controller, s0)

        assert trajectory.states.shape == (31, 4)
        np.testing.assert_array_equal(trajectory.states[0], s0)

    def test_toy_rob_is_closed_form(self, toy_plant, toy_formula):
        params = linear_controller([[0.0]], [0.02])

        assert rob(toy_plant, toy_formula, np.array([-0.01]), params) == pytest.approx(0.01)

    def test_batch_matches_single(self, uuv_plant, uuv_controller):
        formula = parse_formula(uuv_plant.formula, uuv_plant.state_names)
        initial = uuv_plant.embed(np.array([[13.0, 12.0], [20.0, 28.0]]))

        batch = rob_batch(uuv_plant, formula, uuv_controller, initial)

        for i in range(2):
            assert batch[i] == pytest.approx(rob(uuv_plant, formula, initial[i], uuv_controller), rel=1e-12, abs=1e-12)

    def test_pool_does_not_change_results(self, uuv_plant, uuv_controller):
        formula = parse_formula(uuv_plant.formula, uuv_plant.state_names)
        rng = np.random.default_rng(11)
        initial = uuv_plant.embed(rng.uniform(uuv_plant.initial_lower, uuv_plant.initial_upper, size=(600, 2)))

        serial = rob_batch(uuv_plant, formula, uuv_controller, initial)
        with WorkPool(4) as pool:
            threaded = rob_batch(uuv_plant, formula, uuv_controller, initial, pool)

        np.testing.assert_array_equal(serial, threaded)

    def test_zero_steps_rejected(self, toy_plant, toy_mixed_controller):
        with pytest.raises(HorizonTooShortError):
            rollout_batch(toy_plant, toy_mixed_controller, np.zeros((1, 1)), 0)

    def test_formula_longer_than_horizon(self, toy_plant, toy_mixed_controller):
        formula = parse_formula("G[0,5](x >= 0)")

        with pytest.raises(HorizonTooShortError, match="horizon"):
            rob_batch(toy_plant, formula, toy_mixed_controller, np.zeros((1, 1)))

    def test_state_dimension_checked(self, toy_plant, toy_mixed_controller):
        with pytest.raises(DimensionMismatchError):
            rollout_batch(toy_plant, toy_mixed_controller, np.zeros((1, 2)), 1)
