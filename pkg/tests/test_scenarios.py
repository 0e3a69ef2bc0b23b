"""Input rendering, quasi-static bounds, and decision readout."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ringopinion import (CircleGrid, ConstantInput, Gap, ModelParams,
                         PiecewiseStaticInput, RampedGapsInput, RealField,
                         ScenarioSpec, SimConfig, WidthRamp, cosine_field,
                         design_gaussian_kernel, render_input,
                         run_response_experiment, run_scenario)
from ringopinion.errors import OverlappingGaps, QuasiStaticViolation


@pytest.fixture
def grid():
    return CircleGrid(256)


@pytest.fixture
def params(grid):
    kernel = design_gaussian_kernel(grid, 1, 3.0)
    return ModelParams(tau=1.0, alpha=0.98, xi=0.7, kernel=kernel)


class TestRenderInput:
    def test_single_gap_profile(self, grid):
        spec = ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.008),))
        u = render_input(spec, grid, 0.0)
        assert u.values.max() == 0.008
        assert grid.thetas[int(np.argmax(u.values))] == 0.5
        outside = np.abs((grid.thetas - 0.5 + 0.5) % 1.0 - 0.5) >= 0.1
        assert np.all(u.values[outside] == 0.0)

    def test_two_equal_gaps_symmetric_under_half_shift(self, grid):
        spec = ScenarioSpec(gaps=(Gap(0.25, 0.1, 0.008), Gap(0.75, 0.1, 0.008)))
        u = render_input(spec, grid, 0.0).values
        assert_allclose(u, np.roll(u, 128), atol=0)

    def test_ramp_interpolates_width(self, grid):
        gap = Gap(0.5, 0.2, 0.008, WidthRamp(20.0, 60.0, 0.1))
        assert gap.width_at(0.0) == 0.2
        assert gap.width_at(40.0) == pytest.approx(0.15)
        assert gap.width_at(100.0) == 0.1
        spec = ScenarioSpec(gaps=(gap,))
        support = render_input(spec, grid, 40.0).values > 0
        width_on_grid = support.sum() / grid.n_points
        assert abs(width_on_grid - 0.15) < 0.02

    def test_negative_baseline_fills_outside(self, grid):
        spec = ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.008),), baseline=-0.004)
        u = render_input(spec, grid, 0.0).values
        assert u.max() == 0.008
        assert u.min() == -0.004
        assert u[0] == -0.004

    def test_rectangular_smoothed_has_flat_top(self, grid):
        spec = ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.008),),
                            bump_shape="rectangular_smoothed")
        u = render_input(spec, grid, 0.0).values
        top = np.isclose(u, 0.008)
        assert top.sum() > 10

    def test_perturbation_deterministic_and_time_constant(self, grid):
        spec = ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.008),),
                            perturbation_seed=3, perturbation_scale=1e-9)
        u1 = render_input(spec, grid, 0.0).values
        u2 = render_input(spec, grid, 57.0).values
        assert np.array_equal(u1, u2)
        other = ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.008),),
                             perturbation_seed=4, perturbation_scale=1e-9)
        u3 = render_input(other, grid, 0.0).values
        assert not np.array_equal(u1, u3)
        base = render_input(ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.008),)),
                            grid, 0.0).values
        assert np.max(np.abs(u1 - base)) <= 1e-9

    def test_overlap_rejected(self):
        with pytest.raises(OverlappingGaps):
            ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.008), Gap(0.58, 0.2, 0.008)))

    def test_ramp_overlap_rejected(self):
        # widths only collide once the ramp has widened the second gap
        with pytest.raises(OverlappingGaps):
            ScenarioSpec(gaps=(Gap(0.3, 0.1, 0.008),
                               Gap(0.5, 0.1, 0.008, WidthRamp(0.0, 10.0, 0.35))))

    def test_amplitude_cap(self):
        with pytest.raises(ValueError):
            ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.05),))
        spec = ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.05),), amplitude_cap=0.1)
        assert spec.gaps[0].amplitude == 0.05


class TestInputSignals:
    def test_constant(self, grid):
        u = cosine_field(grid, 1, 0.01)
        sig = ConstantInput(u)
        assert sig.lipschitz_bound == 0.0
        assert np.array_equal(sig.field_at(3.0), u.values)

    def test_piecewise_static(self, grid):
        a = cosine_field(grid, 1, 0.01)
        b = cosine_field(grid, 2, 0.01)
        sig = PiecewiseStaticInput(stages=((0.0, a), (5.0, b)))
        assert np.array_equal(sig.field_at(2.0), a.values)
        assert np.array_equal(sig.field_at(5.0), b.values)
        assert sig.lipschitz_bound == math.inf
        assert sig.settled_after == 5.0

    def test_ramped_bound_static_case(self, grid):
        sig = RampedGapsInput(ScenarioSpec(gaps=(Gap(0.5, 0.2, 0.008),)), grid)
        assert sig.lipschitz_bound == 0.0
        assert sig.settled_after == 0.0

    def test_ramped_bound_scales_with_rate(self, grid):
        slow = RampedGapsInput(ScenarioSpec(
            gaps=(Gap(0.5, 0.2, 0.008, WidthRamp(20.0, 60.0, 0.1)),)), grid)
        fast = RampedGapsInput(ScenarioSpec(
            gaps=(Gap(0.5, 0.2, 0.008, WidthRamp(20.0, 24.0, 0.1)),)), grid)
        assert 0 < slow.lipschitz_bound < 1e-3
        assert abs(fast.lipschitz_bound / slow.lipschitz_bound - 10.0) < 0.5
        assert slow.settled_after == 60.0


class TestResponseExperiment:
    def test_zero_input_stays_neutral(self, grid, params):
        u = RealField(grid, np.zeros(256))
        res = run_response_experiment(u, params, SimConfig(dt=0.01, t_final=5.0))
        assert np.all(res.sim.final_state.values == 0.0)
        assert res.alignment == 0.0
        assert math.isnan(res.amplification)

    def test_alignment_reported(self, grid, params):
        u = cosine_field(grid, 1, 0.008)
        res = run_response_experiment(u, params,
                                      SimConfig(dt=0.01, t_final=2.0))
        assert abs(res.alignment - 0.004) < 1e-15


class TestRunScenario:
    def test_quasi_static_violation_rejected(self, grid, params):
        spec = ScenarioSpec(gaps=(
            Gap(0.5, 0.2, 0.008, WidthRamp(1.0, 1.2, 0.02)),))
        with pytest.raises(QuasiStaticViolation):
            run_scenario(spec, params, SimConfig(dt=0.01, t_final=5.0))

    def test_no_decision_below_threshold(self, grid, params):
        spec = ScenarioSpec(gaps=(Gap(0.5, 0.1, 0.001),))
        res = run_scenario(spec, params, SimConfig(dt=0.01, t_final=5.0))
        assert res.decision.chosen_gap is None
        assert res.decision.decision_time is None
        assert not res.decision.switched

    def test_decision_rotation_equivariance(self, grid, params):
        cfg = SimConfig(dt=0.01, t_final=30.0, record_stride=100)
        base = ScenarioSpec(
            gaps=(Gap(0.25, 0.18, 0.1), Gap(0.60, 0.08, 0.1)),
            amplitude_cap=0.1)
        m = 64
        rotated = ScenarioSpec(
            gaps=(Gap(0.25 + m / 256, 0.18, 0.1), Gap(0.60 + m / 256, 0.08, 0.1)),
            amplitude_cap=0.1)
        res_a = run_scenario(base, params, cfg)
        res_b = run_scenario(rotated, params, cfg)
        arg_a = int(np.argmax(res_a.sim.final_state.values))
        arg_b = int(np.argmax(res_b.sim.final_state.values))
        assert (arg_a + m) % 256 == arg_b
        assert abs(res_a.decision.opinion_max - res_b.decision.opinion_max) < 1e-9
