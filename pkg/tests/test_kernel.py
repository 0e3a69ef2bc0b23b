"""Kernel design, validation, and file round trips."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ringopinion import (CircleGrid, SpectralField, design_gaussian_kernel,
                         design_kernel_from_profile, to_spectral,
                         validate_kernel)
from ringopinion.errors import (FrequencyOutOfRange, NonFiniteProfile,
                                TiedMaximum)
from ringopinion.kernel import Kernel
from ringopinion.serialize import read_kernel_csv, write_kernel_csv


@pytest.fixture
def grid():
    return CircleGrid(256)


class TestGaussianDesign:
    def test_peak_coefficient_is_one(self, grid):
        kern = design_gaussian_kernel(grid, 1, 3.0)
        assert kern.coeff(1) == 1.0
        assert kern.k_max == 1

    def test_neighbor_coefficient(self, grid):
        kern = design_gaussian_kernel(grid, 1, 3.0)
        assert abs(kern.coeff(2) - math.exp(-1.0 / 9.0)) < 1e-15

    def test_zero_mean_and_nyquist(self, grid):
        kern = design_gaussian_kernel(grid, 1, 3.0)
        assert kern.coeff(0) == 0.0
        assert kern.spectral.coeff(-128) == 0.0

    def test_strictly_decreasing_for_center_one(self, grid):
        kern = design_gaussian_kernel(grid, 1, 3.0)
        coeffs = [kern.coeff(k) for k in range(1, 128)]
        # strict decrease until the profile underflows to exactly zero
        floor = next(i for i, c in enumerate(coeffs) if c == 0.0)
        assert floor > 60
        assert all(a > b for a, b in zip(coeffs[:floor], coeffs[1:floor]))
        assert all(c == 0.0 for c in coeffs[floor:])

    def test_center_three_peaks_at_three(self, grid):
        kern = design_gaussian_kernel(grid, 3, 3.0)
        vals = {k: kern.coeff(k) for k in range(1, 128)}
        best = max(vals, key=vals.get)
        assert best == 3 and kern.k_max == 3
        assert kern.coeff(-3) == kern.coeff(3) == 1.0

    def test_real_space_is_real_and_even(self, grid):
        for k_c in (1, 3):
            kern = design_gaussian_kernel(grid, k_c, 3.0)
            w = kern.real_space.values
            # W(theta_j) == W(theta_{N-j})
            assert np.max(np.abs(w[1:] - w[1:][::-1])) < 1e-12

    def test_frequency_out_of_range(self, grid):
        with pytest.raises(FrequencyOutOfRange):
            design_gaussian_kernel(grid, 128, 3.0)
        with pytest.raises(FrequencyOutOfRange):
            design_gaussian_kernel(grid, 129, 3.0)


class TestProfileDesign:
    def test_single_mode_gives_double_cosine(self, grid):
        kern = design_kernel_from_profile(grid, {1: 1.0})
        expected = 2.0 * np.cos(2 * np.pi * grid.thetas)
        assert_allclose(kern.real_space.values, expected, atol=1e-12)

    def test_unique_maximizer_sets_k_max(self, grid):
        kern = design_kernel_from_profile(grid, {1: 1.0, 2: 0.5})
        assert kern.k_max == 1

    def test_tie_rejected(self, grid):
        with pytest.raises(TiedMaximum):
            design_kernel_from_profile(grid, {1: 0.7, 2: 0.7})

    def test_non_finite_rejected(self, grid):
        with pytest.raises(NonFiniteProfile):
            design_kernel_from_profile(grid, {1: float("nan")})

    def test_profile_recovered_from_real_space(self, grid):
        profile = {1: 0.9, 2: 0.4, 5: 0.2}
        kern = design_kernel_from_profile(grid, profile)
        spec = to_spectral(kern.real_space)
        for k, v in profile.items():
            assert abs(spec.coeff(k) - v) < 1e-12
            assert abs(spec.coeff(-k) - v) < 1e-12


class TestValidation:
    def test_designed_kernel_passes(self, grid):
        report = validate_kernel(design_gaussian_kernel(grid, 1, 3.0))
        assert report.passed
        assert set(report.checks) == {"symmetry", "realness", "zero_mean",
                                      "unique_k_max", "square_summable"}

    def test_symmetry_violation_detected(self, grid):
        kern = design_gaussian_kernel(grid, 1, 3.0)
        coeffs = kern.spectral.coeffs.copy()
        coeffs[grid.freq_index(1)] += 0.3
        broken = Kernel(grid=grid, spectral=SpectralField(grid, coeffs),
                        real_space=kern.real_space, k_max=1)
        report = validate_kernel(broken)
        assert not report.checks["symmetry"]

    def test_nonzero_mean_detected(self, grid):
        kern = design_gaussian_kernel(grid, 1, 3.0)
        coeffs = kern.spectral.coeffs.copy()
        coeffs[grid.freq_index(0)] = 0.2
        broken = Kernel(grid=grid, spectral=SpectralField(grid, coeffs),
                        real_space=kern.real_space, k_max=1)
        report = validate_kernel(broken)
        assert not report.checks["zero_mean"]
        assert report.checks["symmetry"]


class TestKernelFiles:
    def test_round_trip_bit_exact(self, grid, tmp_path):
        kern = design_gaussian_kernel(grid, 1, 3.0)
        path = tmp_path / "kernel.csv"
        write_kernel_csv(kern, path)
        back = read_kernel_csv(path, grid)
        assert np.array_equal(back.spectral.coeffs, kern.spectral.coeffs)
        assert back.k_max == kern.k_max

    def test_round_trip_profile(self, grid, tmp_path):
        kern = design_kernel_from_profile(grid, {1: 1 / 3, 4: 0.1234567890123456})
        path = tmp_path / "kernel.csv"
        write_kernel_csv(kern, path)
        back = read_kernel_csv(path, grid)
        assert np.array_equal(back.spectral.coeffs, kern.spectral.coeffs)
