"""Transform pair, shift operator, and inner product on the circle grid."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ringopinion import (CircleGrid, RealField, SpectralField, cosine_field,
                         inner_product, shift, to_real, to_spectral)
from ringopinion.errors import GridMismatch, NonSymmetricSpectrum


def brute_force_transform(values: np.ndarray) -> dict[int, complex]:
    """Direct O(N^2) evaluation of (1/N) sum_j f_j exp(-i 2 pi k j / N)."""
    n = len(values)
    out = {}
    for k in range(-n // 2, n // 2):
        acc = 0.0 + 0.0j
        for j in range(n):
            acc += values[j] * np.exp(-2j * np.pi * k * j / n)
        out[k] = acc / n
    return out


class TestGridConstruction:
    def test_points_and_spacing(self):
        grid = CircleGrid(16)
        assert grid.spacing == 1.0 / 16
        assert_allclose(grid.thetas, np.arange(16) / 16)
        assert list(grid.frequencies) == list(range(-8, 8))

    @pytest.mark.parametrize("n", [0, 2, 6, 7, 9, 255])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError):
            CircleGrid(n)

    def test_field_length_checked(self):
        grid = CircleGrid(16)
        with pytest.raises(ValueError):
            RealField(grid, np.zeros(15))

    def test_field_must_be_finite(self):
        grid = CircleGrid(16)
        values = np.zeros(16)
        values[3] = np.inf
        with pytest.raises(ValueError):
            RealField(grid, values)


class TestForwardTransform:
    def test_constant_is_pure_dc(self):
        grid = CircleGrid(32)
        spec = to_spectral(RealField(grid, np.ones(32)))
        assert abs(spec.coeff(0) - 1.0) < 1e-12
        others = [abs(spec.coeff(k)) for k in grid.frequencies if k != 0]
        assert max(others) < 1e-12

    def test_cosine_splits_into_half_pair(self):
        grid = CircleGrid(16)
        spec = to_spectral(cosine_field(grid, 1))
        assert abs(spec.coeff(1) - 0.5) < 1e-12
        assert abs(spec.coeff(-1) - 0.5) < 1e-12
        others = [abs(spec.coeff(k)) for k in grid.frequencies if abs(k) != 1]
        assert max(others) < 1e-12

    def test_matches_brute_force_on_gaussian_bump(self):
        grid = CircleGrid(64)
        values = np.exp(-((grid.thetas - 0.5) ** 2) / 0.01)
        spec = to_spectral(RealField(grid, values))
        expected = brute_force_transform(values)
        for k, want in expected.items():
            assert abs(spec.coeff(k) - want) < 1e-12

    def test_conjugate_symmetry(self):
        grid = CircleGrid(64)
        rng = np.random.default_rng(7)
        spec = to_spectral(RealField(grid, rng.normal(size=64)))
        for k in range(1, 32):
            assert abs(spec.coeff(-k) - np.conj(spec.coeff(k))) < 1e-12


class TestInverseTransform:
    def test_dc_gives_constant(self):
        grid = CircleGrid(16)
        coeffs = np.zeros(16, dtype=complex)
        coeffs[grid.freq_index(0)] = 1.0
        assert_allclose(to_real(SpectralField(grid, coeffs)).values, 1.0)

    def test_half_pair_gives_cosine(self):
        grid = CircleGrid(32)
        coeffs = np.zeros(32, dtype=complex)
        coeffs[grid.freq_index(1)] = 0.5
        coeffs[grid.freq_index(-1)] = 0.5
        out = to_real(SpectralField(grid, coeffs))
        assert_allclose(out.values, np.cos(2 * np.pi * grid.thetas), atol=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_round_trip_identity(self, seed):
        grid = CircleGrid(256)
        rng = np.random.default_rng(seed)
        f = RealField(grid, rng.normal(size=256))
        back = to_real(to_spectral(f))
        assert np.max(np.abs(back.values - f.values)) < 1e-12

    def test_rejects_asymmetric_spectrum(self):
        grid = CircleGrid(16)
        coeffs = np.zeros(16, dtype=complex)
        coeffs[grid.freq_index(1)] = 1.0  # no conjugate partner
        with pytest.raises(NonSymmetricSpectrum):
            to_real(SpectralField(grid, coeffs))


class TestShift:
    def test_zero_shift_is_identity(self):
        grid = CircleGrid(16)
        f = cosine_field(grid, 2)
        assert_allclose(shift(f, 0).values, f.values)

    def test_shift_inverts(self):
        grid = CircleGrid(64)
        rng = np.random.default_rng(3)
        f = RealField(grid, rng.normal(size=64))
        assert_allclose(shift(shift(f, 11), -11).values, f.values)

    def test_shift_is_exact_permutation(self):
        grid = CircleGrid(16)
        f = RealField(grid, np.arange(16.0))
        out = shift(f, 3)
        # output(j) = f((j - 3) mod N)
        assert out.values[3] == f.values[0]
        assert out.values[0] == f.values[13]

    def test_shift_theorem_against_brute_force(self):
        grid = CircleGrid(64)
        rng = np.random.default_rng(5)
        f = RealField(grid, rng.normal(size=64))
        m = 5
        shifted = brute_force_transform(shift(f, m).values)
        base = brute_force_transform(f.values)
        for k in grid.frequencies:
            phase = np.exp(-2j * np.pi * k * m / 64)
            assert abs(shifted[int(k)] - phase * base[int(k)]) < 1e-12
        # and the FFT path agrees with the same identity
        spec_shifted = to_spectral(shift(f, m))
        spec = to_spectral(f)
        for k in grid.frequencies:
            phase = np.exp(-2j * np.pi * int(k) * m / 64)
            assert abs(spec_shifted.coeff(int(k)) - phase * spec.coeff(int(k))) < 1e-12


class TestInnerProduct:
    def test_cosine_has_half_energy(self):
        for n in (8, 64, 256):
            grid = CircleGrid(n)
            f = cosine_field(grid, 1)
            assert abs(inner_product(f, f) - 0.5) < 1e-12

    def test_unit_circumference(self):
        grid = CircleGrid(32)
        one = RealField(grid, np.ones(32))
        assert abs(inner_product(one, one) - 1.0) < 1e-12

    def test_grid_mismatch_rejected(self):
        f = cosine_field(CircleGrid(16), 1)
        g = cosine_field(CircleGrid(32), 1)
        with pytest.raises(GridMismatch):
            inner_product(f, g)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_parseval(self, seed):
        # sum_k |f_hat(k)|^2 == (1/N) sum_j f_j^2 under this normalization
        grid = CircleGrid(128)
        rng = np.random.default_rng(seed)
        f = RealField(grid, rng.normal(size=128))
        g = RealField(grid, rng.normal(size=128))
        spectral_energy = float(np.sum(np.abs(to_spectral(f).coeffs) ** 2))
        sample_energy = float(np.mean(f.values**2))
        assert abs(spectral_energy - sample_energy) < 1e-12
        # same identity for the cross inner product
        cross = complex(np.sum(to_spectral(f).coeffs * np.conj(to_spectral(g).coeffs)))
        assert abs(cross - inner_product(f, g)) < 1e-12
