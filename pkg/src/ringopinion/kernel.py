"""Interaction kernels built from prescribed Fourier coefficients.

A designed kernel has real, even coefficients, zero mean, a zero Nyquist
coefficient, and a unique positive peak at +/-k_max. Those properties make
the coupling symmetric and excitatory at the dominant frequency, which is
what pins the number of maxima in the emerging opinion patterns.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping

import numpy as np

from .errors import FrequencyOutOfRange, NonFiniteProfile, TiedMaximum
from .grid import CircleGrid, RealField, SpectralField, to_real

SPECTRAL_TOL = 1e-12
TAIL_ENERGY_TOL = 1e-10


@dataclass(frozen=True)
class Kernel:
    """Interaction kernel as paired spectral and real-space samples.

    Attributes:
        grid: discretization the kernel lives on.
        spectral: coefficients W_hat(k), real and even for designed kernels.
        real_space: samples W(theta_j) = sum_k W_hat(k) exp(i 2 pi k theta_j).
        k_max: frequency of the unique largest coefficient over k > 0.
    """

    grid: CircleGrid
    spectral: SpectralField
    real_space: RealField = dc_field(repr=False)
    k_max: int

    def coeff(self, k: int) -> float:
        """Real part of W_hat(k); designed kernels are real to 1e-12."""
        return float(self.spectral.coeff(k).real)

    def peak_coefficient(self) -> float:
        return self.coeff(self.k_max)


@dataclass(frozen=True)
class ValidationReport:
    """Pass/fail record of the designed-kernel contract checks."""

    checks: dict[str, bool]
    details: dict[str, str]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _kernel_from_coeffs(grid: CircleGrid, coeffs: np.ndarray, k_max: int) -> Kernel:
    spectral = SpectralField(grid, coeffs)
    return Kernel(grid=grid, spectral=spectral, real_space=to_real(spectral),
                  k_max=k_max)


def design_gaussian_kernel(grid: CircleGrid, k_c: int, p: float) -> Kernel:
    """Kernel with W_hat(k) = exp(-(|k|/k_c - 1)^2 / p^2) on multiples of k_c.

    For k_c = 1 every nonzero frequency carries the Gaussian profile
    exp(-(|k| - 1)^2 / p^2), strictly decreasing in |k|, so k_max = 1. For
    k_c > 1 the same profile sits on the dilated lattice k_c, 2 k_c, ...,
    which is the k_c = 1 kernel compressed k_c-fold around the circle:
    patterns with k_c repeats are selected while every other wavenumber
    keeps the bare leak rate. (Placing the profile on all integers instead
    leaves the k_c-peak pattern unstable against coarsening into fewer
    bumps.) W_hat(0) and the Nyquist coefficient are zero.
    """
    n = grid.n_points
    if not 1 <= k_c < n // 2:
        raise FrequencyOutOfRange(f"k_c must satisfy 1 <= k_c < N/2 = {n // 2}, got {k_c}")
    if not (np.isfinite(p) and p > 0):
        raise ValueError(f"width parameter p must be positive, got {p}")
    freqs = grid.frequencies
    coeffs = np.where(
        np.abs(freqs) % k_c == 0,
        np.exp(-((np.abs(freqs) / k_c - 1.0) ** 2) / p**2),
        0.0,
    ).astype(complex)
    coeffs[grid.freq_index(0)] = 0.0
    coeffs[0] = 0.0  # Nyquist mode -N/2
    return _kernel_from_coeffs(grid, coeffs, k_max=k_c)


def design_kernel_from_profile(grid: CircleGrid, profile: Mapping[int, float]) -> Kernel:
    """Kernel with W_hat(+/-k) = profile[k] and every unspecified coefficient zero.

    The profile maps positive frequencies to real coefficients. It must be
    finite, contain at least one positive value, and have a unique maximizer;
    a tie would leave the dominant pattern undetermined.
    """
    n = grid.n_points
    if not profile:
        raise ValueError("profile must contain at least one frequency")
    values = np.array([profile[k] for k in sorted(profile)], dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteProfile("profile contains non-finite coefficients")
    if not np.any(values > 0):
        raise ValueError("profile needs at least one positive coefficient")
    for k in profile:
        if not 1 <= int(k) < n // 2:
            raise FrequencyOutOfRange(
                f"profile frequency {k} must satisfy 1 <= k < N/2 = {n // 2}"
            )
    peak = values.max()
    maximizers = [k for k in sorted(profile) if profile[k] == peak]
    if len(maximizers) != 1:
        raise TiedMaximum(
            f"profile maximum {peak} attained at frequencies {maximizers}"
        )
    coeffs = np.zeros(n, dtype=complex)
    for k, v in profile.items():
        coeffs[grid.freq_index(int(k))] = v
        coeffs[grid.freq_index(-int(k))] = v
    return _kernel_from_coeffs(grid, coeffs, k_max=int(maximizers[0]))


def validate_kernel(kernel: Kernel) -> ValidationReport:
    """Check the designed-kernel contract and report each result.

    Checks: even symmetry of the coefficients, realness, zero mean, a unique
    positive-frequency maximizer matching k_max, and a square-summability
    proxy (the tail |k| > N/4 holds less than 1e-10 of the spectral energy).
    """
    grid = kernel.grid
    freqs = grid.frequencies
    coeffs = kernel.spectral.coeffs
    checks: dict[str, bool] = {}
    details: dict[str, str] = {}

    # Symmetry W_hat(k) == W_hat(-k) on every paired frequency.
    half = grid.n_points // 2
    pos = np.arange(1, half)
    sym_err = float(np.max(np.abs(
        coeffs[pos + half] - coeffs[half - pos]
    ))) if half > 1 else 0.0
    checks["symmetry"] = sym_err < SPECTRAL_TOL
    details["symmetry"] = f"max |W_hat(k) - W_hat(-k)| = {sym_err:.3e}"

    real_err = float(np.max(np.abs(coeffs.imag)))
    checks["realness"] = real_err < SPECTRAL_TOL
    details["realness"] = f"max |Im W_hat(k)| = {real_err:.3e}"

    mean_coeff = abs(kernel.spectral.coeff(0))
    checks["zero_mean"] = mean_coeff < SPECTRAL_TOL
    details["zero_mean"] = f"|W_hat(0)| = {mean_coeff:.3e}"

    pos_vals = coeffs[pos + half].real if half > 1 else np.array([])
    if pos_vals.size:
        peak = pos_vals.max()
        ties = int(np.sum(pos_vals == peak))
        unique = ties == 1 and peak > 0
        k_at_peak = int(pos[np.argmax(pos_vals)])
        checks["unique_k_max"] = unique and k_at_peak == kernel.k_max
        details["unique_k_max"] = (
            f"argmax at k={k_at_peak} with {ties} tie(s), declared k_max={kernel.k_max}"
        )
    else:
        checks["unique_k_max"] = False
        details["unique_k_max"] = "no positive frequencies on this grid"

    energy = float(np.sum(np.abs(coeffs) ** 2))
    tail = float(np.sum(np.abs(coeffs[np.abs(freqs) > grid.n_points // 4]) ** 2))
    ratio = tail / energy if energy > 0 else 0.0
    checks["square_summable"] = ratio < TAIL_ENERGY_TOL
    details["square_summable"] = f"tail energy fraction = {ratio:.3e}"

    return ValidationReport(checks=checks, details=details)
