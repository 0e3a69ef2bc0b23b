"""Uniform discretization of the circle and the spatial Fourier transform pair.

The circle has unit circumference, so angles live in [0, 1) and the grid
points are theta_j = j/N. The forward transform carries the 1/N factor,
which makes a coefficient directly comparable to the integral
f_hat(k) = int f(theta) exp(-i 2 pi k theta) dtheta; the inverse is the
plain sum over modes. Frequencies are stored as signed integers
-N/2 .. N/2-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, NonSymmetricSpectrum

IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class CircleGrid:
    """Uniform N-point sampling of the circle of unit circumference.

    Attributes:
        n_points: Number of samples N. Must be even and >= 8 so that the
            paired modes +/-k up to N/2-1 and the Nyquist mode exist.
    """

    n_points: int

    def __post_init__(self):
        n = self.n_points
        if n < 8 or n % 2 != 0:
            raise ValueError(f"n_points must be even and >= 8, got {n}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.n_points

    @property
    def thetas(self) -> np.ndarray:
        """Sample angles theta_j = j/N in [0, 1)."""
        return np.arange(self.n_points) / self.n_points

    @property
    def frequencies(self) -> np.ndarray:
        """Signed integer frequencies in storage order -N/2 .. N/2-1."""
        half = self.n_points // 2
        return np.arange(-half, half)

    def freq_index(self, k: int) -> int:
        """Storage index of frequency k; raises on unrepresentable k."""
        half = self.n_points // 2
        if not -half <= k < half:
            raise IndexError(f"frequency {k} not representable on N={self.n_points} grid")
        return int(k) + half


def _as_readonly(values: np.ndarray, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class RealField:
    """Real-valued samples f(theta_j) of a scalar function on the grid."""

    grid: CircleGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = _as_readonly(self.values, float)
        if arr.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} samples, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("field samples must be finite")
        object.__setattr__(self, "values", arr)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of a field, indexed by signed frequency.

    coeffs[i] holds the coefficient of frequency grid.frequencies[i];
    a spectrum obtained from a real field satisfies
    coeff(-k) == conj(coeff(k)) for every paired frequency.
    """

    grid: CircleGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = _as_readonly(self.coeffs, complex)
        if arr.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} coefficients, got shape {arr.shape}"
            )
        object.__setattr__(self, "coeffs", arr)

    def coeff(self, k: int) -> complex:
        """Coefficient of integer frequency k."""
        return complex(self.coeffs[self.grid.freq_index(k)])


def to_spectral(f: RealField) -> SpectralField:
    """Forward transform: coeff(k) = (1/N) sum_j f(theta_j) exp(-i 2 pi k j / N)."""
    n = f.grid.n_points
    coeffs = np.fft.fftshift(np.fft.fft(f.values)) / n
    return SpectralField(f.grid, coeffs)


def to_real(F: SpectralField) -> RealField:
    """Inverse transform: values(j) = sum_k coeff(k) exp(i 2 pi k j / N).

    Raises NonSymmetricSpectrum when the reconstruction carries an
    imaginary residue of IMAG_RESIDUE_TOL or more in any sample.
    """
    n = F.grid.n_points
    values = np.fft.ifft(np.fft.ifftshift(F.coeffs)) * n
    residue = float(np.max(np.abs(values.imag)))
    if residue >= IMAG_RESIDUE_TOL:
        raise NonSymmetricSpectrum(
            f"imaginary residue {residue:.3e} exceeds {IMAG_RESIDUE_TOL:.0e}"
        )
    return RealField(F.grid, values.real)


def shift(f: RealField, m: int) -> RealField:
    """Rotate samples by m grid points: output(j) = f((j - m) mod N)."""
    return RealField(f.grid, np.roll(f.values, m))


def inner_product(f: RealField, g: RealField) -> float:
    """Quadrature of int f(theta) g(theta) dtheta: (1/N) sum_j f_j g_j."""
    if f.grid != g.grid:
        raise GridMismatch(
            f"fields live on different grids (N={f.grid.n_points} vs N={g.grid.n_points})"
        )
    return float(np.dot(f.values, g.values) / f.grid.n_points)


def norm(f: RealField) -> float:
    """L2 norm induced by the circle inner product."""
    return float(np.sqrt(inner_product(f, f)))


def constant_field(grid: CircleGrid, value: float) -> RealField:
    return RealField(grid, np.full(grid.n_points, float(value)))


def cosine_field(grid: CircleGrid, frequency: int, amplitude: float = 1.0,
                 phase: float = 0.0) -> RealField:
    """amplitude * cos(2 pi frequency (theta - phase))."""
    values = amplitude * np.cos(2.0 * np.pi * frequency * (grid.thetas - phase))
    return RealField(grid, values)


def random_smooth_field(grid: CircleGrid, amplitude: float, seed: int,
                        max_mode: int = 6) -> RealField:
    """Seeded band-limited random field rescaled to max |f| = amplitude.

    Every mode 1..max_mode gets a coefficient with magnitude drawn from
    [0.5, 1] and a uniform random phase, so low frequencies are always
    present regardless of seed.
    """
    rng = np.random.default_rng(seed)
    thetas = grid.thetas
    values = np.zeros(grid.n_points)
    for k in range(1, max_mode + 1):
        mag = rng.uniform(0.5, 1.0)
        phase = rng.uniform(0.0, 1.0)
        values += mag * np.cos(2.0 * np.pi * k * (thetas - phase))
    peak = np.max(np.abs(values))
    if peak > 0:
        values *= amplitude / peak
    return RealField(grid, values)
