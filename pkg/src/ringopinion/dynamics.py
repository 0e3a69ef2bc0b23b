"""Time integration of the opinion dynamics on the circle.

The state z(theta, t) relaxes with timescale tau, is driven by the input
u(theta, t), and couples to itself through the kernel applied to the
saturated field:

    tau dz/dt = -z + alpha * (W conv S(z)) + u

The convolution is evaluated spectrally each step, so it is exactly the
operation diagonalized by the analysis module. Integration is classical
fixed-step RK4 with early stopping once the dynamics settle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Union

import numpy as np

from .errors import ConfigError, Diverged, GridMismatch
from .grid import CircleGrid, RealField
from .kernel import Kernel

DIVERGENCE_GUARD = 1e6
STEADY_RUN_LENGTH = 10  # consecutive steps below steady_tol before stopping


@dataclass(frozen=True)
class ModelParams:
    """Definition of the dynamical system.

    tau: characteristic timescale (> 0).
    alpha: attention paid to option interactions (> 0); the bifurcation
        parameter.
    xi: shift of the saturating nonlinearity (>= 0); xi > 0 bends the
        saturation asymmetric and opens a bistable window below the
        bifurcation point.
    kernel: interaction kernel.
    """

    tau: float
    alpha: float
    xi: float
    kernel: Kernel

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.xi >= 0:
            raise ValueError(f"xi must be non-negative, got {self.xi}")

    @property
    def grid(self) -> CircleGrid:
        return self.kernel.grid


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    t_final: float = 200.0
    steady_tol: float = 1e-8
    record_stride: int = 25

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not self.t_final > 0:
            raise ConfigError(f"t_final must be positive, got {self.t_final}")
        if not self.steady_tol > 0:
            raise ConfigError(f"steady_tol must be positive, got {self.steady_tol}")
        if self.record_stride < 1:
            raise ConfigError(f"record_stride must be >= 1, got {self.record_stride}")


@dataclass(frozen=True)
class SimResult:
    """Recorded trajectory. snapshots[i] is the state at times[i]."""

    grid: CircleGrid
    times: np.ndarray = dc_field(repr=False)
    snapshots: np.ndarray = dc_field(repr=False)  # shape (len(times), N)
    reached_steady: bool
    final_state: RealField
    t_end: float

    def snapshot(self, i: int) -> RealField:
        return RealField(self.grid, self.snapshots[i])

    def summary(self, peak_threshold: float = 0.5) -> dict:
        return {
            "reached_steady": self.reached_steady,
            "t_end": self.t_end,
            "max_z": float(np.max(self.final_state.values)),
            "n_peaks": count_peaks(self.final_state, peak_threshold),
        }


def saturation(x, xi: float):
    """Shifted saturating nonlinearity with S(0) = 0 and S'(0) = 1.

    S(x) = (tanh(x - xi) - tanh(-xi)) / sech^2(xi). The shift xi moves the
    inflection point to x = xi, which makes S''(0) = 2 tanh(xi) > 0 for
    xi > 0 while preserving slope one at the origin.
    """
    c2 = math.cosh(xi) ** 2
    # np.tanh throughout: its odd symmetry keeps S(0) exactly zero
    return (np.tanh(np.asarray(x, dtype=float) - xi) + np.tanh(xi)) * c2


def _sech_sq(y: np.ndarray) -> np.ndarray:
    # 4 e^{-2|y|} / (1 + e^{-2|y|})^2, overflow-free for any y
    e = np.exp(-2.0 * np.abs(y))
    return 4.0 * e / (1.0 + e) ** 2


def saturation_slope(x, xi: float):
    """S'(x) = sech^2(x - xi) / sech^2(xi)."""
    c2 = math.cosh(xi) ** 2
    return _sech_sq(np.asarray(x, dtype=float) - xi) * c2


def saturation_curvature_at_zero(xi: float) -> float:
    """S''(0) = 2 tanh(xi)."""
    return 2.0 * math.tanh(xi)


def coupling_multiplier(kernel: Kernel) -> np.ndarray:
    """Spectral multiplier of the convolution, in unshifted FFT order."""
    return np.fft.ifftshift(kernel.spectral.coeffs)


def _convolve(sz: np.ndarray, multiplier: np.ndarray) -> np.ndarray:
    # ifft(fft(sz) * W_hat) realizes the (1/N)-weighted circular convolution
    return np.fft.ifft(np.fft.fft(sz) * multiplier).real


def rhs(z: RealField, u: RealField, params: ModelParams) -> RealField:
    """Instantaneous time derivative of the opinion field."""
    if z.grid != params.grid or u.grid != params.grid:
        raise GridMismatch("state, input, and kernel must share one grid")
    mult = coupling_multiplier(params.kernel)
    d = _rhs_values(z.values, u.values, params, mult)
    return RealField(params.grid, d)


def _rhs_values(z: np.ndarray, u: np.ndarray, params: ModelParams,
                multiplier: np.ndarray) -> np.ndarray:
    coupling = _convolve(saturation(z, params.xi), multiplier)
    return (-z + params.alpha * coupling + u) / params.tau


InputLike = Union[RealField, np.ndarray, Callable[[float], np.ndarray], None]


def _resolve_input(inp: InputLike, grid: CircleGrid):
    """Normalize the input to (field_at(t) -> ndarray, settled_after).

    Steady-state detection is only trusted once the input has stopped
    changing; a bare callable gives no such guarantee, so early stopping is
    disabled for it unless it advertises a `settled_after` attribute.
    """
    n = grid.n_points
    if inp is None:
        zero = np.zeros(n)
        return (lambda t: zero), 0.0
    if isinstance(inp, RealField):
        if inp.grid != grid:
            raise GridMismatch("input field lives on a different grid")
        vals = inp.values
        return (lambda t: vals), 0.0
    if isinstance(inp, np.ndarray):
        if inp.shape != (n,):
            raise GridMismatch(f"input array must have shape ({n},)")
        vals = inp.astype(float)
        return (lambda t: vals), 0.0
    if callable(inp):
        settled = getattr(inp, "settled_after", math.inf)
        field_at = getattr(inp, "field_at", None)
        if field_at is not None:
            return (lambda t: np.asarray(field_at(t), dtype=float)), settled
        return (lambda t: np.asarray(inp(t), dtype=float)), settled
    raise TypeError(f"unsupported input type {type(inp)!r}")


def integrate(z0: RealField, input, params: ModelParams, cfg: SimConfig,
              on_step: Callable[[float, np.ndarray], None] | None = None) -> SimResult:
    """Fixed-step RK4 trajectory of the opinion dynamics.

    Stops early with reached_steady=True when the sup norm of the time
    derivative stays below cfg.steady_tol for STEADY_RUN_LENGTH consecutive
    steps (and the input has settled). Snapshots are recorded every
    cfg.record_stride steps plus the final state.

    Raises Diverged when the state norm exceeds the trust guard, which with
    this saturating coupling only happens for bad parameters or step sizes.
    """
    if z0.grid != params.grid:
        raise GridMismatch("initial state and kernel must share one grid")
    if cfg.dt > params.tau / 10:
        raise ConfigError(
            f"dt = {cfg.dt} too coarse for tau = {params.tau}; need dt <= tau/10"
        )
    u_at, settled_after = _resolve_input(input, params.grid)
    mult = coupling_multiplier(params.kernel)

    dt = cfg.dt
    n_steps = int(round(cfg.t_final / dt))
    z = z0.values.copy()
    times = [0.0]
    snaps = [z.copy()]
    steady_run = 0
    reached = False
    t = 0.0

    for step in range(n_steps):
        k1 = _rhs_values(z, u_at(t), params, mult)

        if on_step is not None:
            on_step(t, z)
        if t >= settled_after:
            if float(np.max(np.abs(k1))) < cfg.steady_tol:
                steady_run += 1
                if steady_run >= STEADY_RUN_LENGTH:
                    reached = True
                    break
            else:
                steady_run = 0

        half = 0.5 * dt
        u_mid = u_at(t + half)
        k2 = _rhs_values(z + half * k1, u_mid, params, mult)
        k3 = _rhs_values(z + half * k2, u_mid, params, mult)
        k4 = _rhs_values(z + dt * k3, u_at(t + dt), params, mult)
        z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = (step + 1) * dt

        if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > DIVERGENCE_GUARD:
            raise Diverged(f"state norm exceeded {DIVERGENCE_GUARD:.0e} at t = {t:.3f}")

        if (step + 1) % cfg.record_stride == 0:
            times.append(t)
            snaps.append(z.copy())

    if times[-1] != t:
        times.append(t)
        snaps.append(z.copy())

    final = RealField(params.grid, z)
    return SimResult(grid=params.grid, times=np.array(times),
                     snapshots=np.array(snaps), reached_steady=reached,
                     final_state=final, t_end=t)


def count_peaks(f: RealField, rel_threshold: float) -> int:
    """Number of strict cyclic local maxima above rel_threshold * max f.

    Plateaus of equal samples count once; fields with a non-positive
    maximum have no peaks.
    """
    if not 0 < rel_threshold < 1:
        raise ValueError(f"rel_threshold must lie in (0, 1), got {rel_threshold}")
    v = f.values
    peak = float(np.max(v))
    if peak <= 0:
        return 0
    # collapse cyclic runs of equal values, then test each run against its
    # neighboring runs
    n = len(v)
    run_values = []
    start = 0
    while start < n and v[start] == v[(start - 1) % n]:
        start += 1
    if start == n:
        return 0  # constant field
    idx = start
    for _ in range(n):
        if not run_values or v[idx] != run_values[-1]:
            run_values.append(v[idx])
        idx = (idx + 1) % n
    m = len(run_values)
    count = 0
    for i in range(m):
        val = run_values[i]
        if val > run_values[(i - 1) % m] and val > run_values[(i + 1) % m]:
            if val > rel_threshold * peak:
                count += 1
    return count
