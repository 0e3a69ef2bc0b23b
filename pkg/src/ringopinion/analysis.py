"""Spectral analysis of the linearized dynamics and bifurcation sweeps.

At the neutral state z = 0 the coupling linearizes to a circular
convolution, so the Fourier modes diagonalize the dynamics and every mode k
evolves independently with rate

    lambda_k = (-1 + alpha * W_hat(k)) / tau.

The first instability appears on the peak modes +/-k_max when alpha crosses
alpha_star = 1 / W_hat(k_max). Below that point the steady response to a
constant input is channel-by-channel multiplication by a spatial gain that
blows up on the peak modes as alpha approaches alpha_star.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .errors import (MatchFailure, NewtonDivergence, NonPositivePeak,
                     PoleEvaluation, UnstableLinearization)
from .dynamics import (ModelParams, SimConfig, count_peaks, integrate,
                       saturation, saturation_slope)
from .grid import RealField, norm as field_norm, to_spectral

EIGEN_MATCH_TOL = 1e-8
EQUILIBRIUM_TOL = 1e-9
STABILITY_MARGIN = 1e-6
# amplitudes below this are degenerate remnants of the neutral branch; near
# the critical attention Newton accepts such ghosts because the residual is
# cubic in the amplitude there
ZERO_BRANCH_TOL = 1e-3


@dataclass(frozen=True)
class SpectrumReport:
    """Closed-form spectrum of the linearization at the neutral state."""

    eigenvalues: dict[int, float]
    k_max: int
    alpha_star: float
    leading_eigenvalue: float


def eigenvalues(params: ModelParams) -> SpectrumReport:
    """Closed-form eigenvalue of every representable mode.

    Raises NonPositivePeak when the peak coefficient is not positive, in
    which case no attention increase can destabilize the neutral state and
    the critical attention is undefined.
    """
    kern = params.kernel
    peak = kern.peak_coefficient()
    if peak <= 0:
        raise NonPositivePeak(
            f"W_hat(k_max) = {peak:.6g} <= 0; no bifurcation in alpha"
        )
    lams = {
        int(k): (-1.0 + params.alpha * kern.coeff(int(k))) / params.tau
        for k in kern.grid.frequencies
    }
    return SpectrumReport(
        eigenvalues=lams,
        k_max=kern.k_max,
        alpha_star=1.0 / peak,
        leading_eigenvalue=lams[kern.k_max],
    )


def coupling_matrix(params: ModelParams) -> np.ndarray:
    """Dense circulant quadrature of the kernel: C[j, l] = W((j - l)/N) / N."""
    n = params.grid.n_points
    w = params.kernel.real_space.values
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return w[idx] / n


def jacobian_at(z_values: np.ndarray, params: ModelParams) -> np.ndarray:
    """Dense Jacobian of the dynamics at state z."""
    n = params.grid.n_points
    slope = saturation_slope(z_values, params.xi)
    jac = params.alpha * coupling_matrix(params) * slope[None, :]
    jac[np.diag_indices(n)] -= 1.0
    return jac / params.tau


def numerical_jacobian_spectrum(params: ModelParams) -> dict[int, float]:
    """Cross-check of the closed-form spectrum by dense eigendecomposition.

    Assembles the Jacobian at the neutral state, solves the dense eigenvalue
    problem, and pairs the results with the closed-form values (both sorted;
    the spectrum is real for even kernels). Raises MatchFailure if any pair
    is farther apart than 1e-8.
    """
    jac = jacobian_at(np.zeros(params.grid.n_points), params)
    numeric = np.linalg.eigvals(jac)
    closed = eigenvalues(params).eigenvalues
    order = sorted(closed, key=lambda k: (closed[k], k))
    numeric_sorted = numeric[np.argsort(numeric.real)]
    matched: dict[int, float] = {}
    worst = 0.0
    for k, lam in zip(order, numeric_sorted):
        dist = abs(lam - closed[k])
        worst = max(worst, dist)
        if dist > EIGEN_MATCH_TOL:
            raise MatchFailure(
                f"eigenvalue {lam:.12g} is {dist:.3e} from closed-form "
                f"lambda_{k} = {closed[k]:.12g}"
            )
        matched[k] = float(lam.real)
    return matched


def transfer_function(params: ModelParams, k: int, s: complex) -> complex:
    """Temporal transfer function of mode k: 1 / (s - lambda_k)."""
    lam = eigenvalues(params).eigenvalues[int(k)]
    if abs(s - lam) < 1e-14:
        raise PoleEvaluation(f"s = {s} is at the pole lambda_{k} = {lam}")
    return 1.0 / (complex(s) - lam)


def spatial_transfer_profile(params: ModelParams) -> dict[int, float]:
    """Steady-state spatial gain tau / (1 - alpha * W_hat(k)) per mode.

    Only defined while every mode is stable (alpha below the critical
    attention); the profile peaks at +/-k_max and diverges there as alpha
    approaches the critical value.
    """
    report = eigenvalues(params)
    if params.alpha >= report.alpha_star:
        raise UnstableLinearization(
            f"alpha = {params.alpha} >= alpha_star = {report.alpha_star}"
        )
    kern = params.kernel
    return {
        int(k): params.tau / (1.0 - params.alpha * kern.coeff(int(k)))
        for k in kern.grid.frequencies
    }


def alignment(u: RealField, k_max: int) -> complex:
    """Component of the input on the leading mode: u_hat(k_max)."""
    return to_spectral(u).coeff(k_max)


@dataclass(frozen=True)
class BranchPoint:
    alpha: float
    norm: float
    stable: bool
    n_peaks: int
    classification: str = "stable"  # stable | unstable | marginal


@dataclass(frozen=True)
class BifurcationDiagram:
    alphas: np.ndarray = dc_field(repr=False)
    branches: list[BranchPoint] = dc_field(repr=False)
    fold_alpha: float | None


def newton_refine(z_guess: np.ndarray, params: ModelParams,
                  tol: float = 1e-12, max_iter: int = 60) -> np.ndarray:
    """Damped Newton iteration on the equilibrium equation -z + alpha W conv S(z) = 0."""
    coupling = coupling_matrix(params)
    z = z_guess.astype(float).copy()

    def residual(state: np.ndarray) -> np.ndarray:
        return -state + params.alpha * coupling @ saturation(state, params.xi)

    g = residual(z)
    gnorm = float(np.max(np.abs(g)))
    n = len(z)
    for _ in range(max_iter):
        if gnorm < tol:
            return z
        jac = params.alpha * coupling * saturation_slope(z, params.xi)[None, :]
        jac[np.diag_indices(n)] -= 1.0
        try:
            step = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence(f"singular Jacobian: {exc}") from exc
        damping = 1.0
        accepted = False
        for _ in range(30):
            cand = z + damping * step
            g_cand = residual(cand)
            g_cand_norm = float(np.max(np.abs(g_cand)))
            if np.all(np.isfinite(g_cand)) and g_cand_norm < gnorm:
                accepted = True
                break
            damping *= 0.5
        if not accepted:
            raise NewtonDivergence(f"no descent direction at residual {gnorm:.3e}")
        z, g, gnorm = cand, g_cand, g_cand_norm
    if gnorm < tol:
        return z
    raise NewtonDivergence(f"residual stalled at {gnorm:.3e} > {tol:.0e}")


def classify_stability(z_values: np.ndarray, params: ModelParams) -> str:
    """Stability of an equilibrium from the Jacobian spectrum.

    Patterned equilibria carry a rotation mode whose eigenvalue sits at the
    numerical zero (the pattern can be shifted as a whole); that single mode
    is discounted before applying the sign test, otherwise every pattern
    would be flagged marginal.
    """
    lams = np.linalg.eigvals(jacobian_at(z_values, params))
    real = np.sort(lams.real)[::-1]
    nonuniform = float(np.max(z_values) - np.min(z_values)) > 1e-8
    if nonuniform:
        nearest = int(np.argmin(np.abs(real)))
        if abs(real[nearest]) < STABILITY_MARGIN:
            real = np.delete(real, nearest)
    top = real[0]
    if top < -STABILITY_MARGIN:
        return "stable"
    if top > STABILITY_MARGIN:
        return "unstable"
    return "marginal"


def _canonicalize(z: np.ndarray) -> np.ndarray:
    """Rotate the sample with the largest value to index 0."""
    return np.roll(z, -int(np.argmax(z)))


def _is_new(z: np.ndarray, known: list[np.ndarray], tol: float = 1e-6) -> bool:
    """True when z differs from every known state modulo rotation.

    The candidate is re-aligned to each known state by the cross-correlation
    peak before comparing; argmax canonicalization alone can disagree by a
    sample between two copies of the same smooth pattern.
    """
    if not known:
        return True
    z_hat = np.fft.fft(z)
    for other in known:
        corr = np.fft.ifft(z_hat * np.conj(np.fft.fft(other))).real
        best = np.roll(z, -int(np.argmax(corr)))
        if float(np.max(np.abs(best - other))) <= tol:
            return False
    return True


def _equilibria_for_alpha(alpha: float, params_template: ModelParams,
                          seeds: Sequence[RealField], cfg: SimConfig) -> list[BranchPoint]:
    params = ModelParams(tau=params_template.tau, alpha=alpha,
                         xi=params_template.xi, kernel=params_template.kernel)
    grid = params.grid
    coupling = coupling_matrix(params)
    points: list[BranchPoint] = []
    found: list[np.ndarray] = []

    def record(z_canon: np.ndarray):
        residual = -z_canon + params.alpha * coupling @ saturation(z_canon, params.xi)
        if float(np.max(np.abs(residual))) / params.tau >= EQUILIBRIUM_TOL:
            return  # not an equilibrium to recording precision
        found.append(z_canon)
        f = RealField(grid, z_canon)
        cls = classify_stability(z_canon, params)
        points.append(BranchPoint(
            alpha=alpha, norm=field_norm(f), stable=cls == "stable",
            n_peaks=count_peaks(f, 0.5), classification=cls,
        ))

    # the neutral state is always an equilibrium
    record(np.zeros(grid.n_points))

    for seed in seeds:
        try:
            settled = integrate(seed, None, params, cfg).final_state.values
            z = newton_refine(settled, params)
        except NewtonDivergence:
            continue
        z = _canonicalize(z)
        if float(np.max(np.abs(z))) < ZERO_BRANCH_TOL:
            continue  # fell back to (or stalled inside) the neutral branch
        if _is_new(z, found):
            record(z)

    # best-effort probe for the unstable branch between two stable states:
    # Newton from scaled-down copies of each stable pattern
    stable_patterns = [z for z, pt in zip(found, points)
                       if pt.stable and pt.norm > 0]
    for pattern in stable_patterns:
        for scale in (0.15, 0.3, 0.5, 0.7):
            try:
                z = newton_refine(scale * pattern, params)
            except NewtonDivergence:
                continue
            z = _canonicalize(z)
            if float(np.max(np.abs(z))) < ZERO_BRANCH_TOL:
                continue
            if _is_new(z, found):
                record(z)
    return points


def sweep_bifurcation(params_template: ModelParams, alpha_range: Sequence[float],
                      seeds: Sequence[RealField], cfg: SimConfig | None = None,
                      threads: int = 1) -> BifurcationDiagram:
    """Multistart equilibrium sweep over the attention parameter.

    For each alpha, every seed is integrated toward the attractor it falls
    into and the result is polished by Newton; equilibria are deduplicated
    modulo rotation (peak rotated to index 0) and classified by the Jacobian
    spectrum. fold_alpha is the smallest alpha at which a patterned stable
    equilibrium coexists with the stable neutral state, if any.
    """
    if cfg is None:
        tau = params_template.tau
        cfg = SimConfig(dt=0.01 * tau, t_final=60.0 * tau, steady_tol=1e-9,
                        record_stride=10_000_000)
    alphas = sorted(float(a) for a in alpha_range)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_alpha = list(pool.map(
                lambda a: _equilibria_for_alpha(a, params_template, seeds, cfg),
                alphas,
            ))
    else:
        per_alpha = [_equilibria_for_alpha(a, params_template, seeds, cfg)
                     for a in alphas]

    branches: list[BranchPoint] = []
    fold_alpha: float | None = None
    for alpha, points in zip(alphas, per_alpha):
        branches.extend(points)
        zero_stable = any(pt.norm == 0 and pt.stable for pt in points)
        patterned_stable = any(pt.norm > 0 and pt.stable for pt in points)
        if zero_stable and patterned_stable and fold_alpha is None:
            fold_alpha = alpha
    return BifurcationDiagram(alphas=np.array(alphas), branches=branches,
                              fold_alpha=fold_alpha)
