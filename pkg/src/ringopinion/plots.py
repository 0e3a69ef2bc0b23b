"""Matplotlib renderings of the delimited outputs, one PNG per report."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import BifurcationDiagram, SpectrumReport
from .dynamics import SimResult
from .kernel import Kernel


def save_kernel_figure(kernel: Kernel, path) -> None:
    fig, (ax_real, ax_spec) = plt.subplots(1, 2, figsize=(9, 3.2))
    grid = kernel.grid
    ax_real.plot(grid.thetas, kernel.real_space.values, lw=1.5)
    ax_real.set_xlabel("theta")
    ax_real.set_ylabel("W(theta)")
    ax_real.set_title("Interaction kernel")

    freqs = grid.frequencies
    show = np.abs(freqs) <= max(10, 3 * kernel.k_max)
    ax_spec.stem(freqs[show], kernel.spectral.coeffs[show].real, basefmt="k-")
    ax_spec.set_xlabel("k")
    ax_spec.set_ylabel("W_hat(k)")
    ax_spec.set_title(f"Coefficients (k_max = {kernel.k_max})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_spectrum_figure(report: SpectrumReport, path, k_window: int = 12) -> None:
    ks = np.array(sorted(report.eigenvalues))
    lams = np.array([report.eigenvalues[int(k)] for k in ks])
    show = np.abs(ks) <= k_window
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.stem(ks[show], lams[show], basefmt="k-")
    ax.axhline(0.0, color="crimson", lw=1.0, ls="--")
    ax.set_xlabel("k")
    ax.set_ylabel("lambda_k")
    ax.set_title(f"Mode growth rates (alpha_star = {report.alpha_star:.4g})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trajectory_figure(result: SimResult, path, input_snapshots=None) -> None:
    """Space-time heatmap of the opinion field, optionally over the input."""
    n_rows = 2 if input_snapshots is not None else 1
    fig, axes = plt.subplots(n_rows, 1, figsize=(7, 3.0 * n_rows), squeeze=False)
    extent = [result.times[0], result.times[-1], 0.0, 1.0]

    ax = axes[0][0]
    im = ax.imshow(result.snapshots.T, origin="lower", aspect="auto",
                   extent=extent, cmap="viridis")
    ax.set_ylabel("theta")
    ax.set_title("Opinion z(theta, t)")
    fig.colorbar(im, ax=ax)

    if input_snapshots is not None:
        ax = axes[1][0]
        im = ax.imshow(np.asarray(input_snapshots).T, origin="lower", aspect="auto",
                       extent=extent, cmap="Blues")
        ax.set_ylabel("theta")
        ax.set_title("Input u(theta, t)")
        fig.colorbar(im, ax=ax)
    axes[-1][0].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_final_state_figure(result: SimResult, path, input_field=None) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.plot(result.grid.thetas, result.final_state.values, lw=1.5,
            label="z(theta, t_end)")
    if input_field is not None:
        ax2 = ax.twinx()
        ax2.plot(result.grid.thetas, input_field.values, lw=1.0, color="tab:orange",
                 label="u(theta)")
        ax2.set_ylabel("u")
    ax.set_xlabel("theta")
    ax.set_ylabel("z")
    ax.set_title("Steady opinion pattern")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_diagram_figure(diagram: BifurcationDiagram, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    styles = {
        "stable": dict(marker="o", color="tab:blue", label="stable"),
        "unstable": dict(marker="x", color="tab:red", label="unstable"),
        "marginal": dict(marker="s", color="tab:gray", label="marginal"),
    }
    seen = set()
    for b in diagram.branches:
        style = styles[b.classification]
        label = style["label"] if b.classification not in seen else None
        seen.add(b.classification)
        ax.scatter(b.alpha, b.norm, s=14, marker=style["marker"],
                   color=style["color"], label=label)
    if diagram.fold_alpha is not None:
        ax.axvline(diagram.fold_alpha, color="k", ls=":", lw=1.0,
                   label=f"fold at {diagram.fold_alpha:.3f}")
    ax.set_xlabel("alpha")
    ax.set_ylabel("||z||")
    ax.set_title("Equilibrium branches")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
