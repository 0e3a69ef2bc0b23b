"""CSV and JSON readers/writers for fields, kernels, trajectories, and reports.

Floats are written with repr, the shortest decimal that reloads to the same
bits, so numeric outputs of a repeated run are byte-identical and kernel
files round-trip exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .analysis import BifurcationDiagram, SpectrumReport
from .dynamics import SimResult
from .grid import CircleGrid, RealField, SpectralField
from .kernel import Kernel, design_kernel_from_profile


def _fmt(x) -> str:
    return repr(float(x))


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def write_real_field_csv(field: RealField, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta", "value"])
        for theta, value in zip(field.grid.thetas, field.values):
            writer.writerow([_fmt(theta), _fmt(value)])


def read_real_field_csv(path, grid: CircleGrid | None = None) -> RealField:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    values = np.array([float(r["value"]) for r in rows])
    if grid is None:
        grid = CircleGrid(len(values))
    return RealField(grid, values)


def write_spectral_field_csv(field: SpectralField, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "re", "im"])
        for k, c in zip(field.grid.frequencies, field.coeffs):
            writer.writerow([int(k), _fmt(c.real), _fmt(c.imag)])


def read_spectral_field_csv(path, grid: CircleGrid | None = None) -> SpectralField:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if grid is None:
        grid = CircleGrid(len(rows))
    coeffs = np.zeros(grid.n_points, dtype=complex)
    for r in rows:
        coeffs[grid.freq_index(int(r["k"]))] = float(r["re"]) + 1j * float(r["im"])
    return SpectralField(grid, coeffs)


def write_kernel_csv(kernel: Kernel, path) -> None:
    """Non-negative frequencies only; the loader restores the even half."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "W_hat"])
        for k in range(kernel.grid.n_points // 2):
            writer.writerow([k, _fmt(kernel.coeff(k))])


def read_kernel_csv(path, grid: CircleGrid) -> Kernel:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    profile = {int(r["k"]): float(r["W_hat"]) for r in rows
               if int(r["k"]) > 0 and float(r["W_hat"]) != 0.0}
    return design_kernel_from_profile(grid, profile)


def write_trajectory_csv(result: SimResult, path) -> None:
    """Long format: one row per recorded time and grid angle."""
    thetas = result.grid.thetas
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "theta", "z"])
        for t, snap in zip(result.times, result.snapshots):
            ts = _fmt(t)
            for theta, z in zip(thetas, snap):
                writer.writerow([ts, _fmt(theta), _fmt(z)])


def spectrum_report_dict(report: SpectrumReport) -> dict:
    ks = sorted(report.eigenvalues)
    return {
        "k": ks,
        "lambda": [report.eigenvalues[k] for k in ks],
        "k_max": report.k_max,
        "alpha_star": report.alpha_star,
        "leading_eigenvalue": report.leading_eigenvalue,
    }


def diagram_dict(diagram: BifurcationDiagram) -> dict:
    return {
        "fold_alpha": diagram.fold_alpha,
        "branches": [
            {
                "alpha": b.alpha,
                "norm": b.norm,
                "stable": b.stable,
                "n_peaks": b.n_peaks,
                "classification": b.classification,
            }
            for b in diagram.branches
        ],
    }


def write_diagram_csv(diagram: BifurcationDiagram, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "norm", "stable", "n_peaks"])
        for b in diagram.branches:
            writer.writerow([_fmt(b.alpha), _fmt(b.norm),
                             str(b.stable).lower(), b.n_peaks])
