"""Opinion dynamics over a continuum of options on the circle.

A library and CLI for integrating the ring opinion model, analyzing its
linearization spectrally, designing interaction kernels from Fourier
coefficients, and running gap-selection decision scenarios.
"""

__version__ = "0.1.0"

from .grid import (CircleGrid, RealField, SpectralField, cosine_field,
                   inner_product, random_smooth_field, shift, to_real,
                   to_spectral)
from .kernel import (Kernel, ValidationReport, design_gaussian_kernel,
                     design_kernel_from_profile, validate_kernel)
from .dynamics import (ModelParams, SimConfig, SimResult, count_peaks,
                       integrate, rhs, saturation, saturation_slope)
from .analysis import (BifurcationDiagram, SpectrumReport, alignment,
                       eigenvalues, numerical_jacobian_spectrum,
                       spatial_transfer_profile, sweep_bifurcation,
                       transfer_function)
from .scenarios import (ConstantInput, Decision, Gap, PiecewiseStaticInput,
                        RampedGapsInput, ScenarioSpec, WidthRamp,
                        render_input, run_response_experiment, run_scenario)

__all__ = [
    "CircleGrid", "RealField", "SpectralField", "cosine_field",
    "inner_product", "random_smooth_field", "shift", "to_real", "to_spectral",
    "Kernel", "ValidationReport", "design_gaussian_kernel",
    "design_kernel_from_profile", "validate_kernel",
    "ModelParams", "SimConfig", "SimResult", "count_peaks", "integrate",
    "rhs", "saturation", "saturation_slope",
    "BifurcationDiagram", "SpectrumReport", "alignment", "eigenvalues",
    "numerical_jacobian_spectrum", "spatial_transfer_profile",
    "sweep_bifurcation", "transfer_function",
    "ConstantInput", "Decision", "Gap", "PiecewiseStaticInput",
    "RampedGapsInput", "ScenarioSpec", "WidthRamp", "render_input",
    "run_response_experiment", "run_scenario",
]
