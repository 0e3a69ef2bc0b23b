"""Exception hierarchy.

Three families map onto the CLI exit codes: ConfigError -> 1,
ValidationError -> 2, NumericalError -> 3.
"""


class RingOpinionError(Exception):
    """Base class for all package errors."""


class ConfigError(RingOpinionError):
    """Malformed or inconsistent run configuration."""


class ValidationError(RingOpinionError):
    """Input violates a model or data contract."""


class NumericalError(RingOpinionError):
    """A numerical procedure failed to produce a usable result."""


class GridMismatch(ValidationError):
    """Fields that must share one grid live on different grids."""


class NonSymmetricSpectrum(ValidationError):
    """Spectral coefficients reconstruct to a field with non-negligible imaginary part."""


class FrequencyOutOfRange(ValidationError):
    """Requested spatial frequency is not representable on the grid."""


class TiedMaximum(ValidationError):
    """Kernel profile has no unique maximizing frequency."""


class NonFiniteProfile(ValidationError):
    """Kernel profile contains NaN or infinite coefficients."""


class NonPositivePeak(ValidationError):
    """Largest kernel coefficient is not positive; no attention-driven instability exists."""


class PoleEvaluation(ValidationError):
    """Transfer function evaluated at (or too close to) one of its poles."""


class UnstableLinearization(ValidationError):
    """Steady-state gain requested while at least one mode is unstable."""


class OverlappingGaps(ValidationError):
    """Scenario gaps overlap on the circle."""


class QuasiStaticViolation(ValidationError):
    """Input varies too fast relative to the model timescale."""


class AmbiguousReadout(ValidationError):
    """Strongest opinion lies outside every gap's angular support."""


class Diverged(NumericalError):
    """Trajectory left the trust region; bad parameters or step size."""


class MatchFailure(NumericalError):
    """Numerically computed eigenvalue has no closed-form counterpart within tolerance."""


class NewtonDivergence(NumericalError):
    """Newton refinement failed to converge to an equilibrium."""
