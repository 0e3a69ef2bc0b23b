"""Slowly varying inputs, response experiments, and gap-selection scenarios.

A scenario places positive input bumps ("gaps" a robot could cross) on its
circular visual field. The opinion dynamics amplify the bump that best
aligns with the dominant coupling mode, and the decision readout is the gap
containing the strongest steady opinion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import OverlappingGaps, QuasiStaticViolation
from .dynamics import ModelParams, SimConfig, SimResult, integrate
from .grid import CircleGrid, RealField
from .analysis import alignment

QUASI_STATIC_FRACTION = 0.1  # input rate must stay below this fraction of 1/tau
DEFAULT_STRONG_THRESHOLD = 1.0
DEFAULT_AMPLITUDE_CAP = 0.01


def circle_distance(a, b):
    """Signed distance from b to a along the circle, in [-0.5, 0.5)."""
    return (np.asarray(a) - np.asarray(b) + 0.5) % 1.0 - 0.5


@dataclass(frozen=True)
class WidthRamp:
    t_start: float
    t_end: float
    final_width: float

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("ramp must have t_end > t_start")
        if not self.final_width > 0:
            raise ValueError("final_width must be positive")


@dataclass(frozen=True)
class Gap:
    center: float
    width: float
    amplitude: float
    width_ramp: WidthRamp | None = None

    def __post_init__(self):
        if not 0 <= self.center < 1:
            raise ValueError(f"gap center must lie in [0, 1), got {self.center}")
        if not self.width > 0:
            raise ValueError("gap width must be positive")
        if not self.amplitude > 0:
            raise ValueError("gap amplitude must be positive")

    def width_at(self, t: float) -> float:
        ramp = self.width_ramp
        if ramp is None or t <= ramp.t_start:
            return self.width
        if t >= ramp.t_end:
            return ramp.final_width
        frac = (t - ramp.t_start) / (ramp.t_end - ramp.t_start)
        return self.width + frac * (ramp.final_width - self.width)

    def max_width(self) -> float:
        if self.width_ramp is None:
            return self.width
        return max(self.width, self.width_ramp.final_width)

    def contains(self, theta: float, t: float) -> bool:
        return abs(float(circle_distance(theta, self.center))) < self.width_at(t) / 2


@dataclass(frozen=True)
class ScenarioSpec:
    """Gap layout, bump shape, and optional deterministic tie-breaking noise."""

    gaps: tuple[Gap, ...]
    baseline: float = 0.0
    bump_shape: str = "raised_cosine"
    perturbation_seed: int | None = None
    perturbation_scale: float = 0.0
    amplitude_cap: float = DEFAULT_AMPLITUDE_CAP

    def __post_init__(self):
        object.__setattr__(self, "gaps", tuple(self.gaps))
        if self.bump_shape not in ("raised_cosine", "rectangular_smoothed"):
            raise ValueError(f"unknown bump shape {self.bump_shape!r}")
        if self.baseline > 0:
            raise ValueError("baseline must be <= 0")
        for gap in self.gaps:
            if gap.amplitude > self.amplitude_cap:
                raise ValueError(
                    f"gap amplitude {gap.amplitude} exceeds cap {self.amplitude_cap}"
                )
        self._check_overlap()

    def _check_overlap(self):
        gaps = self.gaps
        for i in range(len(gaps)):
            for j in range(i + 1, len(gaps)):
                dist = abs(float(circle_distance(gaps[i].center, gaps[j].center)))
                if dist < (gaps[i].max_width() + gaps[j].max_width()) / 2:
                    raise OverlappingGaps(
                        f"gaps {i} and {j} overlap (centers {dist:.4f} apart)"
                    )

    def last_ramp_end(self) -> float:
        ends = [g.width_ramp.t_end for g in self.gaps if g.width_ramp is not None]
        return max(ends) if ends else 0.0


def _bump_profile(dist: np.ndarray, width: float, shape: str) -> np.ndarray:
    """Unit-height bump over |dist| < width/2, zero outside."""
    out = np.zeros_like(dist)
    inside = np.abs(dist) < width / 2
    if shape == "raised_cosine":
        out[inside] = 0.5 * (1.0 + np.cos(2.0 * np.pi * dist[inside] / width))
    else:  # rectangular_smoothed: flat top with cosine-tapered shoulders
        taper = width / 8.0
        flat = np.abs(dist) <= width / 2 - taper
        out[flat] = 1.0
        shoulder = inside & ~flat
        edge = (np.abs(dist[shoulder]) - (width / 2 - taper)) / taper
        out[shoulder] = 0.5 * (1.0 + np.cos(np.pi * edge))
    return out


@lru_cache(maxsize=32)
def _perturbation_field(seed: int, n_points: int, scale: float) -> np.ndarray:
    rng = np.random.default_rng(seed)
    field = scale * rng.uniform(-1.0, 1.0, n_points)
    field.flags.writeable = False
    return field


def render_input(spec: ScenarioSpec, grid: CircleGrid, t: float) -> RealField:
    """Input field at time t: baseline plus smooth bumps plus optional noise.

    Each gap contributes (amplitude - baseline) times a unit bump so the
    field rises continuously from the baseline to the gap amplitude.
    """
    values = _render_values(spec, grid, t)
    return RealField(grid, values)


def _render_values(spec: ScenarioSpec, grid: CircleGrid, t: float) -> np.ndarray:
    thetas = grid.thetas
    values = np.full(grid.n_points, spec.baseline)
    for gap in spec.gaps:
        dist = circle_distance(thetas, gap.center)
        values += (gap.amplitude - spec.baseline) * _bump_profile(
            dist, gap.width_at(t), spec.bump_shape
        )
    if spec.perturbation_seed is not None and spec.perturbation_scale > 0:
        values = values + _perturbation_field(
            spec.perturbation_seed, grid.n_points, spec.perturbation_scale
        )
    return values


def _ramp_rate_bound(spec: ScenarioSpec, grid: CircleGrid) -> float:
    """Max |du/dt| over the ramps, sampled by central differences."""
    ramps = [g.width_ramp for g in spec.gaps if g.width_ramp is not None]
    if not ramps:
        return 0.0
    bound = 0.0
    for ramp in ramps:
        duration = ramp.t_end - ramp.t_start
        h = duration / 2000.0
        for t in np.linspace(ramp.t_start + h, ramp.t_end - h, 101):
            du = (_render_values(spec, grid, t + h)
                  - _render_values(spec, grid, t - h)) / (2 * h)
            bound = max(bound, float(np.max(np.abs(du))))
    return bound


@dataclass(frozen=True)
class ConstantInput:
    u: RealField
    lipschitz_bound: float = 0.0
    settled_after: float = 0.0

    def field_at(self, t: float) -> np.ndarray:
        return self.u.values

    def __call__(self, t: float) -> np.ndarray:
        return self.u.values


@dataclass(frozen=True)
class PiecewiseStaticInput:
    """Holds each stage field from its switch time onward.

    Switch instants are jumps, so no finite rate bound exists for more than
    one stage; the quasi-static contract is only asserted for ramped inputs.
    """

    stages: tuple[tuple[float, RealField], ...]

    def __post_init__(self):
        stages = tuple(sorted(self.stages, key=lambda s: s[0]))
        if not stages:
            raise ValueError("need at least one stage")
        object.__setattr__(self, "stages", stages)

    @property
    def lipschitz_bound(self) -> float:
        return math.inf if len(self.stages) > 1 else 0.0

    @property
    def settled_after(self) -> float:
        return self.stages[-1][0]

    def field_at(self, t: float) -> np.ndarray:
        current = self.stages[0][1]
        for t_switch, field in self.stages:
            if t >= t_switch:
                current = field
            else:
                break
        return current.values

    def __call__(self, t: float) -> np.ndarray:
        return self.field_at(t)


class RampedGapsInput:
    """Scenario-rendered input with a reported rate bound."""

    def __init__(self, spec: ScenarioSpec, grid: CircleGrid):
        self.spec = spec
        self.grid = grid
        self.lipschitz_bound = _ramp_rate_bound(spec, grid)
        self.settled_after = spec.last_ramp_end()

    def field_at(self, t: float) -> np.ndarray:
        return _render_values(self.spec, self.grid, t)

    def __call__(self, t: float) -> np.ndarray:
        return self.field_at(t)


class ResponseResult(NamedTuple):
    sim: SimResult
    alignment: complex
    amplification: float


def run_response_experiment(u: RealField, params: ModelParams,
                            cfg: SimConfig) -> ResponseResult:
    """Integrate from the neutral state under a constant input.

    Reports the input's component on the leading mode and the ratio of the
    steady opinion peak to the input peak.
    """
    z0 = RealField(params.grid, np.zeros(params.grid.n_points))
    sim = integrate(z0, u, params, cfg)
    align = alignment(u, params.kernel.k_max)
    u_peak = float(np.max(u.values))
    z_peak = float(np.max(sim.final_state.values))
    amplification = z_peak / u_peak if u_peak > 0 else math.nan
    return ResponseResult(sim=sim, alignment=align, amplification=amplification)


@dataclass(frozen=True)
class Decision:
    """Readout of a scenario run; chosen_gap indexes ScenarioSpec.gaps."""

    chosen_gap: int | None
    opinion_max: float
    decision_time: float | None
    switched: bool
    ambiguous: bool = False

    def to_dict(self) -> dict:
        return {
            "chosen_gap": self.chosen_gap,
            "opinion_max": self.opinion_max,
            "decision_time": self.decision_time,
            "switched": self.switched,
            "ambiguous": self.ambiguous,
        }


class ScenarioResult(NamedTuple):
    sim: SimResult
    decision: Decision


def _gap_at(spec: ScenarioSpec, theta: float, t: float) -> int | None:
    for i, gap in enumerate(spec.gaps):
        if gap.contains(theta, t):
            return i
    return None


def run_scenario(spec: ScenarioSpec, params: ModelParams, cfg: SimConfig,
                 strong_threshold: float = DEFAULT_STRONG_THRESHOLD) -> ScenarioResult:
    """Integrate a gap scenario from the neutral state and read out the decision.

    The decision time is the first instant the opinion peak exceeds the
    strong-opinion threshold; the chosen gap is the one containing the final
    argmax. The run is marked switched when the gap containing the argmax
    changes at any recorded time after the decision formed.
    """
    grid = params.grid
    signal = RampedGapsInput(spec, grid)
    limit = QUASI_STATIC_FRACTION / params.tau
    if signal.lipschitz_bound >= limit:
        raise QuasiStaticViolation(
            f"input rate bound {signal.lipschitz_bound:.4g} is not below "
            f"{QUASI_STATIC_FRACTION}/tau = {limit:.4g}"
        )

    decision_time: list[float] = []

    def watch(t: float, z: np.ndarray):
        if not decision_time and float(np.max(z)) > strong_threshold:
            decision_time.append(t)

    z0 = RealField(grid, np.zeros(grid.n_points))
    sim = integrate(z0, signal, params, cfg, on_step=watch)

    t_dec = decision_time[0] if decision_time else None
    opinion_max = float(np.max(sim.final_state.values))
    thetas = grid.thetas

    chosen: int | None = None
    ambiguous = False
    if opinion_max > strong_threshold:
        theta_star = float(thetas[int(np.argmax(sim.final_state.values))])
        chosen = _gap_at(spec, theta_star, sim.t_end)
        if chosen is None:
            ambiguous = True

    switched = False
    if t_dec is not None:
        track = []
        for t, snap in zip(sim.times, sim.snapshots):
            if t < t_dec or float(np.max(snap)) <= strong_threshold:
                continue
            g = _gap_at(spec, float(thetas[int(np.argmax(snap))]), float(t))
            if g is not None:
                track.append(g)
        switched = len(track) > 1 and any(g != track[0] for g in track)

    decision = Decision(chosen_gap=chosen, opinion_max=opinion_max,
                        decision_time=t_dec, switched=switched,
                        ambiguous=ambiguous)
    return ScenarioResult(sim=sim, decision=decision)
