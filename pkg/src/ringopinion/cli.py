"""Config-driven command line for kernel design, analysis, and simulation.

Every command reads one JSON config (flag > file > default), writes CSV and
JSON reports plus rendered figures into the output directory, and records a
manifest with the fully resolved config so a run can be reproduced from its
own output. Repeated runs with the same config and seed produce
byte-identical numeric outputs.

Exit codes: 0 ok, 1 config error, 2 validation or model error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import copy
import dataclasses
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import eigenvalues, sweep_bifurcation
from .dynamics import ModelParams, SimConfig, integrate
from .errors import ConfigError, NumericalError, RingOpinionError, ValidationError
from .grid import CircleGrid, RealField, cosine_field, random_smooth_field
from .kernel import Kernel, design_gaussian_kernel, validate_kernel
from .scenarios import (Gap, ScenarioSpec, WidthRamp, circle_distance,
                        render_input, run_response_experiment, run_scenario)
from . import plots, serialize

COMMANDS = ("design-kernel", "spectrum", "simulate", "respond", "bifurcation",
            "scenario")

DEFAULTS: dict = {
    "grid": {"n_points": 256},
    "model": {"tau": 1.0, "alpha": 0.98, "xi": 0.7,
              "kernel": {"k_c": 1, "p": 3.0}},
    "sim": {"dt": 0.01, "t_final": 200.0, "steady_tol": 1e-8,
            "record_stride": 25},
    "seed": 0,
    "output_dir": "out",
    "figures": True,
    "simulate": {"ic": {"kind": "random_smooth", "amplitude": 2.0, "max_mode": 6}},
    "respond": {"input": {"kind": "raised_cosine", "center": 0.5, "width": 0.5,
                          "amplitude": 0.008}},
    "bifurcation": {"alpha_min": 0.85, "alpha_max": 1.05, "alpha_step": 0.01,
                    "seeds": None, "threads": 1},
    "scenario": {"gaps": [], "baseline": 0.0, "bump_shape": "raised_cosine",
                 "perturbation_seed": None, "perturbation_scale": 0.0,
                 "strong_threshold": 1.0, "amplitude_cap": 0.01},
}

_TOP_KEYS = set(DEFAULTS)
_SECTION_KEYS = {
    "grid": {"n_points"},
    "model": {"tau", "alpha", "xi", "kernel"},
    "sim": {"dt", "t_final", "steady_tol", "record_stride"},
    "simulate": {"ic"},
    "respond": {"input"},
    "bifurcation": {"alpha_min", "alpha_max", "alpha_step", "seeds", "threads"},
    "scenario": {"gaps", "baseline", "bump_shape", "perturbation_seed",
                 "perturbation_scale", "strong_threshold", "amplitude_cap"},
}
_KERNEL_KEYS = {"k_c", "p", "profile_csv"}
_GAP_KEYS = {"center", "width", "amplitude", "width_ramp"}
_RAMP_KEYS = {"t_start", "t_end", "final_width"}
_FIELD_KINDS = {
    "random_smooth": {"kind", "amplitude", "max_mode"},
    "cosine": {"kind", "frequency", "amplitude", "phase"},
    "constant": {"kind", "value"},
    "raised_cosine": {"kind", "center", "width", "amplitude"},
    "csv": {"kind", "path"},
}


def _check_keys(section: dict, allowed: set, ctx: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {ctx}: {sorted(unknown)}")


# kind-dispatched objects are replaced wholesale, never key-merged with the
# default of a different kind
_ATOMIC_PATHS = {("model", "kernel"), ("simulate", "ic"), ("respond", "input")}


def _deep_merge(base: dict, override: dict, path: tuple = ()) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        sub_path = path + (key,)
        if (isinstance(value, dict) and isinstance(merged.get(key), dict)
                and sub_path not in _ATOMIC_PATHS):
            merged[key] = _deep_merge(merged[key], value, sub_path)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    if "config" in raw and "command" in raw:  # a manifest; unwrap
        raw = raw["config"]
    return raw


def _parse_set(expr: str):
    if "=" not in expr:
        raise ConfigError(f"--set expects key=value, got {expr!r}")
    key, text = expr.split("=", 1)
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    return key.strip(), value


def _apply_set(cfg: dict, key: str, value) -> None:
    parts = key.split(".")
    node = cfg
    for part in parts[:-1]:
        nxt = node.get(part)
        if not isinstance(nxt, dict):
            nxt = {}
            node[part] = nxt
        node = nxt
    node[parts[-1]] = value


def validate_config(cfg: dict) -> None:
    _check_keys(cfg, _TOP_KEYS, "config")
    for section, allowed in _SECTION_KEYS.items():
        if section in cfg:
            if not isinstance(cfg[section], dict):
                raise ConfigError(f"section {section!r} must be an object")
            _check_keys(cfg[section], allowed, section)
    kern = cfg["model"]["kernel"]
    _check_keys(kern, _KERNEL_KEYS, "model.kernel")
    if "profile_csv" not in kern:
        n = cfg["grid"]["n_points"]
        if not isinstance(kern.get("k_c"), int) or not 1 <= kern["k_c"] < n // 2:
            raise ConfigError(
                f"model.kernel.k_c must be an integer in [1, {n // 2 - 1}]"
            )
        if not kern.get("p", 0) > 0:
            raise ConfigError("model.kernel.p must be positive")
    for spec in _field_specs(cfg):
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ConfigError(f"field spec must be an object with 'kind': {spec}")
        kind = spec["kind"]
        if kind not in _FIELD_KINDS:
            raise ConfigError(f"unknown field kind {kind!r}")
        _check_keys(spec, _FIELD_KINDS[kind], f"field spec (kind={kind})")
    for i, gap in enumerate(cfg["scenario"]["gaps"]):
        _check_keys(gap, _GAP_KEYS, f"scenario.gaps[{i}]")
        if gap.get("width_ramp") is not None:
            _check_keys(gap["width_ramp"], _RAMP_KEYS,
                        f"scenario.gaps[{i}].width_ramp")


def _field_specs(cfg: dict):
    yield cfg["simulate"]["ic"]
    yield cfg["respond"]["input"]
    seeds = cfg["bifurcation"].get("seeds")
    if seeds:
        yield from seeds


def build_grid(cfg: dict) -> CircleGrid:
    try:
        return CircleGrid(int(cfg["grid"]["n_points"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def build_kernel(cfg: dict, grid: CircleGrid) -> Kernel:
    kern = cfg["model"]["kernel"]
    if "profile_csv" in kern:
        return serialize.read_kernel_csv(kern["profile_csv"], grid)
    return design_gaussian_kernel(grid, int(kern["k_c"]), float(kern["p"]))


def build_params(cfg: dict, grid: CircleGrid) -> ModelParams:
    model = cfg["model"]
    kernel = build_kernel(cfg, grid)
    try:
        return ModelParams(tau=float(model["tau"]), alpha=float(model["alpha"]),
                           xi=float(model["xi"]), kernel=kernel)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def build_sim_config(cfg: dict) -> SimConfig:
    sim = cfg["sim"]
    return SimConfig(dt=float(sim["dt"]), t_final=float(sim["t_final"]),
                     steady_tol=float(sim["steady_tol"]),
                     record_stride=int(sim["record_stride"]))


def build_field(spec: dict, grid: CircleGrid, seed: int) -> RealField:
    kind = spec["kind"]
    if kind == "random_smooth":
        return random_smooth_field(grid, float(spec["amplitude"]), seed,
                                   int(spec.get("max_mode", 6)))
    if kind == "cosine":
        return cosine_field(grid, int(spec["frequency"]),
                            float(spec.get("amplitude", 1.0)),
                            float(spec.get("phase", 0.0)))
    if kind == "constant":
        return RealField(grid, np.full(grid.n_points, float(spec["value"])))
    if kind == "raised_cosine":
        dist = circle_distance(grid.thetas, float(spec["center"]))
        width = float(spec["width"])
        values = np.zeros(grid.n_points)
        inside = np.abs(dist) < width / 2
        values[inside] = 0.5 * float(spec["amplitude"]) * (
            1.0 + np.cos(2.0 * np.pi * dist[inside] / width)
        )
        return RealField(grid, values)
    if kind == "csv":
        return serialize.read_real_field_csv(spec["path"], grid)
    raise ConfigError(f"unknown field kind {kind!r}")


def build_scenario(cfg: dict, seed: int) -> tuple[ScenarioSpec, float]:
    sc = cfg["scenario"]
    if not sc["gaps"]:
        raise ConfigError("scenario.gaps must list at least one gap")
    gaps = []
    try:
        for g in sc["gaps"]:
            ramp = g.get("width_ramp")
            width_ramp = WidthRamp(t_start=float(ramp["t_start"]),
                                   t_end=float(ramp["t_end"]),
                                   final_width=float(ramp["final_width"])) if ramp else None
            gaps.append(Gap(center=float(g["center"]), width=float(g["width"]),
                            amplitude=float(g["amplitude"]), width_ramp=width_ramp))
        perturbation_seed = sc["perturbation_seed"]
        if perturbation_seed is None and sc["perturbation_scale"] > 0:
            perturbation_seed = seed
        spec = ScenarioSpec(gaps=tuple(gaps), baseline=float(sc["baseline"]),
                            bump_shape=sc["bump_shape"],
                            perturbation_seed=perturbation_seed,
                            perturbation_scale=float(sc["perturbation_scale"]),
                            amplitude_cap=float(sc["amplitude_cap"]))
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"bad scenario spec: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return spec, float(sc["strong_threshold"])


def write_manifest(out: Path, command: str, cfg: dict) -> None:
    manifest = {
        "command": command,
        "config": cfg,
        "seed": cfg["seed"],
        "versions": {"ringopinion": __version__, "numpy": np.__version__},
        "created": datetime.now(timezone.utc).isoformat(),
    }
    serialize.write_json(manifest, out / "manifest.json")


def cmd_design_kernel(cfg: dict, out: Path) -> int:
    grid = build_grid(cfg)
    kernel = build_kernel(cfg, grid)
    report = validate_kernel(kernel)
    serialize.write_kernel_csv(kernel, out / "kernel_spectrum.csv")
    serialize.write_real_field_csv(kernel.real_space, out / "kernel_real.csv")
    serialize.write_json({"passed": report.passed, "checks": report.checks,
                          "details": report.details}, out / "validation.json")
    if cfg["figures"]:
        plots.save_kernel_figure(kernel, out / "kernel.png")
    print(f"kernel k_max={kernel.k_max}, validation "
          f"{'passed' if report.passed else 'FAILED'}")
    return 0 if report.passed else 2


def cmd_spectrum(cfg: dict, out: Path) -> int:
    grid = build_grid(cfg)
    params = build_params(cfg, grid)
    report = eigenvalues(params)
    serialize.write_json(serialize.spectrum_report_dict(report),
                         out / "spectrum.json")
    if cfg["figures"]:
        plots.save_spectrum_figure(report, out / "spectrum.png")
    print(f"alpha_star={report.alpha_star:.6g}, "
          f"leading_eigenvalue={report.leading_eigenvalue:.6g}")
    return 0


def cmd_simulate(cfg: dict, out: Path) -> int:
    grid = build_grid(cfg)
    params = build_params(cfg, grid)
    sim_cfg = build_sim_config(cfg)
    z0 = build_field(cfg["simulate"]["ic"], grid, cfg["seed"])
    result = integrate(z0, None, params, sim_cfg)
    serialize.write_trajectory_csv(result, out / "trajectory.csv")
    serialize.write_real_field_csv(result.final_state, out / "final_state.csv")
    summary = result.summary()
    serialize.write_json(summary, out / "summary.json")
    if cfg["figures"]:
        plots.save_trajectory_figure(result, out / "heatmap.png")
        plots.save_final_state_figure(result, out / "final_state.png")
    print(f"t_end={summary['t_end']:.4g}, max_z={summary['max_z']:.6g}, "
          f"n_peaks={summary['n_peaks']}, steady={summary['reached_steady']}")
    return 0


def cmd_respond(cfg: dict, out: Path) -> int:
    grid = build_grid(cfg)
    params = build_params(cfg, grid)
    sim_cfg = build_sim_config(cfg)
    u = build_field(cfg["respond"]["input"], grid, cfg["seed"])
    result = run_response_experiment(u, params, sim_cfg)
    serialize.write_trajectory_csv(result.sim, out / "trajectory.csv")
    serialize.write_real_field_csv(result.sim.final_state, out / "final_state.csv")
    serialize.write_real_field_csv(u, out / "input.csv")
    summary = result.sim.summary()
    summary["alignment_re"] = result.alignment.real
    summary["alignment_im"] = result.alignment.imag
    summary["amplification"] = result.amplification
    summary["max_u"] = float(np.max(u.values))
    serialize.write_json(summary, out / "summary.json")
    if cfg["figures"]:
        plots.save_trajectory_figure(result.sim, out / "heatmap.png")
        plots.save_final_state_figure(result.sim, out / "response.png", input_field=u)
    print(f"alignment={result.alignment:.4g}, "
          f"amplification={result.amplification:.4g}, "
          f"n_peaks={summary['n_peaks']}")
    return 0


def cmd_bifurcation(cfg: dict, out: Path) -> int:
    grid = build_grid(cfg)
    params = build_params(cfg, grid)
    bc = cfg["bifurcation"]
    step = float(bc["alpha_step"])
    if step <= 0:
        raise ConfigError("bifurcation.alpha_step must be positive")
    alphas = np.arange(float(bc["alpha_min"]), float(bc["alpha_max"]) + step / 2,
                       step)
    seed_specs = bc["seeds"] or [
        {"kind": "cosine", "frequency": params.kernel.k_max, "amplitude": 2.0},
        {"kind": "random_smooth", "amplitude": 0.001},
    ]
    seeds = [build_field(spec, grid, cfg["seed"] + i)
             for i, spec in enumerate(seed_specs)]
    sweep_cfg = dataclasses.replace(build_sim_config(cfg),
                                    record_stride=10**9)
    diagram = sweep_bifurcation(params, alphas, seeds, cfg=sweep_cfg,
                                threads=int(bc["threads"] or 1))
    serialize.write_diagram_csv(diagram, out / "diagram.csv")
    serialize.write_json(serialize.diagram_dict(diagram), out / "diagram.json")
    if cfg["figures"]:
        plots.save_diagram_figure(diagram, out / "diagram.png")
    fold = diagram.fold_alpha
    print(f"{len(diagram.branches)} branch points, "
          f"fold_alpha={'none' if fold is None else f'{fold:.4g}'}")
    return 0


def cmd_scenario(cfg: dict, out: Path) -> int:
    grid = build_grid(cfg)
    params = build_params(cfg, grid)
    sim_cfg = build_sim_config(cfg)
    spec, strong_threshold = build_scenario(cfg, cfg["seed"])
    result = run_scenario(spec, params, sim_cfg, strong_threshold)
    serialize.write_trajectory_csv(result.sim, out / "trajectory.csv")
    serialize.write_real_field_csv(result.sim.final_state, out / "final_state.csv")
    serialize.write_json(result.decision.to_dict(), out / "decisions.json")
    serialize.write_json(result.sim.summary(), out / "summary.json")
    if cfg["figures"]:
        inputs = np.array([render_input(spec, grid, float(t)).values
                           for t in result.sim.times])
        plots.save_trajectory_figure(result.sim, out / "scenario.png",
                                     input_snapshots=inputs)
    d = result.decision
    print(f"chosen_gap={d.chosen_gap}, opinion_max={d.opinion_max:.4g}, "
          f"decision_time={d.decision_time}, switched={d.switched}")
    return 0


_DISPATCH = {
    "design-kernel": cmd_design_kernel,
    "spectrum": cmd_spectrum,
    "simulate": cmd_simulate,
    "respond": cmd_respond,
    "bifurcation": cmd_bifurcation,
    "scenario": cmd_scenario,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringopinion",
        description="Opinion dynamics over a continuum of options on the circle",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} report")
        p.add_argument("--config", help="JSON config file (or a manifest.json)")
        p.add_argument("--out", help="output directory (default from config)")
        p.add_argument("--seed", type=int, help="seed override")
        p.add_argument("--threads", type=int,
                       help="worker cap for sweep batches")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="config override, repeatable (dotted keys)")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering")
    return parser


def resolve_config(args) -> dict:
    cfg = _deep_merge(DEFAULTS, load_config(args.config))
    for expr in args.set:
        key, value = _parse_set(expr)
        _apply_set(cfg, key, value)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["output_dir"] = args.out
    if args.threads is not None:
        cfg["bifurcation"]["threads"] = args.threads
    if args.no_figures:
        cfg["figures"] = False
    validate_config(cfg)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = Path(cfg["output_dir"])
        out.mkdir(parents=True, exist_ok=True)
        code = _DISPATCH[args.command](cfg, out)
        write_manifest(out, args.command, cfg)
        return code
    except ConfigError as exc:
        _emit_error(exc)
        return 1
    except ValidationError as exc:
        _emit_error(exc)
        return 2
    except NumericalError as exc:
        _emit_error(exc)
        return 3
    except RingOpinionError as exc:
        _emit_error(exc)
        return 2


def _emit_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
