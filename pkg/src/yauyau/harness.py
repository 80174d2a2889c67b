"""End-to-end experiment pipeline: simulate, grid, filter, export.

Both the CLI and the HTTP service run experiments through ``execute`` so
the two surfaces produce identical numerics for identical configs.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .config import ExperimentConfig
from .filtering import FilterResult, initial_density, run_filter
from .pde import SpatialGrid, build_grid, write_density_bin
from .sde import (
    SimulatedPaths,
    TimeGrid,
    simulate_paths,
    write_observations_csv,
    write_states_csv,
)


def rmse(estimates: np.ndarray, truth: np.ndarray) -> float:
    """Root mean square error over all steps and dimensions."""
    estimates = np.asarray(estimates, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimates.shape != truth.shape:
        raise ValueError(f"shape mismatch: {estimates.shape} vs {truth.shape}")
    return float(np.sqrt(np.mean((estimates - truth) ** 2)))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    tg: TimeGrid
    grid: SpatialGrid
    paths: SimulatedPaths
    filter_result: FilterResult
    rmse: float
    zero_rmse: float
    wall_time: float

    def summary(self) -> dict:
        fr = self.filter_result
        return {
            "preset": self.config.preset,
            "rmse": self.rmse,
            "zero_estimator_rmse": self.zero_rmse,
            "timings": dict(fr.timings),
            "wall_time": self.wall_time,
            "grid": {
                "dim": self.grid.dim,
                "ns": self.grid.ns,
                "ds": self.grid.ds,
                "lo": self.grid.lo,
                "hi": self.grid.hi,
            },
            "ntau": self.tg.ntau,
            "nt": self.tg.nt,
            "snapshot_steps": [k for k, _ in fr.snapshots],
            "config": self.config.to_dict(),
        }


def data_driven_bounds(states: np.ndarray, ds: float):
    """The simulated-path hull recipe: [min(x), max(x) + ds], shared across axes."""
    lo = float(np.min(states))
    hi = float(np.max(states)) + ds
    return lo, hi


def build_experiment_grid(cfg: ExperimentConfig, states: Optional[np.ndarray]) -> SpatialGrid:
    if cfg.bounds == "fixed":
        return build_grid(cfg.dim, cfg.lo, cfg.hi, cfg.ds)
    if states is None:
        raise ValueError("data-driven bounds need a simulated state path")
    lo, hi = data_driven_bounds(states, cfg.ds)
    return build_grid(cfg.dim, lo, hi, cfg.ds)


def execute(
    cfg: ExperimentConfig,
    *,
    progress: Optional[Callable[[float], None]] = None,
    should_cancel: Optional[Callable[[], bool]] = None,
) -> ExperimentResult:
    """Run the full pipeline for one config; no files are written here."""
    cfg.validate()
    started = time.perf_counter()
    model = cfg.model()
    tg = cfg.time_grid()
    x0 = cfg.x0_vector()

    paths = simulate_paths(model, tg, x0, cfg.seed)
    grid = build_experiment_grid(cfg, paths.states)

    if cfg.init_kind == "uniform":
        init = initial_density(grid, "uniform")
    else:
        init = initial_density(grid, "gaussian", center=x0, sigma=cfg.init_sigma)

    fr = run_filter(
        model,
        tg,
        grid,
        paths.observations,
        init,
        truth=paths.states,
        snapshot_count=cfg.snapshot_count,
        progress=progress,
        should_cancel=should_cancel,
    )
    truth_coarse = fr.truth_coarse
    zero_rmse = rmse(np.zeros_like(truth_coarse), truth_coarse)
    return ExperimentResult(
        config=cfg,
        tg=tg,
        grid=grid,
        paths=paths,
        filter_result=fr,
        rmse=fr.rmse,
        zero_rmse=zero_rmse,
        wall_time=time.perf_counter() - started,
    )


def write_estimates_csv(path, result: FilterResult) -> None:
    """Columns: tau, x1..xD, xhat1..xhatD, err."""
    tg = result.tg
    dim = result.estimates.shape[1]
    truth = result.truth_coarse
    errors = result.errors
    if truth is None:
        truth = np.full_like(result.estimates, np.nan)
        errors = np.full(result.estimates.shape[0], np.nan)
    header = (
        ["tau"]
        + [f"x{d + 1}" for d in range(dim)]
        + [f"xhat{d + 1}" for d in range(dim)]
        + ["err"]
    )
    taus = tg.coarse_times()
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(result.estimates.shape[0]):
            row = (
                [taus[k]]
                + list(truth[k])
                + list(result.estimates[k])
                + [errors[k]]
            )
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")


def write_artifacts(result: ExperimentResult, out_dir) -> list:
    """Write the standard artifact set; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    states_path = os.path.join(out_dir, "states.csv")
    write_states_csv(states_path, result.paths.states, result.tg)
    written.append(states_path)

    obs_path = os.path.join(out_dir, "observations.csv")
    write_observations_csv(obs_path, result.paths.observations, result.tg)
    written.append(obs_path)

    est_path = os.path.join(out_dir, "estimates.csv")
    write_estimates_csv(est_path, result.filter_result)
    written.append(est_path)

    summary_path = os.path.join(out_dir, "summary.json")
    with open(summary_path, "w") as fh:
        json.dump(result.summary(), fh, indent=2)
        fh.write("\n")
    written.append(summary_path)

    for i, (_, values) in enumerate(result.filter_result.snapshots):
        snap_path = os.path.join(out_dir, f"density_{i:04d}.bin")
        write_density_bin(snap_path, result.grid, values)
        written.append(snap_path)
    return written


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """Execute a config and write artifacts to ``out_dir`` (or cfg.out_dir)."""
    result = execute(cfg)
    target = out_dir or cfg.out_dir
    if target:
        write_artifacts(result, target)
    return result
