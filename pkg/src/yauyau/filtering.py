"""The filter loop: propagate, update on each observation, extract estimates.

Each coarse interval (tau_{k-1}, tau_k] is handled as nt fine PDE steps
followed by the exponential observation update with the increment
dy_k = y(tau_k) - y(tau_{k-1}), then the conditional mean is recorded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DensityCollapseError, FilterCancelled, StepFailureError
from .expr import ModelSpec
from .pde import (
    DensityField,
    SpatialGrid,
    _kfe_step_values,
    build_operator,
    compute_lambda,
)
from .sde import TimeGrid, observation_increments


def normalize(u: DensityField, ds: float, dim: int) -> DensityField:
    """Scale to unit discrete mass sum(u) * ds^D = 1; idempotent."""
    mass = float(u.values.sum()) * ds ** dim
    if not np.isfinite(mass) or mass <= 0.0:
        raise DensityCollapseError(f"density collapse: discrete mass is {mass}")
    return DensityField(u.values / mass, normalized=True)


def initial_density(
    grid: SpatialGrid,
    kind: str = "gaussian",
    center=None,
    sigma: float = 1.0,
) -> DensityField:
    """Normalized starting density: flat, or an isotropic gaussian bump."""
    if kind == "uniform":
        values = np.full(grid.n_nodes, 1.0)
        return normalize(DensityField(values), grid.ds, grid.dim)
    if kind != "gaussian":
        raise ValueError(f"unknown initial density kind {kind!r}")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if center is None:
        center = np.full(grid.dim, 0.5 * (grid.nodes[0] + grid.nodes[-1]))
    center = np.broadcast_to(np.asarray(center, dtype=float), (grid.dim,))
    if np.any(center < grid.nodes[0]) or np.any(center > grid.nodes[-1]):
        raise ValueError(
            f"gaussian center {center.tolist()} lies outside the grid "
            f"[{grid.nodes[0]}, {grid.nodes[-1]}]"
        )
    sq = np.zeros(grid.shape)
    for d, coord in enumerate(grid.coordinate_arrays()):
        sq = sq + (coord - center[d]) ** 2
    values = np.exp(-sq / (2.0 * sigma ** 2)).reshape(-1)
    return normalize(DensityField(values), grid.ds, grid.dim)


def observation_update(
    u: DensityField,
    h_values: np.ndarray,
    dy: np.ndarray,
    ds: float,
    dim: int,
    obs_index: Optional[int] = None,
) -> DensityField:
    """Multiply by exp(h . dy), max-shifted against overflow, and normalize.

    h_values[i, j] = h_j at node i.  The largest exponent is subtracted
    before exponentiation so arbitrarily scaled observations cannot
    overflow; the shift cancels in the normalization.
    """
    dy = np.atleast_1d(np.asarray(dy, dtype=float))
    exponent = h_values @ dy
    exponent -= exponent.max()
    weighted = np.exp(exponent) * u.values
    try:
        return normalize(DensityField(weighted), ds, dim)
    except DensityCollapseError as exc:
        where = "" if obs_index is None else f" at observation {obs_index}"
        raise DensityCollapseError(
            f"density collapse{where}: all posterior mass underflowed",
            obs_index=obs_index,
        ) from exc


def estimate_mean(u: DensityField, grid: SpatialGrid) -> np.ndarray:
    """Conditional mean: component d is sum_i s_i[d] u_i ds^D."""
    a = u.values.reshape(grid.shape)
    out = np.empty(grid.dim)
    vol = grid.cell_volume
    for d in range(grid.dim):
        other = tuple(ax for ax in range(grid.dim) if ax != d)
        marginal = a.sum(axis=other) if other else a
        out[d] = float((grid.nodes * marginal).sum() * vol)
    return out


@dataclass
class FilterResult:
    """Estimates at coarse times plus run metadata.

    ``errors``/``rmse`` are filled only when the truth path was supplied.
    ``snapshots`` holds (coarse step k, density values) pairs retained at a
    stride for the density viewer.
    """

    estimates: np.ndarray                  # (ntau+1, dim)
    timings: dict
    grid: SpatialGrid
    tg: TimeGrid
    observations: np.ndarray
    snapshots: list = field(default_factory=list)
    truth_coarse: Optional[np.ndarray] = None
    errors: Optional[np.ndarray] = None
    rmse: Optional[float] = None


def run_filter(
    model: ModelSpec,
    tg: TimeGrid,
    grid: SpatialGrid,
    observations: np.ndarray,
    init: DensityField,
    *,
    truth: Optional[np.ndarray] = None,
    snapshot_count: int = 20,
    progress: Optional[Callable[[float], None]] = None,
    should_cancel: Optional[Callable[[], bool]] = None,
) -> FilterResult:
    """Run the full filter over an observation path.

    ``truth`` is the fine-grid state path; when given, per-step errors and
    the overall RMSE are computed against it at coarse times.  ``progress``
    is called with the completed fraction after each coarse step;
    ``should_cancel`` is polled once per coarse step and a true value
    raises FilterCancelled.
    """
    observations = np.asarray(observations, dtype=float)
    if observations.shape != (tg.ntau + 1, model.obs_dim):
        raise ValueError(
            f"observation path must have shape ({tg.ntau + 1}, {model.obs_dim})"
        )
    op = build_operator(model, grid, tg.dt)
    diffusion = compute_lambda(grid.dim, grid.ns, tg.dt, grid.ds)
    dy = observation_increments(observations)

    u = normalize(init, grid.ds, grid.dim)
    values = u.values.copy()

    estimates = np.empty((tg.ntau + 1, model.dim))
    estimates[0] = estimate_mean(u, grid)

    snapshot_at = _snapshot_steps(tg.ntau, snapshot_count)
    snapshots = [(0, values.copy())] if 0 in snapshot_at else []

    timings = {"propagation": 0.0, "update": 0.0, "estimation": 0.0}
    vol = grid.cell_volume

    for k in range(1, tg.ntau + 1):
        if should_cancel is not None and should_cancel():
            raise FilterCancelled(f"cancelled before coarse step {k}")

        t0 = time.perf_counter()
        for j in range(tg.nt):
            values = _kfe_step_values(values, op, diffusion, grid, tg.dt)
            if not np.all(np.isfinite(values)):
                raise StepFailureError(
                    f"non-finite density at coarse step {k}, fine step {j}",
                    coarse_step=k,
                    fine_step=j,
                )
        t1 = time.perf_counter()

        exponent = op.obs_values @ dy[k - 1]
        exponent -= exponent.max()
        values = np.exp(exponent) * values
        mass = float(values.sum()) * vol
        if not np.isfinite(mass) or mass <= 0.0:
            raise DensityCollapseError(
                f"density collapse at observation {k}: discrete mass is {mass}",
                obs_index=k,
            )
        values /= mass
        t2 = time.perf_counter()

        estimates[k] = estimate_mean(DensityField(values, True), grid)
        t3 = time.perf_counter()

        timings["propagation"] += t1 - t0
        timings["update"] += t2 - t1
        timings["estimation"] += t3 - t2

        if k in snapshot_at:
            snapshots.append((k, values.copy()))
        if progress is not None:
            progress(k / tg.ntau)

    result = FilterResult(
        estimates=estimates,
        timings=timings,
        grid=grid,
        tg=tg,
        observations=observations,
        snapshots=snapshots,
    )
    if truth is not None:
        truth = np.asarray(truth, dtype=float)
        coarse = truth[:: tg.nt] if truth.shape[0] == tg.total_fine_steps + 1 else truth
        if coarse.shape != estimates.shape:
            raise ValueError("truth path shape does not match the estimates")
        diff = estimates - coarse
        result.truth_coarse = coarse.copy()
        result.errors = np.sqrt((diff ** 2).mean(axis=1))
        result.rmse = float(np.sqrt((diff ** 2).mean()))
    return result


def _snapshot_steps(ntau: int, count: int) -> set:
    if count <= 0:
        return set()
    keep = min(count, ntau + 1)
    return {int(round(x)) for x in np.linspace(0, ntau, keep)}
