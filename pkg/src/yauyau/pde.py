"""Spatial discretization and the semi-implicit Kolmogorov-forward stepper.

Between observations the filter density evolves under

    du/dt = (1/2) Lap u - f . grad u - (div f + |h|^2 / 2) u

on a uniform tensor grid with homogeneous Dirichlet boundaries.  One fine
step splits the right-hand side:

  explicit   w = u - dt * (f . Dc u + r u)       (Dc: central differences)
  implicit   (I - dt/2 * L) u' = w               (L: discrete Laplacian)

The implicit solve is exact in the DST-I basis, which diagonalizes L under
Dirichlet conditions: the per-mode factors are precomputed once as a
SpectralDiffusion and the solve becomes forward transform, elementwise
multiply, inverse transform.

Fields are stored flat in row-major (C) order over the (Ns,)*D tensor grid:
flat = i1*Ns^(D-1) + i2*Ns^(D-2) + ... + iD with 0-based axis indices.
"""

from __future__ import annotations

import os
import struct
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.fft

from .errors import CapacityError, StabilityWarning, StepFailureError
from .expr import ModelSpec, compile_ast, divergence

DEFAULT_NODE_BUDGET = 2_000_000
NODE_BUDGET_ENV = "YAUYAU_NODE_BUDGET"

_DENSITY_MAGIC = b"YYDENS01"


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform axis-identical tensor grid of interior nodes.

    All axes share the same node sequence lo, lo+ds, ..., lo+(ns-1)*ds
    (the common hull of the requested per-axis bounds).  Dirichlet zero
    values live one spacing outside each end.
    """

    dim: int
    ns: int
    ds: float
    lo: float
    hi: float
    nodes: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple:
        return (self.ns,) * self.dim

    @property
    def n_nodes(self) -> int:
        return self.ns ** self.dim

    def flat_index(self, multi) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.shape))

    def multi_index(self, flat: int) -> tuple:
        return tuple(int(i) for i in np.unravel_index(flat, self.shape))

    def node_coordinates(self, flat: int) -> np.ndarray:
        return self.nodes[list(self.multi_index(flat))]

    def coordinate_arrays(self) -> list:
        """Per-axis coordinate arrays broadcast over the full grid shape."""
        out = []
        for d in range(self.dim):
            shape = [1] * self.dim
            shape[d] = self.ns
            out.append(self.nodes.reshape(shape))
        return out

    @property
    def cell_volume(self) -> float:
        return self.ds ** self.dim


def node_budget() -> int:
    raw = os.environ.get(NODE_BUDGET_ENV)
    if raw:
        return int(raw)
    return DEFAULT_NODE_BUDGET


def build_grid(dim: int, lo, hi, ds: float, budget: Optional[int] = None) -> SpatialGrid:
    """Build the grid over the common hull of per-axis bounds.

    Node count follows the sequence convention start, start+ds, ... up to
    the last node <= stop, i.e. ns = floor((stop-start)/ds) + 1.
    """
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    if not (ds > 0 and np.isfinite(ds)):
        raise ValueError("ds must be positive and finite")
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (dim,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (dim,))
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("bounds must be finite")
    if np.any(hi - lo < 2 * ds):
        raise ValueError("degenerate domain: need hi - lo >= 2*ds on every axis")
    start = float(lo.min())
    stop = float(hi.max())
    ns = int(np.floor((stop - start) / ds + 1e-9)) + 1
    limit = node_budget() if budget is None else budget
    if ns ** dim > limit:
        raise CapacityError(
            f"grid of {ns}^{dim} = {ns ** dim} nodes exceeds the node budget "
            f"of {limit} (override with {NODE_BUDGET_ENV})"
        )
    nodes = start + ds * np.arange(ns)
    nodes.setflags(write=False)
    return SpatialGrid(dim=dim, ns=ns, ds=ds, lo=start, hi=stop, nodes=nodes)


@dataclass
class DensityField:
    """Discrete (possibly unnormalized) density over the flattened grid."""

    values: np.ndarray
    normalized: bool = False

    def copy(self) -> "DensityField":
        return DensityField(self.values.copy(), self.normalized)

    def mass(self, grid: SpatialGrid) -> float:
        return float(self.values.sum() * grid.cell_volume)


# --- discrete sine transform (DST-I) ---------------------------------------

def dst_1d(v: np.ndarray, *, naive: bool = False) -> np.ndarray:
    """Unnormalized DST-I: S[k] = sum_j v[j] sin(jk pi/(N+1)), j,k = 1..N.

    The default path uses the FFT-based transform; ``naive=True`` evaluates
    the defining O(N^2) sum and is the correctness reference.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("input must be a 1-D array of length >= 1")
    if naive:
        n = v.size
        jk = np.arange(1, n + 1)
        return np.sin(np.outer(jk, jk) * (np.pi / (n + 1))) @ v
    return 0.5 * scipy.fft.dst(v, type=1)


def idst_1d(s: np.ndarray, *, naive: bool = False) -> np.ndarray:
    """Inverse of dst_1d; equals (2/(N+1)) * dst_1d(s)."""
    s = np.asarray(s, dtype=float)
    return (2.0 / (s.size + 1)) * dst_1d(s, naive=naive)


def dst_nd(u: DensityField, grid: SpatialGrid, inverse: bool = False) -> DensityField:
    """Apply the (inverse) DST-I along every grid axis in sequence.

    The transform is separable, so the axis order does not affect the
    result beyond roundoff.
    """
    values = np.asarray(u.values, dtype=float)
    if values.size != grid.n_nodes:
        raise ValueError(
            f"field has {values.size} values but grid has {grid.n_nodes} nodes"
        )
    out = _dst_nd_values(values.reshape(grid.shape), inverse=inverse)
    return DensityField(out.reshape(-1), normalized=False)


def _dst_nd_values(a: np.ndarray, inverse: bool) -> np.ndarray:
    n = a.shape[0]
    scale = 1.0 / (n + 1) if inverse else 0.5
    for axis in range(a.ndim):
        a = scale * scipy.fft.dst(a, type=1, axis=axis)
    return a


# --- spectral diffusion factors ---------------------------------------------

@dataclass(frozen=True)
class SpectralDiffusion:
    """Per-mode solve factors for (I - dt/2 * L) in the DST-I basis.

    factors[k1..kD] = 1 / (1 + dt/2 * sum_d (4/ds^2) sin^2(k_d pi / (2(Ns+1))))
    stored flat in the same row-major layout as DensityField values.
    """

    dim: int
    ns: int
    dt: float
    ds: float
    factors: np.ndarray = field(repr=False)


def laplacian_eigenvalues_1d(ns: int, ds: float) -> np.ndarray:
    """Eigenvalues mu_k of -(1/ds^2) tridiag(1,-2,1), k = 1..ns (ascending)."""
    k = np.arange(1, ns + 1)
    return (4.0 / ds ** 2) * np.sin(k * np.pi / (2.0 * (ns + 1))) ** 2


def compute_lambda(dim: int, ns: int, dt: float, ds: float) -> SpectralDiffusion:
    if min(dim, ns) < 1 or dt <= 0 or ds <= 0:
        raise ValueError("dim, ns, dt, ds must all be positive")
    mu = laplacian_eigenvalues_1d(ns, ds)
    total = np.zeros((ns,) * dim)
    for d in range(dim):
        shape = [1] * dim
        shape[d] = ns
        total = total + mu.reshape(shape)
    factors = 1.0 / (1.0 + 0.5 * dt * total)
    return SpectralDiffusion(dim=dim, ns=ns, dt=dt, ds=ds, factors=factors.reshape(-1))


# --- drift/reaction operator -------------------------------------------------

@dataclass(frozen=True)
class DriftReactionOperator:
    """Pointwise coefficients of the explicit (convection + reaction) part.

    drift_values[d] holds f_d on the grid, reaction_values holds
    r = div f + |h|^2 / 2, and obs_values[:, j] holds h_j (consumed by the
    observation update).  All arrays are flat in grid layout.
    """

    dim: int
    ds: float
    dt: float
    drift_values: tuple          # dim arrays, each (n_nodes,)
    reaction_values: np.ndarray  # (n_nodes,)
    obs_values: np.ndarray       # (n_nodes, obs_dim)
    drift_active: tuple          # per-axis bool: any nonzero drift there

    @property
    def n_nodes(self) -> int:
        return self.reaction_values.size


def evaluate_on_grid(ast, grid: SpatialGrid) -> np.ndarray:
    """Evaluate an expression at every grid node; flat output array."""
    coords = grid.coordinate_arrays()
    with np.errstate(all="ignore"):
        raw = compile_ast(ast)(coords)
    out = np.asarray(raw, dtype=float)
    if out.shape != grid.shape:
        out = np.broadcast_to(out, grid.shape)
    return np.ascontiguousarray(out).reshape(-1)


def _check_finite_on_grid(values: np.ndarray, grid: SpatialGrid, what: str) -> None:
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        coords = grid.node_coordinates(int(bad[0]))
        raise ValueError(
            f"non-finite field value at node {tuple(round(c, 12) for c in coords)} "
            f"while evaluating {what}"
        )


def build_operator(model: ModelSpec, grid: SpatialGrid, dt: float) -> DriftReactionOperator:
    """Precompute f_d, r = div f + |h|^2/2, and h_j at every node.

    Warns (does not abort) when dt*max|f|/ds > 1 or dt*max|r| > 1: the
    explicit part can then amplify, but aborting would make some standard
    benchmark parameter sets unrunnable.
    """
    if model.dim != grid.dim:
        raise ValueError(f"model dimension {model.dim} != grid dimension {grid.dim}")
    drift_values = []
    for d, ast in enumerate(model.drift):
        vals = evaluate_on_grid(ast, grid)
        _check_finite_on_grid(vals, grid, f"drift component {d + 1}")
        drift_values.append(vals)
    obs_cols = []
    for j, ast in enumerate(model.observation):
        vals = evaluate_on_grid(ast, grid)
        _check_finite_on_grid(vals, grid, f"observation component {j + 1}")
        obs_cols.append(vals)
    obs_values = np.stack(obs_cols, axis=1)
    div_vals = evaluate_on_grid(divergence(model.drift), grid)
    _check_finite_on_grid(div_vals, grid, "divergence of the drift")
    reaction = div_vals + 0.5 * (obs_values ** 2).sum(axis=1)

    max_f = max((float(np.abs(v).max()) for v in drift_values), default=0.0)
    max_r = float(np.abs(reaction).max()) if reaction.size else 0.0
    if dt * max_f / grid.ds > 1.0 or dt * max_r > 1.0:
        warnings.warn(
            f"explicit step may amplify: dt*max|f|/ds = {dt * max_f / grid.ds:.3g}, "
            f"dt*max|r| = {dt * max_r:.3g}",
            StabilityWarning,
            stacklevel=2,
        )
    return DriftReactionOperator(
        dim=grid.dim,
        ds=grid.ds,
        dt=dt,
        drift_values=tuple(drift_values),
        reaction_values=reaction,
        obs_values=obs_values,
        drift_active=tuple(bool(np.any(v)) for v in drift_values),
    )


# --- one fine step of the forward equation ----------------------------------

def _central_difference(a: np.ndarray, axis: int, ds: float) -> np.ndarray:
    """(u_{i+1} - u_{i-1}) / (2 ds) along one axis, zero outside the grid."""
    pad = [(0, 0)] * a.ndim
    pad[axis] = (1, 1)
    p = np.pad(a, pad)
    upper = [slice(None)] * a.ndim
    lower = [slice(None)] * a.ndim
    upper[axis] = slice(2, None)
    lower[axis] = slice(0, -2)
    return (p[tuple(upper)] - p[tuple(lower)]) / (2.0 * ds)


def _kfe_step_values(
    values: np.ndarray,
    op: DriftReactionOperator,
    diffusion: SpectralDiffusion,
    grid: SpatialGrid,
    dt: float,
) -> np.ndarray:
    a = values.reshape(grid.shape)
    expl = op.reaction_values.reshape(grid.shape) * a
    for d in range(grid.dim):
        if op.drift_active[d]:
            expl = expl + op.drift_values[d].reshape(grid.shape) * _central_difference(
                a, d, grid.ds
            )
    w = a - dt * expl
    w_hat = _dst_nd_values(w, inverse=False)
    w_hat *= diffusion.factors.reshape(grid.shape)
    return _dst_nd_values(w_hat, inverse=True).reshape(-1)


def kfe_step(
    u: DensityField,
    op: DriftReactionOperator,
    diffusion: SpectralDiffusion,
    grid: SpatialGrid,
    dt: float,
) -> DensityField:
    """Advance the density one fine step; output is unnormalized.

    Raises StepFailureError on a non-finite result (the caller knows the
    time index and decides whether to abort the run).
    """
    if diffusion.dt != dt:
        raise ValueError("spectral factors were computed for a different dt")
    if u.values.size != grid.n_nodes:
        raise ValueError("field/grid size mismatch")
    out = _kfe_step_values(np.asarray(u.values, dtype=float), op, diffusion, grid, dt)
    if not np.all(np.isfinite(out)):
        raise StepFailureError("non-finite density values after PDE step")
    return DensityField(out, normalized=False)


# --- density snapshot I/O -----------------------------------------------------

def write_density_bin(path, grid: SpatialGrid, values: np.ndarray) -> None:
    """Binary dump: magic "YYDENS01", then little-endian u32 D, u32 Ns,
    f64 ds, f64 lo, f64 hi, then Ns^D f64 values in row-major grid order."""
    values = np.asarray(values, dtype="<f8").reshape(-1)
    if values.size != grid.n_nodes:
        raise ValueError("field/grid size mismatch")
    with open(path, "wb") as fh:
        fh.write(_DENSITY_MAGIC)
        fh.write(struct.pack("<IIddd", grid.dim, grid.ns, grid.ds, grid.lo, grid.hi))
        fh.write(values.tobytes())


def read_density_bin(path):
    """Inverse of write_density_bin; returns (grid, values)."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _DENSITY_MAGIC:
            raise ValueError(f"not a density dump (magic {magic!r})")
        dim, ns, ds, lo, hi = struct.unpack("<IIddd", fh.read(32))
        values = np.frombuffer(fh.read(), dtype="<f8").copy()
    if values.size != ns ** dim:
        raise ValueError("truncated density dump")
    nodes = lo + ds * np.arange(ns)
    nodes.setflags(write=False)
    grid = SpatialGrid(dim=dim, ns=ns, ds=ds, lo=lo, hi=hi, nodes=nodes)
    return grid, values


def write_density_csv(path, grid: SpatialGrid, values: np.ndarray) -> None:
    """Node coordinates and value per row: x1..xD,u."""
    values = np.asarray(values).reshape(-1)
    coords = [c.reshape(-1) for c in np.meshgrid(*(grid.nodes,) * grid.dim, indexing="ij")]
    with open(path, "w") as fh:
        fh.write(",".join([f"x{d + 1}" for d in range(grid.dim)] + ["u"]) + "\n")
        for i in range(values.size):
            row = [format(c[i], ".17g") for c in coords] + [format(values[i], ".17g")]
            fh.write(",".join(row) + "\n")
