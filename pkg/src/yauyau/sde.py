"""Euler-Maruyama simulation of the signal-observation system.

The state advances on the fine grid (step dt); the cumulative observation
integral is advanced alongside and recorded at the coarse grid (step dtau),
so observations are available exactly where the filter consumes them.

RNG: numpy's PCG64 via ``default_rng``.  A run seeded with ``seed`` spawns
two independent child streams from ``SeedSequence(seed)``: child 0 drives
the observation noise, child 1 the state noise.  Cross-language
reimplementations will not reproduce these streams bit-for-bit; the layout
is documented so that divergence can be attributed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import SimulationError
from .expr import ModelSpec, compile_ast


@dataclass(frozen=True)
class TimeGrid:
    """Nested time discretization: dtau = nt * dt, T = ntau * dtau."""

    total_time: float
    dt: float
    dtau: float
    nt: int
    ntau: int

    @property
    def total_fine_steps(self) -> int:
        return self.nt * self.ntau

    def __post_init__(self):
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if self.nt < 1 or self.ntau < 1:
            raise ValueError("step counts must be positive")

    @classmethod
    def from_steps(cls, total_time: float, dt: float, dtau: float) -> "TimeGrid":
        """Build from (T, dt, dtau), checking the nesting is integral.

        dtau is re-derived as nt*dt so the nesting holds exactly in floating
        point even when the given dtau (e.g. 0.005) is not representable as
        an exact multiple of dt.
        """
        if dt <= 0 or dtau <= 0 or total_time <= 0:
            raise ValueError("T, dt, dtau must all be positive")
        nt = round(dtau / dt)
        if nt < 1 or abs(nt * dt - dtau) > 1e-9 * max(dtau, dt):
            raise ValueError(f"dtau={dtau} is not an integer multiple of dt={dt}")
        ntau = round(total_time / dtau)
        if ntau < 1 or abs(ntau * dtau - total_time) > 1e-9 * max(total_time, dtau):
            raise ValueError(f"T={total_time} is not an integer multiple of dtau={dtau}")
        return cls(total_time=total_time, dt=dt, dtau=nt * dt, nt=nt, ntau=ntau)

    def fine_times(self) -> np.ndarray:
        return self.dt * np.arange(self.total_fine_steps + 1)

    def coarse_times(self) -> np.ndarray:
        return self.dtau * np.arange(self.ntau + 1)


@dataclass(frozen=True)
class SimulatedPaths:
    """A state path on the fine grid and an observation path on the coarse grid."""

    states: np.ndarray        # (nt*ntau + 1, dim)
    observations: np.ndarray  # (ntau + 1, obs_dim), row 0 all zeros

    def coarse_states(self, tg: TimeGrid) -> np.ndarray:
        """Truth subsampled at observation times (ntau+1 rows)."""
        return self.states[:: tg.nt].copy()


def simulate_paths(
    model: ModelSpec,
    tg: TimeGrid,
    x0=None,
    seed: int = 0,
    *,
    state_noise: float = 1.0,
    obs_noise: float = 1.0,
    obs_seed=None,
) -> SimulatedPaths:
    """Simulate one realization of the state and observation processes.

    x_{n+1} = x_n + f(x_n) dt + sqrt(dt) xi_n       (xi ~ N(0, I_D))
    z_{n+1} = z_n + h(x_n) dt + sqrt(dt) eta_n      (eta ~ N(0, I_M), z_0 = 0)

    with the observation path recorded as z at every nt-th fine index.
    ``state_noise``/``obs_noise`` scale the noise standard deviation (0
    gives deterministic dynamics; used by tests).  ``obs_seed`` reseeds the
    observation substream only; the state path is unaffected by it.
    A non-finite drift or observation value aborts with the failing step.
    """
    dim, obs_dim = model.dim, model.obs_dim
    if x0 is None:
        x0 = np.zeros(dim)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (dim,):
        raise ValueError(f"x0 must have shape ({dim},)")
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")

    children = np.random.SeedSequence(seed).spawn(2)
    obs_rng = np.random.default_rng(children[0] if obs_seed is None else obs_seed)
    state_rng = np.random.default_rng(children[1])

    n_steps = tg.total_fine_steps
    dt = tg.dt
    sqrt_dt = np.sqrt(dt)

    xi = state_rng.standard_normal((n_steps, dim))
    eta = obs_rng.standard_normal((n_steps, obs_dim))

    f_fns = [compile_ast(a) for a in model.drift]
    h_fns = [compile_ast(a) for a in model.observation]

    states = np.empty((n_steps + 1, dim))
    observations = np.zeros((tg.ntau + 1, obs_dim))
    states[0] = x0
    x = x0.copy()
    z = np.zeros(obs_dim)

    with np.errstate(all="ignore"):
        for n in range(n_steps):
            fx = np.array([fn(x) for fn in f_fns], dtype=float)
            hx = np.array([fn(x) for fn in h_fns], dtype=float)
            if not np.all(np.isfinite(fx)):
                raise SimulationError(
                    f"non-finite drift value at fine step {n} (t={n * dt:.6g})",
                    step=n, time=n * dt,
                )
            if not np.all(np.isfinite(hx)):
                raise SimulationError(
                    f"non-finite observation value at fine step {n} (t={n * dt:.6g})",
                    step=n, time=n * dt,
                )
            x = x + fx * dt + (sqrt_dt * state_noise) * xi[n]
            z = z + hx * dt + (sqrt_dt * obs_noise) * eta[n]
            states[n + 1] = x
            if (n + 1) % tg.nt == 0:
                observations[(n + 1) // tg.nt] = z

    if not np.all(np.isfinite(states)):
        bad = int(np.argwhere(~np.isfinite(states).all(axis=1))[0][0])
        raise SimulationError(f"non-finite state at fine step {bad}", step=bad)
    return SimulatedPaths(states=states, observations=observations)


def observation_increments(observations: np.ndarray) -> np.ndarray:
    """Row k = y(tau_{k+1}) - y(tau_k); summing rows telescopes to y(T) exactly."""
    obs = np.asarray(observations, dtype=float)
    if obs.ndim != 2 or obs.shape[0] < 1:
        raise ValueError("observation path must be a 2-D array with at least one row")
    return np.diff(obs, axis=0)


def write_states_csv(path, states: np.ndarray, tg: TimeGrid) -> None:
    """Columns: t, x1..xD."""
    states = np.asarray(states)
    header = ["t"] + [f"x{d + 1}" for d in range(states.shape[1])]
    _write_csv(path, header, tg.fine_times(), states)


def write_observations_csv(path, observations: np.ndarray, tg: TimeGrid) -> None:
    """Columns: tau, y1..yM."""
    observations = np.asarray(observations)
    header = ["tau"] + [f"y{j + 1}" for j in range(observations.shape[1])]
    _write_csv(path, header, tg.coarse_times(), observations)


def _write_csv(path, header, times, values) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, row in zip(times, values):
            w.writerow([_fmt(t)] + [_fmt(v) for v in row])


def _fmt(x) -> str:
    return format(float(x), ".17g")
