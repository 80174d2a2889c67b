"""Reference filters used to benchmark the spectral filter.

These live in the main package (not the test tree) so the UI and CLI can
overlay them, but they are not part of the filtering engine's API.
"""

from __future__ import annotations

import numpy as np

from .errors import OracleError
from .expr import ModelSpec, compile_ast, differentiate, evaluate
from .sde import TimeGrid


def linear_coefficients(model: ModelSpec, tol: float = 1e-9):
    """Extract (F, H) from a model with linear f(x) = Fx and h(x) = Hx.

    Raises OracleError when any component is detectably nonlinear or affine
    (checked by sampling the symbolic Jacobian at several points).
    """
    rng = np.random.default_rng(12345)
    probes = rng.uniform(-2.0, 2.0, size=(5, model.dim))

    def row(ast, what):
        if abs(float(evaluate(ast, np.zeros(model.dim)))) > tol:
            raise OracleError(f"{what} is not linear: nonzero value at the origin")
        coeffs = np.empty(model.dim)
        for d in range(model.dim):
            dast = differentiate(ast, d + 1)
            vals = np.array([float(evaluate(dast, p)) for p in probes])
            if np.ptp(vals) > tol:
                raise OracleError(f"{what} is not linear in x{d + 1}")
            coeffs[d] = vals[0]
        return coeffs

    f_mat = np.array([row(a, f"drift component {i + 1}") for i, a in enumerate(model.drift)])
    h_mat = np.array(
        [row(a, f"observation component {j + 1}") for j, a in enumerate(model.observation)]
    )
    return f_mat, h_mat


def kalman_oracle(
    f_mat: np.ndarray,
    h_mat: np.ndarray,
    observations: np.ndarray,
    tg: TimeGrid,
    *,
    x0_mean=None,
    p0=None,
    process_noise: float = 1.0,
    return_covariances: bool = False,
):
    """Exact Kalman filter for the Euler-discretized linear system.

    The fine-step recursion x <- (I + F dt) x + noise and the accumulated
    observation increment are propagated jointly (state augmented with the
    running increment), so conditioning on each dy_k is a standard update
    with no approximation beyond the Euler scheme itself.  Returns the
    estimate path at coarse times, (ntau+1, D); with
    ``return_covariances`` also the posterior covariances (ntau+1, D, D).
    """
    f_mat = np.atleast_2d(np.asarray(f_mat, dtype=float))
    h_mat = np.atleast_2d(np.asarray(h_mat, dtype=float))
    dim = f_mat.shape[0]
    obs_dim = h_mat.shape[0]
    if f_mat.shape != (dim, dim) or h_mat.shape != (obs_dim, dim):
        raise ValueError("coefficient matrix shapes are inconsistent")
    observations = np.asarray(observations, dtype=float)
    if observations.shape != (tg.ntau + 1, obs_dim):
        raise ValueError("observation path shape does not match the time grid")

    if x0_mean is None:
        x0_mean = np.zeros(dim)
    if p0 is None:
        p0 = np.eye(dim)
    x0_mean = np.asarray(x0_mean, dtype=float).reshape(dim)
    p0 = np.atleast_2d(np.asarray(p0, dtype=float))

    dt = tg.dt
    n_aug = dim + obs_dim
    a_step = np.zeros((n_aug, n_aug))
    a_step[:dim, :dim] = np.eye(dim) + f_mat * dt
    a_step[dim:, :dim] = h_mat * dt
    a_step[dim:, dim:] = np.eye(obs_dim)
    q_step = np.zeros((n_aug, n_aug))
    q_step[:dim, :dim] = (process_noise ** 2 * dt) * np.eye(dim)
    q_step[dim:, dim:] = dt * np.eye(obs_dim)

    m = np.concatenate([x0_mean, np.zeros(obs_dim)])
    p = np.zeros((n_aug, n_aug))
    p[:dim, :dim] = p0

    dy = np.diff(observations, axis=0)
    estimates = np.empty((tg.ntau + 1, dim))
    estimates[0] = m[:dim]
    covariances = np.empty((tg.ntau + 1, dim, dim))
    covariances[0] = p0

    for k in range(1, tg.ntau + 1):
        for _ in range(tg.nt):
            m = a_step @ m
            p = a_step @ p @ a_step.T + q_step
        s = p[dim:, dim:]
        try:
            np.linalg.cholesky(s)
        except np.linalg.LinAlgError:
            raise OracleError(
                f"non-positive-definite innovation covariance at coarse step {k}"
            ) from None
        gain = np.linalg.solve(s, p[dim:, :]).T  # (n_aug, obs_dim)
        innovation = dy[k - 1] - m[dim:]
        m = m + gain @ innovation
        p = p - gain @ s @ gain.T
        p = 0.5 * (p + p.T)
        estimates[k] = m[:dim]
        covariances[k] = p[:dim, :dim]
        # reset the increment accumulator for the next interval
        m[dim:] = 0.0
        p[dim:, :] = 0.0
        p[:, dim:] = 0.0

    if return_covariances:
        return estimates, covariances
    return estimates


def kalman_oracle_for_model(
    model: ModelSpec,
    observations: np.ndarray,
    tg: TimeGrid,
    *,
    x0_mean=None,
    p0=None,
    process_noise: float = 1.0,
) -> np.ndarray:
    f_mat, h_mat = linear_coefficients(model)
    return kalman_oracle(
        f_mat, h_mat, observations, tg,
        x0_mean=x0_mean, p0=p0, process_noise=process_noise,
    )


def systematic_resample(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Systematic resampling: one uniform offset, stratified positions."""
    n = weights.size
    positions = (rng.random() + np.arange(n)) / n
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0
    return np.searchsorted(cumulative, positions)


def particle_oracle(
    model: ModelSpec,
    observations: np.ndarray,
    tg: TimeGrid,
    n_particles: int = 5000,
    seed: int = 0,
    *,
    init_mean=None,
    init_sigma: float = 1.0,
) -> np.ndarray:
    """Bootstrap particle filter over the coarse observation grid.

    Particles propagate by Euler-Maruyama over each interval (nt fine
    steps), are reweighted with exp(h . dy - |h|^2 dtau / 2) at the
    particle's end-of-interval position, and are systematically resampled
    at every coarse step.  Deterministic given the seed.
    """
    if n_particles < 100:
        raise ValueError("need at least 100 particles")
    observations = np.asarray(observations, dtype=float)
    if observations.shape != (tg.ntau + 1, model.obs_dim):
        raise ValueError("observation path shape does not match the time grid")
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])

    dim = model.dim
    if init_mean is None:
        init_mean = np.zeros(dim)
    init_mean = np.asarray(init_mean, dtype=float).reshape(dim)

    f_fns = [compile_ast(a) for a in model.drift]
    h_fns = [compile_ast(a) for a in model.observation]

    particles = init_mean + init_sigma * rng.standard_normal((n_particles, dim))
    dy = np.diff(observations, axis=0)
    dt = tg.dt
    sqrt_dt = np.sqrt(dt)

    estimates = np.empty((tg.ntau + 1, dim))
    estimates[0] = particles.mean(axis=0)

    with np.errstate(all="ignore"):
        for k in range(1, tg.ntau + 1):
            for _ in range(tg.nt):
                cols = [particles[:, d] for d in range(dim)]
                drift = np.column_stack(
                    [np.broadcast_to(fn(cols), (n_particles,)) for fn in f_fns]
                )
                particles = particles + drift * dt + sqrt_dt * rng.standard_normal(
                    (n_particles, dim)
                )
            cols = [particles[:, d] for d in range(dim)]
            h_vals = np.column_stack(
                [np.broadcast_to(fn(cols), (n_particles,)) for fn in h_fns]
            )
            logw = h_vals @ dy[k - 1] - 0.5 * (h_vals ** 2).sum(axis=1) * tg.dtau
            if not np.isfinite(logw).any():
                raise OracleError(f"particle weight degeneracy at coarse step {k}")
            logw = logw - np.nanmax(logw[np.isfinite(logw)])
            weights = np.where(np.isfinite(logw), np.exp(logw), 0.0)
            total = weights.sum()
            if total <= 0.0 or not np.isfinite(total):
                raise OracleError(f"particle weight degeneracy at coarse step {k}")
            weights /= total
            estimates[k] = weights @ particles
            particles = particles[systematic_resample(weights, rng)]

    return estimates
