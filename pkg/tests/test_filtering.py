"""Density normalization, observation update, estimation, and the filter loop."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yauyau.errors import DensityCollapseError, FilterCancelled
from yauyau.expr import ModelSpec
from yauyau.filtering import (
    estimate_mean,
    initial_density,
    normalize,
    observation_update,
    run_filter,
)
from yauyau.pde import DensityField, build_grid
from yauyau.sde import TimeGrid, simulate_paths


class TestNormalize:
    def test_unit_mass(self, rng):
        g = build_grid(1, -2.0, 2.0, 0.5)
        u = normalize(DensityField(rng.uniform(0.1, 1.0, g.ns)), g.ds, g.dim)
        assert abs(u.values.sum() * g.ds - 1.0) < 1e-12
        assert u.normalized

    def test_idempotent(self, rng):
        g = build_grid(1, -2.0, 2.0, 0.5)
        u1 = normalize(DensityField(rng.uniform(0.1, 1.0, g.ns)), g.ds, g.dim)
        u2 = normalize(u1, g.ds, g.dim)
        assert np.max(np.abs(u2.values - u1.values)) < 1e-15

    def test_scale_invariance(self, rng):
        g = build_grid(1, -2.0, 2.0, 0.5)
        raw = rng.uniform(0.1, 1.0, g.ns)
        a = normalize(DensityField(raw), g.ds, g.dim)
        b = normalize(DensityField(raw * 1e6), g.ds, g.dim)
        assert np.max(np.abs(a.values - b.values)) < 1e-12 * np.abs(a.values).max()

    def test_zero_mass_collapses(self):
        g = build_grid(1, -2.0, 2.0, 0.5)
        with pytest.raises(DensityCollapseError):
            normalize(DensityField(np.zeros(g.ns)), g.ds, g.dim)


class TestInitialDensity:
    def test_uniform_value(self):
        g = build_grid(1, 0.0, 1.0, 0.5)  # ns = 3
        u = initial_density(g, "uniform")
        assert np.allclose(u.values, 2.0 / 3.0)

    def test_gaussian_mirror_symmetry(self):
        g = build_grid(1, -2.0, 2.0, 0.5)
        u = initial_density(g, "gaussian", center=[0.0], sigma=0.7)
        assert np.max(np.abs(u.values - u.values[::-1])) < 1e-15

    def test_gaussian_mean_near_center(self):
        g = build_grid(1, -4.0, 4.0, 0.5)
        u = initial_density(g, "gaussian", center=[0.8], sigma=0.9)
        mean = estimate_mean(u, g)
        assert abs(mean[0] - 0.8) <= g.ds / 2

    def test_center_outside_grid_rejected(self):
        g = build_grid(1, -1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            initial_density(g, "gaussian", center=[5.0])

    def test_bad_sigma(self):
        g = build_grid(1, -1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            initial_density(g, "gaussian", center=[0.0], sigma=0.0)


class TestObservationUpdate:
    def _h_table(self, grid, fn):
        return fn(grid.nodes).reshape(-1, 1)

    def test_zero_increment_is_identity(self, rng):
        g = build_grid(1, -2.0, 2.0, 0.5)
        u = normalize(DensityField(rng.uniform(0.1, 1.0, g.ns)), g.ds, g.dim)
        h = self._h_table(g, lambda s: s ** 3)
        out = observation_update(u, h, np.array([0.0]), g.ds, g.dim)
        assert np.max(np.abs(out.values - u.values)) < 1e-14

    def test_constant_h_cancels(self, rng):
        g = build_grid(1, -2.0, 2.0, 0.5)
        u = normalize(DensityField(rng.uniform(0.1, 1.0, g.ns)), g.ds, g.dim)
        h = self._h_table(g, lambda s: np.full_like(s, 3.7))
        out = observation_update(u, h, np.array([2.5]), g.ds, g.dim)
        assert np.max(np.abs(out.values - u.values)) < 1e-12

    def test_two_node_bayes_factor(self):
        # two-node toy: nodes (0, 1), ds = 1, h(s) = s, dy = ln 2 multiplies
        # node weights by (1, 2), so the posterior ratio must be exactly 2
        nodes = np.array([0.0, 1.0])
        ds = 1.0
        u = normalize(DensityField(np.array([0.5, 0.5])), ds, 1)
        h = nodes.reshape(-1, 1)
        out = observation_update(u, h, np.array([math.log(2.0)]), ds, 1)
        assert out.values[1] / out.values[0] == pytest.approx(2.0, rel=1e-12)
        assert abs(out.values.sum() * ds - 1.0) < 1e-12

    def test_overflow_safety_extreme_scale(self):
        g = build_grid(1, -2.0, 2.0, 0.1)
        u = initial_density(g, "gaussian", center=[0.0], sigma=0.5)
        h = (100.0 * g.nodes).reshape(-1, 1)  # |h dy| up to ~700 pre-shift
        out = observation_update(u, h, np.array([3.5]), g.ds, g.dim)
        assert np.all(np.isfinite(out.values))
        assert abs(out.values.sum() * g.ds - 1.0) < 1e-12

    def test_collapse_names_observation_index(self):
        g = build_grid(1, -2.0, 2.0, 0.5)
        u = DensityField(np.zeros(g.ns))
        h = g.nodes.reshape(-1, 1)
        with pytest.raises(DensityCollapseError) as err:
            observation_update(u, h, np.array([1.0]), g.ds, g.dim, obs_index=17)
        assert err.value.obs_index == 17


class TestEstimateMean:
    def test_symmetric_density_gives_center(self):
        g = build_grid(1, -3.0, 3.0, 0.5)
        u = initial_density(g, "gaussian", center=[0.0], sigma=1.0)
        assert abs(estimate_mean(u, g)[0]) < 1e-10

    def test_point_mass_gives_node(self):
        g = build_grid(2, -1.0, 1.0, 0.5)
        values = np.zeros(g.n_nodes)
        flat = g.flat_index((3, 1))
        values[flat] = 1.0
        u = normalize(DensityField(values), g.ds, g.dim)
        mean = estimate_mean(u, g)
        assert np.allclose(mean, g.node_coordinates(flat), atol=1e-14)

    def test_discretized_gaussian_against_fine_quadrature(self):
        c, sigma = 1.2, 0.6

        def discrete_mean(ds):
            nodes = np.arange(-5.0, 8.0 + ds / 2, ds)
            w = np.exp(-((nodes - c) ** 2) / (2 * sigma ** 2))
            w /= w.sum() * ds
            return (nodes * w).sum() * ds

        g = build_grid(1, -5.0, 8.0, 0.5)
        u = initial_density(g, "gaussian", center=[c], sigma=sigma)
        mean = estimate_mean(u, g)[0]
        oracle = discrete_mean(0.05)  # 10x finer quadrature
        assert abs(mean - oracle) < 1e-3
        assert abs(mean - c) < 1e-3


def _linear_setup(total=1.0):
    model = ModelSpec.from_texts(["-0.5*x1"], ["x1"])
    tg = TimeGrid.from_steps(total, 0.001, 0.005)
    grid = build_grid(1, -5.0, 5.0, 0.1)
    return model, tg, grid


class TestRunFilter:
    def test_pure_diffusion_keeps_symmetric_mean(self):
        model = ModelSpec.from_texts(["0"], ["0"])
        tg = TimeGrid.from_steps(0.5, 0.001, 0.005)
        grid = build_grid(1, -3.0, 3.0, 0.5)
        obs = np.zeros((tg.ntau + 1, 1))
        init = initial_density(grid, "gaussian", center=[0.0], sigma=0.8)
        res = run_filter(model, tg, grid, obs, init)
        assert np.max(np.abs(res.estimates)) < grid.ds

    def test_estimates_inside_grid_box(self):
        model, tg, grid = _linear_setup()
        paths = simulate_paths(model, tg, [0.0], seed=3)
        init = initial_density(grid, "gaussian", center=[0.0], sigma=1.0)
        res = run_filter(model, tg, grid, paths.observations, init)
        assert res.estimates.min() >= grid.nodes[0]
        assert res.estimates.max() <= grid.nodes[-1]

    def test_deterministic_repeat(self):
        model, tg, grid = _linear_setup(total=0.5)
        paths = simulate_paths(model, tg, [0.0], seed=11)
        init = initial_density(grid, "gaussian", center=[0.0], sigma=1.0)
        a = run_filter(model, tg, grid, paths.observations, init)
        b = run_filter(model, tg, grid, paths.observations, init)
        assert np.array_equal(a.estimates, b.estimates)

    def test_init_scale_invariance(self):
        model, tg, grid = _linear_setup(total=0.3)
        paths = simulate_paths(model, tg, [0.0], seed=11)
        init = initial_density(grid, "gaussian", center=[0.0], sigma=1.0)
        scaled = DensityField(init.values * 1234.5)
        a = run_filter(model, tg, grid, paths.observations, init)
        b = run_filter(model, tg, grid, paths.observations, scaled)
        assert np.max(np.abs(a.estimates - b.estimates)) < 1e-10

    def test_truth_produces_errors_and_rmse(self):
        model, tg, grid = _linear_setup(total=0.5)
        paths = simulate_paths(model, tg, [0.0], seed=5)
        init = initial_density(grid, "gaussian", center=[0.0], sigma=1.0)
        res = run_filter(model, tg, grid, paths.observations, init, truth=paths.states)
        assert res.errors is not None and res.errors.shape == (tg.ntau + 1,)
        assert res.rmse == pytest.approx(float(np.sqrt((res.errors ** 2).mean())))

    def test_snapshot_stride(self):
        model, tg, grid = _linear_setup(total=0.5)  # ntau = 100
        paths = simulate_paths(model, tg, [0.0], seed=5)
        init = initial_density(grid, "gaussian", center=[0.0], sigma=1.0)
        res = run_filter(model, tg, grid, paths.observations, init, snapshot_count=10)
        assert len(res.snapshots) == 10
        ks = [k for k, _ in res.snapshots]
        assert ks[0] == 0 and ks[-1] == tg.ntau
        for _, values in res.snapshots:
            assert abs(values.sum() * grid.ds - 1.0) < 1e-9

    def test_progress_monotone_and_complete(self):
        model, tg, grid = _linear_setup(total=0.25)
        paths = simulate_paths(model, tg, [0.0], seed=5)
        init = initial_density(grid, "gaussian", center=[0.0], sigma=1.0)
        seen = []
        run_filter(model, tg, grid, paths.observations, init, progress=seen.append)
        assert seen == sorted(seen)
        assert seen[-1] == 1.0

    def test_cancellation(self):
        model, tg, grid = _linear_setup(total=1.0)
        paths = simulate_paths(model, tg, [0.0], seed=5)
        init = initial_density(grid, "gaussian", center=[0.0], sigma=1.0)
        calls = []

        def cancel_after_three():
            calls.append(None)
            return len(calls) > 3

        with pytest.raises(FilterCancelled):
            run_filter(
                model, tg, grid, paths.observations, init, should_cancel=cancel_after_three
            )

    def test_mass_stays_unit_through_updates(self):
        model, tg, grid = _linear_setup(total=0.5)
        paths = simulate_paths(model, tg, [0.0], seed=7)
        init = initial_density(grid, "gaussian", center=[0.0], sigma=1.0)
        res = run_filter(model, tg, grid, paths.observations, init, snapshot_count=100)
        for _, values in res.snapshots:
            assert abs(values.sum() * grid.ds - 1.0) < 1e-12
            assert np.all(np.isfinite(values))

    def test_observation_shape_checked(self):
        model, tg, grid = _linear_setup(total=0.5)
        init = initial_density(grid, "gaussian", center=[0.0], sigma=1.0)
        with pytest.raises(ValueError):
            run_filter(model, tg, grid, np.zeros((5, 1)), init)


def test_two_dimensional_filter_matches_kalman_oracle():
    # coupled 2-D linear system: checks cross-dimension convection, the 2-D
    # transforms, and the Kronecker spectral factors against an exact oracle
    from yauyau.oracles import kalman_oracle
    from yauyau.harness import rmse as rmse_fn

    f_mat = np.array([[-0.5, 0.2], [-0.2, -0.5]])
    h_mat = np.eye(2)
    model = ModelSpec.from_texts(
        ["-0.5*x1+0.2*x2", "-0.2*x1-0.5*x2"], ["x1", "x2"]
    )
    tg = TimeGrid.from_steps(2.0, 0.001, 0.005)
    paths = simulate_paths(model, tg, [0.0, 0.0], seed=31)
    grid = build_grid(2, -4.0, 4.0, 0.2)
    init = initial_density(grid, "gaussian", center=[0.0, 0.0], sigma=1.0)
    res = run_filter(model, tg, grid, paths.observations, init, truth=paths.states)
    kf = kalman_oracle(f_mat, h_mat, paths.observations, tg, x0_mean=[0, 0], p0=np.eye(2))
    assert rmse_fn(res.estimates, kf) < 0.02
    assert abs(res.rmse / rmse_fn(kf, res.truth_coarse) - 1.0) < 0.05


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 1e6), st.integers(0, 2 ** 16))
def test_normalize_scale_property(scale, seed):
    g = build_grid(1, -2.0, 2.0, 0.5)
    raw = np.random.default_rng(seed).uniform(0.05, 1.0, g.ns)
    a = normalize(DensityField(raw), g.ds, g.dim)
    b = normalize(DensityField(raw * scale), g.ds, g.dim)
    assert np.max(np.abs(a.values - b.values)) <= 1e-12 * np.abs(a.values).max()
