"""Experiment pipeline, metrics, and artifact files."""

import csv
import json
import math

import numpy as np
import pytest

from yauyau.config import ExperimentConfig
from yauyau.harness import data_driven_bounds, execute, rmse, run_experiment
from yauyau.pde import read_density_bin


def small_cubic(**overrides):
    base = {
        "model": {"dim": 1, "obs_dim": 1, "drift": ["cos(x1)"], "observation": ["x1^3"]},
        "time": {"total": 1.0, "dt": 0.001, "dtau": 0.005},
        "space": {"ds": 0.5, "bounds": "data-driven"},
        "seed": 42,
        "snapshots": 5,
    }
    base.update(overrides)
    return ExperimentConfig.from_dict(base)


class TestRmse:
    def test_identical_inputs(self):
        a = np.arange(12.0).reshape(4, 3)
        assert rmse(a, a) == 0.0

    def test_constant_offset_single_dimension(self):
        # offset c in one of D dims: sqrt(mean) = c/sqrt(D)
        truth = np.zeros((10, 4))
        est = truth.copy()
        est[:, 2] += 0.6
        assert rmse(est, truth) == pytest.approx(0.6 / math.sqrt(4))

    def test_matches_direct_resummation(self, rng):
        a = rng.normal(size=(50, 2))
        b = rng.normal(size=(50, 2))
        direct = math.sqrt(sum((x - y) ** 2 for x, y in zip(a.ravel(), b.ravel())) / a.size)
        assert abs(rmse(a, b) - direct) < 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            rmse(np.zeros((3, 1)), np.zeros((4, 1)))


class TestExecute:
    def test_pipeline_deterministic(self):
        cfg = small_cubic()
        a = execute(cfg)
        b = execute(cfg)
        assert np.array_equal(a.filter_result.estimates, b.filter_result.estimates)
        assert a.rmse == b.rmse

    def test_data_driven_bounds_contain_samples(self):
        cfg = small_cubic()
        res = execute(cfg)
        states = res.paths.states
        assert states.min() >= res.grid.nodes[0]
        assert states.max() <= res.grid.nodes[-1]
        lo, hi = data_driven_bounds(states, cfg.ds)
        assert res.grid.lo == lo

    def test_zero_rmse_is_truth_rms(self):
        res = execute(small_cubic())
        truth = res.filter_result.truth_coarse
        assert res.zero_rmse == pytest.approx(float(np.sqrt((truth ** 2).mean())))

    def test_uniform_init(self):
        res = execute(small_cubic(init_density={"kind": "uniform"}))
        assert np.all(np.isfinite(res.filter_result.estimates))


@pytest.fixture(scope="module")
def result_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("artifacts")
    cfg = small_cubic()
    result = run_experiment(cfg, out_dir=out)
    return out, result


class TestArtifacts:

    def test_files_written(self, result_dir):
        out, result = result_dir
        names = {p.name for p in out.iterdir()}
        assert {"states.csv", "observations.csv", "estimates.csv", "summary.json"} <= names
        assert sum(1 for n in names if n.startswith("density_")) == len(
            result.filter_result.snapshots
        )

    def test_states_csv_layout(self, result_dir):
        out, result = result_dir
        with open(out / "states.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "x1"]
        assert len(rows) - 1 == result.tg.total_fine_steps + 1
        assert float(rows[1][0]) == 0.0
        assert float(rows[1][1]) == result.paths.states[0, 0]

    def test_observations_csv_layout(self, result_dir):
        out, result = result_dir
        with open(out / "observations.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["tau", "y1"]
        assert len(rows) - 1 == result.tg.ntau + 1
        assert float(rows[1][1]) == 0.0  # y(0) = 0

    def test_estimates_csv_layout_and_values(self, result_dir):
        out, result = result_dir
        with open(out / "estimates.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["tau", "x1", "xhat1", "err"]
        est = np.array([float(r[2]) for r in rows[1:]])
        assert np.array_equal(est, result.filter_result.estimates[:, 0])

    def test_summary_contents(self, result_dir):
        out, result = result_dir
        summary = json.loads((out / "summary.json").read_text())
        assert summary["rmse"] == result.rmse
        assert summary["config"]["model"]["drift"] == ["cos(x1)"]
        assert set(summary["timings"]) == {"propagation", "update", "estimation"}
        assert summary["grid"]["ns"] == result.grid.ns

    def test_density_snapshot_readable(self, result_dir):
        out, result = result_dir
        grid, values = read_density_bin(out / "density_0000.bin")
        assert grid.ns == result.grid.ns
        k0, first = result.filter_result.snapshots[0]
        assert np.array_equal(values, first)

    def test_rerun_bit_identical_estimates_csv(self, result_dir, tmp_path):
        out, _ = result_dir
        cfg = small_cubic()
        run_experiment(cfg, out_dir=tmp_path)
        assert (tmp_path / "estimates.csv").read_bytes() == (out / "estimates.csv").read_bytes()
