"""Config validation, JSON round trip, and preset definitions."""

import json

import pytest

from yauyau.config import ExperimentConfig, get_preset, preset_names
from yauyau.errors import ConfigError


def cubic_dict(**overrides):
    d = {
        "model": {"dim": 1, "obs_dim": 1, "drift": ["cos(x1)"], "observation": ["x1^3"]},
        "time": {"total": 20.0, "dt": 0.001, "dtau": 0.005},
        "space": {"ds": 0.5, "bounds": "data-driven"},
        "seed": 42,
    }
    d.update(overrides)
    return d


class TestFromDict:
    def test_happy_path(self):
        cfg = ExperimentConfig.from_dict(cubic_dict())
        assert cfg.dim == 1
        assert cfg.drift_texts == ["cos(x1)"]
        assert cfg.bounds == "data-driven"

    def test_fixed_bounds(self):
        cfg = ExperimentConfig.from_dict(
            cubic_dict(space={"ds": 0.1, "bounds": [-5, 5]})
        )
        assert cfg.bounds == "fixed"
        assert (cfg.lo, cfg.hi) == (-5.0, 5.0)

    def test_round_trip_is_semantically_identical(self):
        cfg = ExperimentConfig.from_dict(cubic_dict())
        again = ExperimentConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_round_trip_through_json_text(self):
        cfg = get_preset("cubic3d")
        again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
        assert again == cfg

    def test_unknown_variable_reported_with_field(self):
        with pytest.raises(ConfigError) as err:
            ExperimentConfig.from_dict(
                cubic_dict(model={"dim": 3, "obs_dim": 1, "drift": ["cos(x4)", "0", "0"],
                                  "observation": ["x1"]})
            )
        fields = [f for f, _ in err.value.issues]
        assert "model.drift[0]" in fields
        assert "x4" in dict(err.value.issues)["model.drift[0]"]

    def test_bad_nesting_reported(self):
        with pytest.raises(ConfigError) as err:
            ExperimentConfig.from_dict(
                cubic_dict(time={"total": 20.0, "dt": 0.001, "dtau": 0.0033})
            )
        assert any(f == "time" for f, _ in err.value.issues)

    def test_missing_required_field(self):
        d = cubic_dict()
        del d["time"]
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(d)

    def test_empty_expression_rejected(self):
        with pytest.raises(ConfigError) as err:
            ExperimentConfig.from_dict(
                cubic_dict(model={"dim": 1, "obs_dim": 1, "drift": ["  "], "observation": ["x1"]})
            )
        assert any("drift[0]" in f for f, _ in err.value.issues)

    def test_x0_length_checked(self):
        with pytest.raises(ConfigError) as err:
            ExperimentConfig.from_dict(cubic_dict(x0=[0.0, 0.0]))
        assert any(f == "x0" for f, _ in err.value.issues)

    def test_from_file(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps(cubic_dict()))
        cfg = ExperimentConfig.from_file(path)
        assert cfg.total_time == 20.0

    def test_from_file_bad_json(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            ExperimentConfig.from_file(path)


class TestPresets:
    def test_names(self):
        assert preset_names() == [
            "almostlinear", "almostlinear3d", "cubic1d", "cubic3d", "linear1d",
        ]

    def test_cubic1d_parameters(self):
        cfg = get_preset("cubic1d")
        assert cfg.dim == 1
        assert cfg.drift_texts == ["cos(x1)"]
        assert cfg.obs_texts == ["x1^3"]
        assert (cfg.total_time, cfg.dt, cfg.dtau, cfg.ds) == (20.0, 0.001, 0.005, 0.5)
        assert cfg.seed == 42
        assert cfg.bounds == "data-driven"

    def test_almostlinear_parameters(self):
        cfg = get_preset("almostlinear")
        assert cfg.dim == 1  # the defining equations are scalar
        assert cfg.obs_texts == ["x1*(1+0.25*cos(x1))"]
        assert (cfg.total_time, cfg.dt, cfg.dtau, cfg.ds) == (50.0, 0.0001, 0.0005, 0.5)

    def test_almostlinear3d_is_three_copies(self):
        cfg = get_preset("almostlinear3d")
        assert cfg.dim == 3
        assert len(set(t.replace("x2", "x1").replace("x3", "x1") for t in cfg.obs_texts)) == 1

    def test_cubic3d_parameters(self):
        cfg = get_preset("cubic3d")
        assert cfg.dim == 3
        assert cfg.total_time == 20.0   # consistent with ntau=4000 at dtau=0.005
        assert cfg.time_grid().ntau == 4000
        assert cfg.bounds == "fixed"

    def test_seed_and_outdir_override(self):
        cfg = get_preset("cubic1d", seed=7, out_dir="/tmp/x")
        assert cfg.seed == 7
        assert cfg.out_dir == "/tmp/x"

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            get_preset("nope")

    def test_all_presets_validate(self):
        for name in preset_names():
            get_preset(name).validate()
