"""Nonlinear filtering engine built on a DST-accelerated forward-equation solver."""

from .config import ExperimentConfig, get_preset, preset_names
from .errors import (
    CapacityError,
    ConfigError,
    DensityCollapseError,
    FilterCancelled,
    OracleError,
    SimulationError,
    StabilityWarning,
    StepFailureError,
    YauYauError,
)
from .expr import ModelSpec, differentiate, divergence, evaluate, parse, to_string
from .filtering import (
    FilterResult,
    estimate_mean,
    initial_density,
    normalize,
    observation_update,
    run_filter,
)
from .harness import ExperimentResult, execute, rmse, run_experiment
from .oracles import kalman_oracle, kalman_oracle_for_model, particle_oracle
from .pde import (
    DensityField,
    SpatialGrid,
    build_grid,
    build_operator,
    compute_lambda,
    dst_1d,
    dst_nd,
    idst_1d,
    kfe_step,
)
from .sde import TimeGrid, observation_increments, simulate_paths

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConfigError",
    "DensityCollapseError",
    "DensityField",
    "ExperimentConfig",
    "ExperimentResult",
    "FilterCancelled",
    "FilterResult",
    "ModelSpec",
    "OracleError",
    "SimulationError",
    "SpatialGrid",
    "StabilityWarning",
    "StepFailureError",
    "TimeGrid",
    "YauYauError",
    "build_grid",
    "build_operator",
    "compute_lambda",
    "differentiate",
    "divergence",
    "dst_1d",
    "dst_nd",
    "estimate_mean",
    "evaluate",
    "execute",
    "get_preset",
    "idst_1d",
    "initial_density",
    "kalman_oracle",
    "kalman_oracle_for_model",
    "kfe_step",
    "normalize",
    "observation_increments",
    "observation_update",
    "parse",
    "particle_oracle",
    "preset_names",
    "rmse",
    "run_experiment",
    "run_filter",
    "simulate_paths",
    "to_string",
]
