"""CMA-ES with principled injection of external candidate solutions.

The optimizer tolerates externally proposed solutions, directions, and
mean shifts by length-controlling their steps in the Mahalanobis metric
of the current sampling distribution before they enter the adaptation
updates.
"""

from ._kernels import NUMBA_ENABLED, backend
from .checkpoint import load_checkpoint, save_checkpoint
from .engine import (
    ALWAYS,
    CLIP_AFTER_MEAN,
    CLIP_BEFORE_MEAN,
    ONLY_ON_MEAN_SHIFT,
    CmaEngine,
    EngineConfig,
    Generation,
    IterationReport,
    OptimizerState,
    freeze_variables,
    h_sigma,
    update_sigma,
)
from .harness import (
    RunLog,
    ScenarioConfig,
    SpeedupReport,
    clip_stats,
    compare,
    parse_config_file,
    run_scenario,
)
from .injection import (
    CDF_ADAPTIVE,
    DIRECTION,
    GRADIENT_DIRECTION,
    HARD_CLIP,
    MEAN_SHIFT,
    OFF,
    SOLUTION,
    ClipPolicy,
    InjectionRequest,
    alpha_clip,
    cdf_normalize,
    clip_delta_m,
    clip_injected_step,
    direction,
    direction_to_candidate,
    gradient_direction,
    make_mean_shift,
    materialize,
    mean_shift,
    solution,
)
from .params import (
    StrategyParameters,
    clip_threshold,
    clip_threshold_mean,
    default_parameters,
    expected_norm,
)
from .problems import (
    Objective,
    make_problem,
    monotone_wrap,
    perturbed_optimum_injector,
    problem_names,
    rastrigin,
    rosenbrock,
    sphere,
)
from .rng import GaussianStream
from .symmat import (
    EigenDecomposition,
    apply_root,
    decompose,
    mahalanobis_norm,
    symmetrize,
)

__version__ = "0.1.0"

__all__ = [
    "ALWAYS",
    "CDF_ADAPTIVE",
    "CLIP_AFTER_MEAN",
    "CLIP_BEFORE_MEAN",
    "ClipPolicy",
    "CmaEngine",
    "DIRECTION",
    "EigenDecomposition",
    "EngineConfig",
    "GRADIENT_DIRECTION",
    "GaussianStream",
    "Generation",
    "HARD_CLIP",
    "InjectionRequest",
    "IterationReport",
    "MEAN_SHIFT",
    "NUMBA_ENABLED",
    "OFF",
    "ONLY_ON_MEAN_SHIFT",
    "Objective",
    "OptimizerState",
    "RunLog",
    "SOLUTION",
    "ScenarioConfig",
    "SpeedupReport",
    "StrategyParameters",
    "alpha_clip",
    "apply_root",
    "backend",
    "cdf_normalize",
    "clip_delta_m",
    "clip_injected_step",
    "clip_stats",
    "clip_threshold",
    "clip_threshold_mean",
    "compare",
    "decompose",
    "default_parameters",
    "direction",
    "direction_to_candidate",
    "expected_norm",
    "freeze_variables",
    "gradient_direction",
    "h_sigma",
    "load_checkpoint",
    "mahalanobis_norm",
    "make_mean_shift",
    "make_problem",
    "materialize",
    "mean_shift",
    "monotone_wrap",
    "parse_config_file",
    "perturbed_optimum_injector",
    "problem_names",
    "rastrigin",
    "rosenbrock",
    "run_scenario",
    "save_checkpoint",
    "solution",
    "sphere",
    "symmetrize",
    "update_sigma",
]
