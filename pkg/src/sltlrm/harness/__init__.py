from .config import ConfigError, ExperimentConfig
from .plots import PlotError, emit_plots
from .runners import (
    RunResult,
    run_compose_eval,
    run_experiment,
    run_lifelong,
    run_repr_eval,
    run_single,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "PlotError",
    "RunResult",
    "emit_plots",
    "run_compose_eval",
    "run_experiment",
    "run_lifelong",
    "run_repr_eval",
    "run_single",
]
