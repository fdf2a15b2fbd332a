"""Virtual-time horizons of conservative and optimistic parallel discrete-event simulations on a ring."""

__version__ = "0.1.0"

from .conservative import ConservativeConfig, ConservativeState, new_flat, record_times, run
from .measurements import EnsembleSeries, RunSeries, StepRecord, aggregate
from .optimistic import OptimisticConfig, OptimisticState, new_flat_optimistic, run_optimistic
from .stochastic import RandomStream

__all__ = [
    "ConservativeConfig",
    "ConservativeState",
    "EnsembleSeries",
    "OptimisticConfig",
    "OptimisticState",
    "RandomStream",
    "RunSeries",
    "StepRecord",
    "aggregate",
    "new_flat",
    "new_flat_optimistic",
    "record_times",
    "run",
    "run_optimistic",
]
