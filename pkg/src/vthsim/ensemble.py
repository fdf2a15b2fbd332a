"""Run R independent simulations and reduce them to an ensemble series.

Run ``i`` is seeded ``base_seed + i``.  Runs are simulated in batches
(vectorised across the batch) and optionally spread over worker
processes; neither the batch size nor the job count changes any output
value, because every run consumes only its own random stream.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .conservative import ConservativeConfig, run
from .measurements import RunSeries, aggregate
from .optimistic import OptimisticConfig, run_optimistic

# runs * sites simulated together
_BATCH_SITES = 1 << 18


def make_config(protocol: str, L: int, load: int = 1):
    if protocol == "conservative":
        return ConservativeConfig(L, load)
    if protocol == "optimistic":
        return OptimisticConfig(L, load)
    raise ValueError(f"unknown protocol {protocol!r}")


def _simulate(config, seeds, t_max, times) -> RunSeries:
    if isinstance(config, OptimisticConfig):
        return run_optimistic(config, seeds, t_max, times)
    return run(config, seeds, t_max, times)


def _chunks(n: int, size: int):
    return [(i, min(n, i + size)) for i in range(0, n, size)]


def simulate(config, runs: int, base_seed: int, t_max: int, times=None, jobs: int = 1, batch: int | None = None) -> RunSeries:
    """Per-run records of ``runs`` simulations, in run-index order."""
    if runs < 1:
        raise ValueError("need at least one run")
    if batch is None:
        batch = max(1, _BATCH_SITES // config.L)
    seeds = [base_seed + i for i in range(runs)]
    parts = _chunks(runs, batch)
    if jobs <= 1 or len(parts) == 1:
        results = [_simulate(config, seeds[a:b], t_max, times) for a, b in parts]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_simulate, config, seeds[a:b], t_max, times) for a, b in parts]
            results = [f.result() for f in futures]
    return RunSeries.concat(results)


def simulate_ensemble(config, runs: int, base_seed: int, t_max: int, times=None, jobs: int = 1, batch: int | None = None):
    """Ensemble means and standard errors of :func:`simulate`."""
    series = simulate(config, runs, base_seed, t_max, times, jobs, batch)
    return aggregate(series), series


def plateau_mean_width(series: RunSeries, tail: float = 0.2) -> float:
    """Ensemble- and time-averaged ``w`` over the trailing ``tail`` of the run."""
    t = series.t
    m = t >= t[-1] - tail * (t[-1] - t[0])
    return float(np.sqrt(series.data["width_sq"][m]).mean())
