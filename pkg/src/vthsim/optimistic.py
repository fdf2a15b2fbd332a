"""Generic optimistic horizon with its embedded progress horizon.

Processors never idle: at every cycle each site adds a waiting time to its
optimistic virtual time.  The same increment is committed to the progress
virtual time when the event was certain, i.e. when the site's committed
time is not ahead of either neighbour's committed time (the unit-load
conservative condition applied to the progress horizon).  Otherwise the
processor guessed, and the guess is correct with probability 1/2.

The gap between the two horizons is the time spent on events that were
later rolled back.  Rollback cascades themselves are not simulated.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .conservative import evolve, permission_mask
from .measurements import FIELDS, RunSeries, measure, width_squared
from .stochastic import RandomStream, increment_from_uniform

OPTIMISTIC_FIELDS = FIELDS + ("efficiency", "width_sq_optimistic", "width_sq_progress")

_BLOCK_BUDGET = 1 << 21


@dataclass(frozen=True)
class OptimisticConfig:
    L: int
    N_c: int = 1

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 2:
            raise ValueError("L must be >= 2")
        if int(self.N_c) != self.N_c or self.N_c < 1:
            raise ValueError("N_c must be >= 1")
        if self.N_c != 1:
            raise NotImplementedError("only one event per cycle (N_c = 1) is modelled")

    def as_dict(self) -> dict:
        return {"protocol": "optimistic", "L": int(self.L), "N_c": int(self.N_c)}


@dataclass
class OptimisticOutcome:
    committed: np.ndarray
    certain: np.ndarray
    update_count: np.ndarray | int

    @property
    def updated(self):
        return self.committed


class OptimisticState:
    """Optimistic and progress height fields for one run or a batch.

    Each cycle consumes ``2 L`` uniforms per run: ``L`` for the increments
    and ``L`` for the guesses.
    """

    def __init__(self, config: OptimisticConfig, seed: int | Sequence[int]):
        self.config = config
        self.batched = not np.isscalar(seed)
        seeds = [int(s) for s in (seed if self.batched else [seed])]
        if not seeds:
            raise ValueError("need at least one seed")
        self.seeds = seeds
        self.streams = [RandomStream(s) for s in seeds]
        R, L = len(seeds), config.L
        self._opt = np.zeros((R, L))
        self._prog = np.zeros((R, L))
        self._area_opt = np.zeros(R)
        self._area_prog = np.zeros(R)
        self.t = 0
        self._block = max(1, min(1024, _BLOCK_BUDGET // (R * 2 * L)))
        self._buf = np.empty((0, R, 2 * L))
        self._pos = 0

    def _view(self, a):
        return a if self.batched else a[0]

    @property
    def optimistic(self):
        return self._view(self._opt)

    @property
    def progress(self):
        return self._view(self._prog)

    @property
    def area_optimistic(self):
        return self._view(self._area_opt)

    @property
    def area_progress(self):
        return self._view(self._area_prog)

    @property
    def n_runs(self) -> int:
        return len(self.seeds)

    def _next_uniforms(self):
        if self._pos == len(self._buf):
            shape = (self._block, 2 * self.config.L)
            self._buf = np.stack([s.uniform(shape) for s in self.streams], axis=1)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def step(self) -> OptimisticOutcome:
        L = self.config.L
        u = self._next_uniforms()
        inc = increment_from_uniform(u[:, :L])
        certain = permission_mask(self._prog, 1)
        committed = certain | (u[:, L:] <= 0.5)
        self._opt += inc
        self._prog += np.where(committed, inc, 0.0)
        self._area_opt += self._opt.sum(axis=-1)
        self._area_prog += self._prog.sum(axis=-1)
        self.t += 1
        p = np.count_nonzero(committed, axis=-1)
        return OptimisticOutcome(self._view(committed), self._view(certain), p if self.batched else int(p[0]))

    def efficiency(self):
        """Total progress time over total computation time so far."""
        if self.t < 1:
            raise ValueError("efficiency is undefined before the first cycle")
        return self._view(self._area_prog / self._area_opt)

    record_fields = OPTIMISTIC_FIELDS

    def record(self, outcome: OptimisticOutcome) -> dict:
        """Progress-horizon observables plus the optimistic-only columns."""
        committed = outcome.committed if self.batched else outcome.committed[None, :]
        rec = measure(self._prog, committed)
        rec["efficiency"] = self._area_prog / self._area_opt
        rec["width_sq_optimistic"] = width_squared(self._opt)
        rec["width_sq_progress"] = rec["width_sq"]
        return rec


def new_flat_optimistic(L: int, N_c: int = 1, seed: int | Sequence[int] = 0) -> OptimisticState:
    return OptimisticState(OptimisticConfig(L, N_c), seed)


def efficiency_optimistic(state: OptimisticState):
    return state.efficiency()


def run_optimistic(config: OptimisticConfig, seed, t_max: int, times=None, observer=None) -> RunSeries:
    """Optimistic analogue of :func:`vthsim.conservative.run`."""
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    state = OptimisticState(config, seed if not np.isscalar(seed) else [seed])
    return evolve(state, t_max, times, observer)
