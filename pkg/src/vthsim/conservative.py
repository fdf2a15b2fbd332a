"""Conservative virtual-time horizon on a ring of L processors.

The horizon evolves as an asynchronous cellular automaton.  At every update
attempt each site checks its local causality constraint against a snapshot
of the heights; permitted sites advance by an exponential waiting time,
blocked sites idle.  Three rules apply, chosen by the load N per processor:

* ``N == 1``: site k may advance iff ``h[k] <= min(h[k-1], h[k+1])``.
* ``N == 2``: a neighbour (left or right) is chosen and k may advance iff
  ``h[k] <= h[neighbour]``.
* ``N >= 3``: one of the N volume sites is chosen; an interior site always
  advances, border site 1 is checked against the left neighbour and border
  site N against the right one.

For ``N >= 2`` a blocked site keeps its selection for the next attempt;
a site that advanced draws a fresh one.  Selections are encoded as the
volume-site index ``1..N`` (``0`` means none drawn yet), which makes the
``N == 2`` rule the special case with no interior sites.

Sites are indexed from 0 and wrap around: the left neighbour of site 0 is
site ``L - 1``.

Random numbers: at every attempt each run draws ``L`` uniforms for the time
increments and, for ``N >= 2``, another ``L`` for the selections, whether or
not they end up being used.  Consumption per attempt is therefore fixed,
and a run's trajectory depends only on its own seed, never on how runs are
batched together.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .measurements import FIELDS, RunSeries, efficiency_conservative, measure
from .stochastic import RandomStream, increment_from_uniform

LEFT, RIGHT = "left", "right"

# doubles drawn per block of attempts, summed over the batch
_BLOCK_BUDGET = 1 << 21


@dataclass(frozen=True)
class ConservativeConfig:
    L: int
    N: int = 1

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 2:
            raise ValueError("L must be >= 2")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be >= 1")

    def as_dict(self) -> dict:
        return {"protocol": "conservative", "L": int(self.L), "N": int(self.N)}


@dataclass
class StepOutcome:
    updated: np.ndarray  # bool, same shape as the heights
    update_count: np.ndarray | int  # p per run


def permitted_n1(heights, k: int) -> bool:
    """Load N=1: site k may advance iff it is not above either neighbour."""
    h = heights
    L = len(h)
    return bool(h[k] <= min(h[(k - 1) % L], h[(k + 1) % L]))


def permitted_n2(heights, k: int, neighbor: str) -> bool:
    """Load N=2: site k may advance iff it is not above the chosen neighbour."""
    h = heights
    L = len(h)
    if neighbor == LEFT:
        return bool(h[k] <= h[(k - 1) % L])
    if neighbor == RIGHT:
        return bool(h[k] <= h[(k + 1) % L])
    raise ValueError(f"neighbor must be {LEFT!r} or {RIGHT!r}, got {neighbor!r}")


def permitted_ngeq3(heights, k: int, n_k: int, N: int) -> bool:
    """Load N>=3 with volume site ``n_k`` in ``1..N`` selected at site k."""
    if not 1 <= n_k <= N:
        raise ValueError(f"volume site {n_k} outside 1..{N}")
    if 1 < n_k < N:
        return True
    return permitted_n2(heights, k, LEFT if n_k == 1 else RIGHT)


def permission_mask(heights: np.ndarray, N: int, selection: np.ndarray | None = None) -> np.ndarray:
    """Vectorised permission check for every site of one or many fields.

    ``selection`` holds volume-site indices ``1..N`` (ignored for N=1).
    """
    h = heights
    left = np.roll(h, 1, axis=-1)
    right = np.roll(h, -1, axis=-1)
    if N == 1:
        return h <= np.minimum(left, right)
    mask = (selection > 1) & (selection < N)
    mask |= (selection == 1) & (h <= left)
    mask |= (selection == N) & (h <= right)
    return mask


class ConservativeState:
    """Height fields plus per-site selections for one run or a batch of runs.

    Pass an int seed for a single run (``heights`` has shape ``(L,)``) or a
    sequence of seeds for a batch (shape ``(R, L)``, one row per seed).
    """

    def __init__(self, config: ConservativeConfig, seed: int | Sequence[int]):
        self.config = config
        self.batched = not np.isscalar(seed)
        seeds = [int(s) for s in (seed if self.batched else [seed])]
        if not seeds:
            raise ValueError("need at least one seed")
        self.seeds = seeds
        self.streams = [RandomStream(s) for s in seeds]
        R, L = len(seeds), config.L
        self._h = np.zeros((R, L))
        self.t = 0
        # 0: nothing drawn yet; otherwise the volume site 1..N
        self._pending = np.zeros((R, L), dtype=np.int64)
        self._succeeded = np.ones((R, L), dtype=bool)
        self._draws_per_step = L if config.N == 1 else 2 * L
        self._block = max(1, min(1024, _BLOCK_BUDGET // (R * self._draws_per_step)))
        self._buf = np.empty((0, R, self._draws_per_step))
        self._pos = 0

    def _view(self, a):
        return a if self.batched else a[0]

    @property
    def heights(self) -> np.ndarray:
        return self._view(self._h)

    @property
    def pending_selection(self) -> np.ndarray:
        return self._view(self._pending)

    @property
    def last_attempt_succeeded(self) -> np.ndarray:
        return self._view(self._succeeded)

    @property
    def n_runs(self) -> int:
        return len(self.seeds)

    def _next_uniforms(self) -> np.ndarray:
        if self._pos == len(self._buf):
            shape = (self._block, self._draws_per_step)
            self._buf = np.stack([s.uniform(shape) for s in self.streams], axis=1)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def step(self) -> StepOutcome:
        """One synchronous update attempt on every site of every run."""
        L, N = self.config.L, self.config.N
        u = self._next_uniforms()
        inc = increment_from_uniform(u[:, :L])
        if N >= 2:
            fresh = 1 + np.floor((1.0 - u[:, L:]) * N).astype(np.int64)
            np.copyto(self._pending, fresh, where=self._succeeded)
        mask = permission_mask(self._h, N, self._pending)
        self._h += np.where(mask, inc, 0.0)
        self._succeeded = mask
        self.t += 1
        p = np.count_nonzero(mask, axis=-1)
        return StepOutcome(self._view(mask), p if self.batched else int(p[0]))

    def efficiency(self, mu: float = 1.0):
        return efficiency_conservative(self.heights, self.t, mu)

    record_fields = FIELDS

    def record(self, outcome: StepOutcome) -> dict:
        """Observables of every run after the attempt that produced ``outcome``."""
        updated = outcome.updated if self.batched else outcome.updated[None, :]
        return measure(self._h, updated)


def new_flat(config: ConservativeConfig, seed: int | Sequence[int]) -> ConservativeState:
    """Flat substrate: every local virtual time is zero at t = 0."""
    return ConservativeState(config, seed)


def record_times(
    t_max: int,
    stride: int | None = None,
    dense_until: int = 1000,
    factor: float = 1.02,
    max_gap: int | None = None,
) -> np.ndarray:
    """Attempt indices ``1..t_max`` at which records are kept.

    With ``stride`` given, every ``stride``-th attempt.  Otherwise every
    attempt up to ``dense_until`` and then geometrically spaced ones
    (successive times differing by about ``factor``), always ending at
    ``t_max``.  ``max_gap`` caps the spacing of the geometric part, which
    keeps long saturated tails well sampled.
    """
    if t_max < 1:
        return np.empty(0, dtype=np.int64)
    if stride is not None:
        if stride < 1:
            raise ValueError("stride must be >= 1")
        ts = np.arange(stride, t_max + 1, stride, dtype=np.int64)
    else:
        dense = np.arange(1, min(t_max, dense_until) + 1, dtype=np.int64)
        sparse = []
        t = float(dense_until)
        while True:
            t *= factor
            if int(t) >= t_max:
                break
            sparse.append(int(t))
        ts = np.unique(np.concatenate([dense, np.asarray(sparse, dtype=np.int64)]))
        if max_gap is not None:
            ts = np.unique(np.concatenate([ts, np.arange(dense_until, t_max + 1, max_gap, dtype=np.int64)]))
    if ts.size == 0 or ts[-1] != t_max:
        ts = np.append(ts, t_max)
    return ts


def evolve(state, t_max: int, times=None, observer: Callable | None = None) -> RunSeries:
    """Advance ``state`` to attempt ``t_max``, recording at ``times``.

    Works for conservative and optimistic states alike: both provide
    ``step()``, ``record()`` and ``config``.
    """
    if times is None:
        times = np.arange(1, t_max + 1, dtype=np.int64)
    times = np.asarray(times, dtype=np.int64)
    if times.size and (times[0] <= state.t or times[-1] > t_max or np.any(np.diff(times) <= 0)):
        raise ValueError("record times must increase within (t, t_max]")
    rows: dict[str, list] = {}
    i = 0
    while state.t < t_max:
        outcome = state.step()
        if observer is not None:
            observer(state, outcome)
        if i < times.size and state.t == times[i]:
            for k, v in state.record(outcome).items():
                rows.setdefault(k, []).append(v)
            i += 1
    data = {k: np.asarray(v) for k, v in rows.items()}
    if not data:
        data = {k: np.empty((0, state.n_runs)) for k in state.record_fields}
    return RunSeries(state.config.as_dict(), list(state.seeds), times.copy(), data)


def run(config: ConservativeConfig, seed: int | Sequence[int], t_max: int, times=None, observer=None) -> RunSeries:
    """Simulate from the flat substrate for ``t_max`` attempts.

    ``seed`` may be a sequence to run a batch; ``times`` defaults to every
    attempt.  Deterministic given (config, seed).
    """
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    state = new_flat(config, seed if not np.isscalar(seed) else [seed])
    return evolve(state, t_max, times, observer)
