"""Observables of a virtual-time horizon and their ensemble averages.

All field functions take an array whose last axis runs over the L sites,
so the same call works for one run (shape ``(L,)``) or a batch of runs
(shape ``(R, L)``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

# column order of every per-attempt record
FIELDS = (
    "width_sq",
    "mean_height",
    "gvt",
    "utilization",
    "f_above",
    "f_at_or_below",
    "update_count",
)


def width_squared(heights):
    """Mean squared deviation of the heights about their mean."""
    h = np.asarray(heights, dtype=float)
    dev = h - h.mean(axis=-1, keepdims=True)
    return np.mean(dev * dev, axis=-1)


def characteristic_densities(heights):
    """Fractions of sites strictly above, and at or below, the mean height."""
    h = np.asarray(heights, dtype=float)
    above = np.mean(h > h.mean(axis=-1, keepdims=True), axis=-1)
    return above, 1.0 - above


def gvt(heights):
    """Global virtual time: the minimum local virtual time."""
    return np.min(heights, axis=-1)


def velocity(t, mean_height, start=(0, 0.0)):
    """Interface velocity from consecutive mean heights.

    With every attempt recorded this is the forward difference
    ``hbar(t) - hbar(t-1)``; on a thinned time grid it is the secant slope
    between neighbouring records.  ``start`` is the record preceding the
    first entry (the flat substrate by default); pass ``None`` to leave the
    first velocity undefined (NaN).
    """
    t = np.asarray(t, dtype=float)
    hbar = np.asarray(mean_height, dtype=float)
    if t.size == 0:
        return np.empty(0)
    if np.any(t < 1):
        raise ValueError("velocity is defined for t >= 1 only")
    v = np.empty_like(hbar)
    v[1:] = (hbar[1:] - hbar[:-1]) / (t[1:] - t[:-1]).reshape((-1,) + (1,) * (hbar.ndim - 1))
    if start is None:
        v[0] = np.nan
    else:
        v[0] = (hbar[0] - start[1]) / (t[0] - start[0])
    return v


def efficiency_conservative(heights, t: int, mu: float = 1.0):
    """Area under the conservative horizon over the wall time spent.

    Every attempt costs each processor ``mu`` units of wall time whether it
    updated or idled, so the denominator is ``L * t * mu``.
    """
    if t < 1:
        raise ValueError("efficiency is undefined before the first attempt")
    return np.mean(heights, axis=-1) / (t * mu)


def measure(heights, updated) -> dict[str, np.ndarray]:
    """Every per-attempt observable for the heights after an attempt."""
    h = np.asarray(heights, dtype=float)
    L = h.shape[-1]
    hbar = h.mean(axis=-1)
    dev = h - hbar[..., None]
    above = np.count_nonzero(dev > 0, axis=-1) / L
    p = np.count_nonzero(updated, axis=-1)
    return {
        "width_sq": np.mean(dev * dev, axis=-1),
        "mean_height": hbar,
        "gvt": h.min(axis=-1),
        "utilization": p / L,
        "f_above": above,
        "f_at_or_below": 1.0 - above,
        "update_count": p,
    }


@dataclass(frozen=True)
class StepRecord:
    t: int
    width_sq: float
    mean_height: float
    gvt: float
    utilization: float
    f_above: float
    f_at_or_below: float
    update_count: int


@dataclass
class RunSeries:
    """Records of R runs sharing one configuration and one time grid.

    ``data[name]`` has shape ``(len(t), R)``.
    """

    config: dict
    seeds: list[int]
    t: np.ndarray
    data: dict[str, np.ndarray]

    @property
    def n_runs(self) -> int:
        return len(self.seeds)

    def __len__(self) -> int:
        return len(self.t)

    def records(self, run: int = 0) -> Iterator[StepRecord]:
        for i, ti in enumerate(self.t):
            yield StepRecord(
                t=int(ti),
                update_count=int(self.data["update_count"][i, run]),
                **{k: float(self.data[k][i, run]) for k in FIELDS if k != "update_count"},
            )

    def select(self, runs: Sequence[int]) -> "RunSeries":
        idx = list(runs)
        return RunSeries(
            dict(self.config),
            [self.seeds[i] for i in idx],
            self.t.copy(),
            {k: v[:, idx] for k, v in self.data.items()},
        )

    @classmethod
    def concat(cls, parts: Sequence["RunSeries"]) -> "RunSeries":
        """Join run batches (same config and time grid) along the run axis."""
        first = parts[0]
        for p in parts[1:]:
            _check_compatible(first.config, first.t, p.config, p.t)
        return cls(
            dict(first.config),
            [s for p in parts for s in p.seeds],
            first.t.copy(),
            {k: np.concatenate([p.data[k] for p in parts], axis=1) for k in first.data},
        )


def _check_compatible(cfg_a, t_a, cfg_b, t_b):
    if cfg_a != cfg_b:
        raise ValueError(f"mismatched configurations: {cfg_a} vs {cfg_b}")
    if len(t_a) != len(t_b) or np.any(np.asarray(t_a) != np.asarray(t_b)):
        raise ValueError("mismatched time grids")


@dataclass
class Accumulator:
    """Running count, mean and sum of squared deviations per field and time.

    Partial accumulators merge with the pairwise update of Chan et al., so
    ensembles may be reduced in any grouping.
    """

    config: dict
    t: np.ndarray
    n: int
    mean: dict[str, np.ndarray]
    m2: dict[str, np.ndarray]

    @classmethod
    def from_series(cls, series: RunSeries) -> "Accumulator":
        mean, m2 = {}, {}
        for k, v in series.data.items():
            v = np.asarray(v, dtype=float)
            # shifted by the first run: identical runs give exactly zero spread
            mu = v[:, 0] + (v - v[:, :1]).mean(axis=1) if v.shape[1] else v.mean(axis=1)
            mean[k] = mu
            m2[k] = ((v - mu[:, None]) ** 2).sum(axis=1)
        return cls(dict(series.config), np.asarray(series.t).copy(), series.n_runs, mean, m2)

    def merge(self, other: "Accumulator") -> "Accumulator":
        _check_compatible(self.config, self.t, other.config, other.t)
        n = self.n + other.n
        mean, m2 = {}, {}
        for k in self.mean:
            delta = other.mean[k] - self.mean[k]
            mean[k] = self.mean[k] + delta * (other.n / n)
            m2[k] = self.m2[k] + other.m2[k] + delta * delta * (self.n * other.n / n)
        return Accumulator(dict(self.config), self.t.copy(), n, mean, m2)

    def finalize(self) -> "EnsembleSeries":
        if self.n >= 2:
            se = {k: np.sqrt(v / (self.n - 1) / self.n) for k, v in self.m2.items()}
        else:
            se = {k: np.zeros_like(v) for k, v in self.m2.items()}
        v = velocity(self.t, self.mean["mean_height"]) if len(self.t) else np.empty(0)
        return EnsembleSeries(
            config=dict(self.config),
            n_runs=self.n,
            t=self.t.copy(),
            mean=dict(self.mean),
            se=se,
            velocity=v,
            se_defined=self.n >= 2,
        )


@dataclass
class EnsembleSeries:
    """Per-attempt ensemble means and standard errors.

    With a single run the standard errors are reported as zeros and
    ``se_defined`` is False.
    """

    config: dict
    n_runs: int
    t: np.ndarray
    mean: dict[str, np.ndarray]
    se: dict[str, np.ndarray]
    velocity: np.ndarray
    se_defined: bool = True
    extra: dict[str, np.ndarray] = field(default_factory=dict)

    def window(self, t_lo, t_hi) -> np.ndarray:
        """Boolean mask of records with ``t_lo <= t <= t_hi``."""
        return (self.t >= t_lo) & (self.t <= t_hi)

    def steady_mean(self, name: str, t_lo, t_hi) -> float:
        m = self.window(t_lo, t_hi)
        if name == "velocity":
            return float(np.mean(self.velocity[m]))
        return float(np.mean(self.mean[name][m]))


def aggregate(runs: RunSeries | Sequence[RunSeries]) -> EnsembleSeries:
    """Ensemble means and standard errors over every run supplied."""
    if isinstance(runs, RunSeries):
        runs = [runs]
    if not runs:
        raise ValueError("nothing to aggregate")
    acc = Accumulator.from_series(runs[0])
    for r in runs[1:]:
        acc = acc.merge(Accumulator.from_series(r))
    return acc.finalize()


def steady_state_window(t_max: int, t0_detected=None, t0_estimate=None) -> tuple[int, int]:
    """Averaging window ``[t_burn, t_max]`` for steady-state statistics.

    ``t_burn = max(t0_detected, 2 * t0_estimate)`` using whichever of the two
    is known.
    """
    cands = []
    if t0_detected is not None:
        cands.append(t0_detected)
    if t0_estimate is not None:
        cands.append(2 * t0_estimate)
    t_burn = int(np.ceil(max(cands))) if cands else 0
    if t_burn >= t_max:
        raise ValueError(f"burn-in {t_burn} leaves no steady-state window before t_max={t_max}")
    return t_burn, t_max


def histogram(update_counts, support: Mapping[int, float] | Sequence[int]) -> dict[int, float]:
    """Relative frequencies of the update counts over the given support."""
    p = np.asarray(update_counts).ravel()
    keys = list(support)
    return {k: float(np.mean(p == k)) for k in keys}
