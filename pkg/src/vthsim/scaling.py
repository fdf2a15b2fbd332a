"""Exponents, characteristic times and data collapse of width curves."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from . import theory

MIN_FIT_POINTS = 8

# defaults recorded in output headers
T0_DELTA = 0.02
T0_PERSIST = 50
SATURATION_TAIL = 0.2
SATURATION_DRIFT = 0.1
SATURATION_LEVEL = 0.95


class AnalysisError(ValueError):
    pass


class NotSaturatedError(AnalysisError):
    pass


@dataclass(frozen=True)
class PowerLawFit:
    """``y ~ exp(intercept) * t**exponent`` fitted in log-log space."""

    exponent: float
    intercept: float
    stderr: float
    window: tuple[float, float]
    n_points: int

    def as_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def fit_power_law(t, y, window: tuple[float, float] | None = None) -> PowerLawFit:
    """Least-squares slope of ``log y`` against ``log t`` inside ``window``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is None:
        window = (float(t.min()), float(t.max()))
    lo, hi = window
    if not lo < hi:
        raise AnalysisError(f"empty fit window {window}")
    m = (t >= lo) & (t <= hi)
    tw, yw = t[m], y[m]
    if tw.size < MIN_FIT_POINTS:
        raise AnalysisError(f"fit window {window} holds {tw.size} points, need {MIN_FIT_POINTS}")
    if np.any(tw <= 0) or np.any(yw <= 0):
        raise AnalysisError("power-law fit needs positive t and y")
    res = stats.linregress(np.log(tw), np.log(yw))
    return PowerLawFit(float(res.slope), float(res.intercept), float(res.stderr), (float(lo), float(hi)), int(tw.size))


def detect_t0(t, f_above, f_at_or_below, delta: float = T0_DELTA, persist: int = T0_PERSIST):
    """Start of the steady state from the two characteristic densities.

    Returns the first recorded time after which ``|f_above - f_at_or_below|``
    stays below ``delta`` for ``persist`` attempts, or None when that never
    happens within the series.  A series that is balanced from its first
    record returns 0.
    """
    t = np.asarray(t)
    gap = np.abs(np.asarray(f_above) - np.asarray(f_at_or_below))
    ok = gap < delta
    if t.size == 0:
        return None
    # next index at or after i where the gap is too wide
    bad_next = np.full(t.size + 1, t.size)
    for i in range(t.size - 1, -1, -1):
        bad_next[i] = bad_next[i + 1] if ok[i] else i
    for i in range(t.size):
        if not ok[i]:
            continue
        end = t[i] + persist
        if end > t[-1]:
            return None
        j = bad_next[i]
        if j == t.size or t[j] > end:
            return 0 if i == 0 else int(t[i])
    return None


def detect_saturation(
    t,
    w_sq,
    tail: float = SATURATION_TAIL,
    drift: float = SATURATION_DRIFT,
    level: float = SATURATION_LEVEL,
) -> tuple[float, float]:
    """Crossover time and plateau of a saturating width curve.

    The plateau is the mean over the trailing ``tail`` fraction of the time
    span.  If a straight-line fit over that tail changes by more than
    ``drift`` (relative to the plateau) across the tail, the curve is still
    growing and :class:`NotSaturatedError` is raised.  The crossover time
    is the first time the curve reaches ``level`` times the plateau; a curve
    already there at its first record gives 0.
    """
    t = np.asarray(t, dtype=float)
    w = np.asarray(w_sq, dtype=float)
    if t.size < MIN_FIT_POINTS:
        raise AnalysisError("series too short for saturation detection")
    span = t[-1] - t[0]
    m = t >= t[-1] - tail * span
    if m.sum() < 2:
        raise AnalysisError("saturation tail holds fewer than two points")
    plateau = float(np.mean(w[m]))
    if plateau <= 0:
        raise NotSaturatedError("non-positive plateau")
    slope = np.polyfit(t[m], w[m], 1)[0]
    change = abs(slope) * (t[m][-1] - t[m][0]) / plateau
    if change > drift:
        raise NotSaturatedError(f"width still changes by {change:.3f} over the trailing window")
    i = int(np.argmax(w >= level * plateau))
    t_x = 0.0 if i == 0 else float(t[i])
    return t_x, plateau


@dataclass
class Curve:
    """A width curve tagged with its system size and load."""

    t: np.ndarray
    w_sq: np.ndarray
    L: int
    N: int = 1
    label: str = ""


def collapse_curves(family: Sequence[Curve], alpha: float = theory.ALPHA, z: float = theory.Z, t_min=None):
    """Transform every curve, keeping points later than its start-up time.

    ``t_min`` is either one cut-off for all curves or one per curve; by
    default nothing is cut.
    """
    if t_min is None or np.isscalar(t_min):
        t_min = [t_min] * len(family)
    out = []
    for c, tm in zip(family, t_min):
        t = np.asarray(c.t, dtype=float)
        w = np.asarray(c.w_sq, dtype=float)
        keep = (t > tm) if tm is not None else np.ones(t.shape, bool)
        keep &= (t > 0) & (w > 0)
        x, y = theory.collapse_transform(t[keep], w[keep], c.L, c.N, alpha, z)
        out.append((x, y))
    return out


def collapse_residual_xy(curves: Sequence[tuple[np.ndarray, np.ndarray]]) -> float:
    """Relative spread of already-transformed curves where they overlap.

    All curves are interpolated (linearly in log-log) onto the union of
    their log-x points.  At every grid point covered by two or more curves
    the spread is the standard deviation of the values over their mean;
    the residual is the root mean square of these spreads.
    """
    if len(curves) < 2:
        raise AnalysisError("collapse needs at least two curves")
    logs = []
    for x, y in curves:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size < 2:
            raise AnalysisError("every curve needs at least two points")
        order = np.argsort(x)
        logs.append((np.log(x[order]), np.log(y[order])))
    grid = np.unique(np.concatenate([lx for lx, _ in logs]))
    vals = np.full((len(logs), grid.size), np.nan)
    for i, (lx, ly) in enumerate(logs):
        inside = (grid >= lx[0]) & (grid <= lx[-1])
        vals[i, inside] = np.exp(np.interp(grid[inside], lx, ly))
    covered = np.sum(~np.isnan(vals), axis=0) >= 2
    if not covered.any():
        raise AnalysisError("transformed curves do not overlap")
    v = vals[:, covered]
    spread = np.nanstd(v, axis=0) / np.nanmean(v, axis=0)
    return float(np.sqrt(np.mean(spread**2)))


def collapse_residual(family: Sequence[Curve], alpha: float = theory.ALPHA, z: float = theory.Z, t_min=None) -> float:
    """Collapse quality of a family of width curves under the given exponents."""
    return collapse_residual_xy(collapse_curves(family, alpha, z, t_min))


def fit_exponent_vs_size(sizes, values) -> PowerLawFit:
    """Power law of a per-size quantity (plateau width, crossover time) in L.

    Uses every supplied size; at least two are required.
    """
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if sizes.size < 2:
        raise AnalysisError("need at least two system sizes")
    if np.any(sizes <= 0) or np.any(values <= 0):
        raise AnalysisError("power-law fit needs positive data")
    res = stats.linregress(np.log(sizes), np.log(values))
    se = float(res.stderr) if sizes.size > 2 else 0.0
    return PowerLawFit(float(res.slope), float(res.intercept), se, (float(sizes.min()), float(sizes.max())), int(sizes.size))


def default_growth_window(t, t0=None, t_cross=None) -> tuple[float, float]:
    """``[3 t0, t_x / 3]``, falling back to the series ends when unknown."""
    t = np.asarray(t, dtype=float)
    lo = 3.0 * t0 if t0 else float(t.min())
    hi = t_cross / 3.0 if t_cross else float(t.max())
    n = int(np.sum((t >= lo) & (t <= hi)))
    if n < MIN_FIT_POINTS:
        raise AnalysisError(f"growth window [{lo:g}, {hi:g}] holds {n} points, need {MIN_FIT_POINTS}")
    return lo, hi
