"""Closed-form utilization, speedup and scaling estimates.

``L`` is the number of processors on the ring, ``N`` the load (volume
sites) per processor.  ``q(N) = sqrt(2/N)`` is the probability that an
update needs a neighbour's virtual time; ``q_bar = 1 - q``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

ALPHA = 0.5
BETA = 1.0 / 3.0
Z = 1.5
BETA_RD = 0.5

# exact rational arithmetic up to this L, log-gamma beyond
EXACT_L_MAX = 64


def _check_domain(L, N):
    if int(L) != L or L < 2:
        raise ValueError(f"L must be an integer >= 2, got {L}")
    if int(N) != N or N < 1:
        raise ValueError(f"N must be an integer >= 1, got {N}")


def q(N) -> float:
    """Communication probability; capped at 1 for the unit load, which always communicates."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return min(1.0, math.sqrt(2.0 / N))


def q_bar(N) -> float:
    return 1.0 - q(N)


def update_distribution(L: int, exact: bool | None = None) -> dict[int, float | Fraction]:
    """Steady-state probability of p updates per attempt at load N=1.

    ``P(p; L) = C(L-1, 2p-1) / 2**(L-2)`` for ``p = 1 .. L//2``.  Values are
    exact Fractions when ``exact`` (default for ``L <= 64``), floats
    otherwise.
    """
    if int(L) != L or L < 3:
        raise ValueError("the update distribution needs L >= 3")
    if exact is None:
        exact = L <= EXACT_L_MAX
    ps = range(1, L // 2 + 1)
    if exact:
        denom = 2 ** (L - 2)
        return {p: Fraction(math.comb(L - 1, 2 * p - 1), denom) for p in ps}
    logs = {
        p: math.lgamma(L) - math.lgamma(2 * p) - math.lgamma(L - 2 * p + 1) - (L - 2) * math.log(2.0)
        for p in ps
    }
    top = max(logs.values())
    w = {p: math.exp(v - top) for p, v in logs.items()}
    total = math.fsum(w.values())
    return {p: v / total for p, v in w.items()}


def utilization(L: int, N: int = 1) -> float:
    """Mean steady-state fraction of processors that advance per attempt."""
    _check_domain(L, N)
    if N == 1:
        return 0.5 if L == 2 else (L + 1) / (4.0 * L)
    if L == 2:
        return 0.5 if N == 2 else 1.0 - 1.0 / math.sqrt(2.0 * N)
    qq = q(N)
    return (1.0 - qq / 2.0) * (1.0 - (qq / 4.0) * (L - 1) / L)


def asymptotic_utilization(N: int = 1) -> float:
    """Limit of :func:`utilization` as L grows without bound."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N == 1:
        return 0.25
    qq = q(N)
    return (2.0 - qq) * (4.0 - qq) / 8.0


def speedup_linear(L: int, N: int) -> float:
    """Speedup for L >= 3, N >= 2 written as a linear function of L."""
    qq = q(N)
    return (L * (1.0 - qq / 4.0) + qq / 4.0) * (1.0 - qq / 2.0)


def speedup_quadratic(L: int, N: int) -> float:
    """The same speedup written as a quadratic in ``q_bar``."""
    qb = q_bar(N)
    return (L - 1) / 8.0 * (qb + 2.0 * L / (L - 1)) ** 2 - (L + 1) ** 2 / (8.0 * (L - 1))


def speedup(L: int, N: int = 1) -> float:
    """Mean speedup ``L * utilization``.

    At minimal load two or three processors only ever work alternately, so
    the speedup there is exactly 1.
    """
    _check_domain(L, N)
    if N == 1 and L in (2, 3):
        return 1.0
    return L * utilization(L, N)


def load_factor(N: int) -> float:
    """Effective load ``N/2``; loads 1 and 2 both behave as unit load."""
    return 1.0 if N <= 2 else N / 2.0


def collapse_transform(t, w_sq, L, N, alpha: float = ALPHA, z: float = Z):
    """Scaled coordinates of a width curve.

    ``x = t / (g L**z)`` and ``y = w_sq / (g L**(2 alpha))`` with
    ``g = N/2`` for N >= 2 and ``g = 1`` at N = 1.  Works elementwise on
    arrays.
    """
    if alpha <= 0 or z <= 0:
        raise ValueError("alpha and z must be positive")
    g = 1.0 if N == 1 else N / 2.0
    return t / (g * L**z), w_sq / (g * L ** (2.0 * alpha))


@dataclass(frozen=True)
class Calibration:
    """Prefactors of the scaling laws, measured from N=1 simulations."""

    width_prefactor: float  # saturated <w> / sqrt(L)
    crossover_prefactor: float  # t_x / L**1.5
    t0: float  # start-up time at unit load
    version: str = ""
    source: str = ""


@lru_cache(maxsize=1)
def calibration() -> Calibration:
    data = json.loads(resources.files("vthsim.data").joinpath("calibration.json").read_text())
    keep = {k: data[k] for k in ("width_prefactor", "crossover_prefactor", "t0", "version", "source")}
    return Calibration(**keep)


def calibration_hash() -> str:
    import hashlib

    raw = resources.files("vthsim.data").joinpath("calibration.json").read_bytes()
    return hashlib.sha256(raw).hexdigest()


def saturation_width_bound(L: int, N: int = 1, prefactor: float | None = None) -> float:
    """Saturated width ``c * sqrt(g(N)) * sqrt(L)``: the memory-request bound.

    Grows as ``sqrt(N L)``.  ``prefactor`` defaults to the calibrated value.
    """
    _check_domain(L, N)
    c = calibration().width_prefactor if prefactor is None else prefactor
    return c * math.sqrt(load_factor(N)) * math.sqrt(L)


def crossover_time_estimate(L: int, N: int = 1, prefactor: float | None = None, z: float = Z) -> float:
    """Time to saturation, ``c_x * g(N) * L**z``."""
    _check_domain(L, N)
    c = calibration().crossover_prefactor if prefactor is None else prefactor
    return c * load_factor(N) * L**z


def startup_time_estimate(N: int = 1, t0: float | None = None) -> float:
    """Time to the steady state at load N, scaled from the unit-load value."""
    if N < 1:
        raise ValueError("N must be >= 1")
    base = calibration().t0 if t0 is None else t0
    return base * load_factor(N)


@dataclass(frozen=True)
class TheoryPrediction:
    L: int
    N: int
    utilization: float
    speedup: float
    q: float
    q_bar: float
    asymptotic_utilization: float
    saturation_width: float
    crossover_time: float
    startup_time: float

    def as_dict(self) -> dict:
        return asdict(self)


def predict(L: int, N: int = 1) -> TheoryPrediction:
    _check_domain(L, N)
    qq = q(N)
    return TheoryPrediction(
        L=int(L),
        N=int(N),
        utilization=utilization(L, N),
        speedup=speedup(L, N),
        q=qq,
        q_bar=1.0 - qq,
        asymptotic_utilization=asymptotic_utilization(N),
        saturation_width=saturation_width_bound(L, N),
        crossover_time=crossover_time_estimate(L, N),
        startup_time=startup_time_estimate(N),
    )
