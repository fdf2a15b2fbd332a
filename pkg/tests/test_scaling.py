import math

import numpy as np
import pytest

from vthsim import scaling
from vthsim.scaling import (
    AnalysisError,
    Curve,
    NotSaturatedError,
    collapse_residual,
    detect_saturation,
    detect_t0,
    fit_exponent_vs_size,
    fit_power_law,
    default_growth_window,
)


def test_fit_linear_is_exact():
    t = np.arange(1.0, 50.0)
    fit = fit_power_law(t, t)
    assert fit.exponent == pytest.approx(1.0, abs=1e-12)
    assert fit.stderr == pytest.approx(0.0, abs=1e-12)


def test_fit_prefactor():
    t = np.geomspace(1, 1e4, 30)
    fit = fit_power_law(t, 4 * t**0.5)
    assert fit.exponent == pytest.approx(0.5, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(4), abs=1e-12)


def test_fit_window_and_errors():
    t = np.arange(1.0, 101.0)
    y = np.where(t < 50, t, t**2)
    assert fit_power_law(t, y, (60, 100)).exponent == pytest.approx(2.0)
    with pytest.raises(AnalysisError):
        fit_power_law(t, y, (10, 15))
    with pytest.raises(AnalysisError):
        fit_power_law(t, -y)
    with pytest.raises(AnalysisError):
        fit_power_law(t, y, (50, 50))


def test_detect_t0_balanced_from_start():
    t = np.arange(1, 201)
    half = np.full(t.shape, 0.5)
    assert detect_t0(t, half, half) == 0


def test_detect_t0_never_closes():
    t = np.arange(1, 201)
    assert detect_t0(t, np.full(200, 0.2), np.full(200, 0.8)) is None


def test_detect_t0_crossing():
    t = np.arange(1, 301)
    gap = np.where(t < 100, 0.3, 0.0)
    assert detect_t0(t, 0.5 + gap / 2, 0.5 - gap / 2) == 100


def test_detect_t0_requires_full_persistence():
    t = np.arange(1, 121)
    gap = np.where(t < 100, 0.3, 0.0)
    assert detect_t0(t, 0.5 + gap / 2, 0.5 - gap / 2) is None


def test_detect_saturation_constant():
    t = np.arange(1.0, 101.0)
    assert detect_saturation(t, np.full(100, 3.0)) == (0.0, 3.0)


def test_detect_saturation_power_law_fails():
    t = np.arange(1.0, 1001.0)
    with pytest.raises(NotSaturatedError):
        detect_saturation(t, t ** (2 / 3))
    with pytest.raises(NotSaturatedError):
        detect_saturation(t, t**0.5)


def test_detect_saturation_crossover():
    t = np.arange(1.0, 2001.0)
    w = 10 * (1 - np.exp(-t / 100))
    t_x, plateau = detect_saturation(t, w)
    assert plateau == pytest.approx(10.0, rel=1e-6)
    assert t_x == pytest.approx(-100 * math.log(0.05), abs=1.0)


def test_collapse_identical_curves():
    t = np.arange(1.0, 200.0)
    c = Curve(t, t**0.6, 50, 1)
    assert collapse_residual([c, c]) == 0.0


def test_collapse_family_scaling():
    # an exact Family-Vicsek family collapses only with its own exponents
    def fv(L, t):
        return L * (1 - np.exp(-t / L**1.5))

    t = np.geomspace(1, 1e5, 200)
    fam = [Curve(t, fv(L, t), L) for L in (64, 128, 256)]
    good = collapse_residual(fam, 0.5, 1.5)
    bad = collapse_residual(fam, 1.0, 1.0)
    assert good < 1e-3 < bad


def test_collapse_cutoff_and_overlap():
    t = np.arange(1.0, 100.0)
    a = Curve(t, t, 10)
    b = Curve(t + 1000, t, 10)
    with pytest.raises(AnalysisError):
        collapse_residual([a, b])
    with pytest.raises(AnalysisError):
        collapse_residual([a])
    cut = scaling.collapse_curves([a, a], t_min=[50, None])
    assert cut[0][0].size == 49 and cut[1][0].size == 99


def test_fit_exponent_vs_size():
    L = np.array([16, 32, 64, 128])
    fit = fit_exponent_vs_size(L, 0.3 * L**1.5)
    assert fit.exponent == pytest.approx(1.5)
    with pytest.raises(AnalysisError):
        fit_exponent_vs_size([16], [1.0])


def test_default_growth_window():
    t = np.arange(1.0, 1001.0)
    assert default_growth_window(t, 10, 900) == (30.0, 300.0)
    assert default_growth_window(t) == (1.0, 1000.0)
    with pytest.raises(AnalysisError):
        default_growth_window(t, 100, 600)


def test_fit_as_dict():
    t = np.arange(1.0, 20.0)
    d = fit_power_law(t, t**2).as_dict()
    assert d["window"] == [1.0, 19.0] and d["n_points"] == 19
