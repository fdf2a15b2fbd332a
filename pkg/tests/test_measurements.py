import numpy as np
import pytest

from vthsim.conservative import ConservativeConfig, new_flat, run
from vthsim.measurements import (
    Accumulator,
    RunSeries,
    aggregate,
    characteristic_densities,
    efficiency_conservative,
    gvt,
    histogram,
    measure,
    steady_state_window,
    velocity,
    width_squared,
)


@pytest.mark.parametrize("h, w2", [([0.0] * 6, 0.0), ([0, 2], 1.0), ([1, 2, 3, 4], 1.25)])
def test_width_squared(h, w2):
    assert width_squared(np.array(h, float)) == pytest.approx(w2)


@pytest.mark.parametrize("h, f", [([0.0] * 5, (0.0, 1.0)), ([0, 2], (0.5, 0.5)), ([0, 0, 3], (1 / 3, 2 / 3))])
def test_densities(h, f):
    above, below = characteristic_densities(np.array(h, float))
    assert (above, below) == pytest.approx(f)


def test_gvt():
    assert gvt(np.zeros(4)) == 0.0
    assert gvt(np.array([3.0, 1.0, 2.0])) == 1.0


def test_measure_batch_shapes():
    h = np.array([[0.0, 2.0], [1.0, 1.0]])
    m = measure(h, np.array([[True, False], [True, True]]))
    assert m["width_sq"].tolist() == [1.0, 0.0]
    assert m["utilization"].tolist() == [0.5, 1.0]
    assert m["update_count"].tolist() == [1, 2]
    assert np.all(m["f_above"] + m["f_at_or_below"] == 1.0)


def test_velocity_flat_start_and_blocked_attempt():
    v = velocity([1, 2, 3], [0.9, 0.9, 1.4])
    assert v.tolist() == pytest.approx([0.9, 0.0, 0.5])
    assert np.isnan(velocity([1, 2], [1.0, 2.0], start=None)[0])
    with pytest.raises(ValueError):
        velocity([0, 1], [0.0, 1.0])


def test_velocity_secant_on_thinned_grid():
    assert velocity([10, 20], [5.0, 9.0]).tolist() == pytest.approx([0.5, 0.4])


def test_first_step_velocity_is_mean_increment():
    s = new_flat(ConservativeConfig(50, 1), 9)
    s.step()
    assert velocity([1], [s.heights.mean()])[0] == pytest.approx(s.heights.mean())
    assert s.efficiency() == pytest.approx(s.heights.mean())


def test_efficiency_requires_attempts():
    with pytest.raises(ValueError):
        efficiency_conservative(np.zeros(3), 0)
    assert efficiency_conservative(np.array([2.0, 4.0]), 2) == pytest.approx(1.5)


def test_single_run_aggregate():
    series = run(ConservativeConfig(8, 1), 1, 30)
    ens = aggregate(series)
    assert ens.n_runs == 1 and not ens.se_defined
    for k, v in series.data.items():
        assert np.array_equal(ens.mean[k], v[:, 0].astype(float))
        assert np.all(ens.se[k] == 0)


def test_identical_runs_have_zero_variance():
    series = run(ConservativeConfig(8, 2), [5, 5, 5], 30)
    ens = aggregate(series)
    assert ens.se_defined
    for v in ens.se.values():
        assert np.allclose(v, 0.0, atol=1e-15)


def test_standard_error_matches_numpy():
    series = run(ConservativeConfig(8, 1), list(range(7)), 25)
    ens = aggregate(series)
    w = series.data["width_sq"]
    assert np.allclose(ens.mean["width_sq"], w.mean(axis=1), rtol=1e-13)
    assert np.allclose(ens.se["width_sq"], w.std(axis=1, ddof=1) / np.sqrt(7), rtol=1e-10)


def test_merge_rejects_mismatched_configs():
    a = Accumulator.from_series(run(ConservativeConfig(8, 1), 0, 5))
    b = Accumulator.from_series(run(ConservativeConfig(9, 1), 0, 5))
    with pytest.raises(ValueError):
        a.merge(b)


def test_run_series_select_and_records():
    series = run(ConservativeConfig(6, 1), [1, 2, 3], 4)
    sub = series.select([2])
    assert sub.seeds == [3]
    recs = list(sub.records(0))
    assert [r.t for r in recs] == [1, 2, 3, 4]
    assert recs[0].update_count == 6
    joined = RunSeries.concat([series.select([0]), series.select([1, 2])])
    for k in series.data:
        assert np.array_equal(joined.data[k], series.data[k])


def test_conservative_invariants_over_a_run():
    series = run(ConservativeConfig(40, 1), [0, 1], 300)
    d = series.data
    assert np.all(d["width_sq"] >= 0)
    assert np.all(d["f_above"] < 1)
    assert np.all(d["gvt"] <= d["mean_height"] + 1e-12)
    assert np.all(d["update_count"] >= 1)
    assert np.array_equal(d["utilization"], d["update_count"] / 40)


def test_steady_state_window():
    assert steady_state_window(2000, 150, 163) == (326, 2000)
    assert steady_state_window(2000, 900, 163) == (900, 2000)
    with pytest.raises(ValueError):
        steady_state_window(100, 200)


def test_histogram():
    h = histogram([1, 1, 2, 1], {1: 0.75, 2: 0.25})
    assert h == {1: 0.75, 2: 0.25}


def test_velocity_tracks_utilization_in_steady_state():
    ts = np.arange(1, 1501)
    ens = aggregate(run(ConservativeConfig(200, 1), list(range(60)), 1500, ts))
    m = ens.window(500, 1500)
    v = ens.velocity[m].mean()
    u = ens.mean["utilization"][m].mean()
    assert abs(v - u) / u < 0.02
