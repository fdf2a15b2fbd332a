import numpy as np
import pytest

from vthsim.conservative import ConservativeConfig, record_times
from vthsim.ensemble import make_config, plateau_mean_width, simulate, simulate_ensemble
from vthsim.optimistic import OptimisticConfig
from vthsim.output import CONSERVATIVE_COLUMNS, OPTIMISTIC_COLUMNS, base_header, read_header, read_series, write_series


def test_make_config():
    assert make_config("conservative", 10, 3) == ConservativeConfig(10, 3)
    assert make_config("optimistic", 10) == OptimisticConfig(10)
    with pytest.raises(ValueError):
        make_config("lazy", 10)


def test_jobs_do_not_change_values():
    cfg = ConservativeConfig(16, 2)
    a = simulate(cfg, 6, 100, 50, batch=2, jobs=1)
    b = simulate(cfg, 6, 100, 50, batch=2, jobs=2)
    assert a.seeds == b.seeds == list(range(100, 106))
    for k in a.data:
        assert np.array_equal(a.data[k], b.data[k])


def test_plateau_mean_width():
    _, series = simulate_ensemble(ConservativeConfig(8, 1), 4, 0, 400)
    w = plateau_mean_width(series)
    assert 0 < w < 5


@pytest.mark.parametrize("protocol", ["conservative", "optimistic"])
def test_csv_round_trip_is_exact(tmp_path, protocol):
    cfg = make_config(protocol, 12, 1)
    ens, _ = simulate_ensemble(cfg, 5, 3, 1200, record_times(1200))
    path = write_series(tmp_path / "s.csv", ens, base_header(cfg.as_dict(), 3, {"t_max": 1200}))
    back, meta = read_series(path)
    assert meta["base_seed"] == 3 and meta["config"] == cfg.as_dict()
    assert back.n_runs == 5 and back.se_defined
    assert np.array_equal(back.t, ens.t)
    assert np.array_equal(back.velocity, ens.velocity)
    cols = OPTIMISTIC_COLUMNS if protocol == "optimistic" else CONSERVATIVE_COLUMNS
    for kind, name in cols.values():
        if kind == "mean":
            assert np.array_equal(back.mean[name], ens.mean[name])
        elif kind == "se":
            assert np.array_equal(back.se[name], ens.se[name])


def test_header_fields(tmp_path):
    cfg = ConservativeConfig(4, 1)
    ens, _ = simulate_ensemble(cfg, 1, 0, 5)
    path = write_series(tmp_path / "h.csv", ens, base_header(cfg.as_dict(), 0))
    meta = read_header(path)
    for key in ("vthsim_version", "config", "base_seed", "timestamp", "calibration_sha256"):
        assert key in meta
    assert meta["se_defined"] is False
    first = path.read_text().splitlines()[0]
    assert first.startswith("# ")


def test_read_minimal_file(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("t,w2_mean\n1,1\n2,4\n")
    ens, meta = read_series(p)
    assert meta == {}
    assert ens.mean["width_sq"].tolist() == [1.0, 4.0]
    assert np.all(np.isnan(ens.velocity))


def test_read_malformed(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("w2_mean\n1\n")
    with pytest.raises(ValueError):
        read_series(p)
    p.write_text("t,w2_mean\n1,x\n")
    with pytest.raises(ValueError):
        read_series(p)
