"""Reading and writing ensemble time series.

Files are CSV preceded by ``#`` header lines of the form ``# key: value``
(values are JSON).  Floats are written with 17 significant digits so a
written series reads back bit for bit.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
from pathlib import Path

import numpy as np

from . import __version__
from .measurements import EnsembleSeries

# column -> (kind, field); kind "mean", "se" or "velocity"
CONSERVATIVE_COLUMNS = {
    "t": ("t", None),
    "u_mean": ("mean", "utilization"),
    "u_se": ("se", "utilization"),
    "w2_mean": ("mean", "width_sq"),
    "w2_se": ("se", "width_sq"),
    "f_above": ("mean", "f_above"),
    "f_below": ("mean", "f_at_or_below"),
    "gvt_mean": ("mean", "gvt"),
    "hbar_mean": ("mean", "mean_height"),
    "v_mean": ("velocity", None),
}
OPTIMISTIC_COLUMNS = {
    **CONSERVATIVE_COLUMNS,
    "eff_opt": ("mean", "efficiency"),
    "w2_opt": ("mean", "width_sq_optimistic"),
    "w2_progress": ("mean", "width_sq_progress"),
}


def columns_for(protocol: str) -> dict:
    return OPTIMISTIC_COLUMNS if protocol == "optimistic" else CONSERVATIVE_COLUMNS


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def header_lines(meta: dict) -> list[str]:
    return [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in meta.items()]


def base_header(config: dict, seed, extra: dict | None = None) -> dict:
    from .theory import calibration_hash

    meta = {
        "vthsim_version": __version__,
        "config": config,
        "base_seed": seed,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "calibration_sha256": calibration_hash(),
    }
    if extra:
        meta.update(extra)
    return meta


def write_series(path, ens: EnsembleSeries, meta: dict) -> Path:
    """Write an ensemble series with the given header block."""
    path = Path(path)
    cols = columns_for(ens.config.get("protocol", "conservative"))
    meta = dict(meta)
    meta.setdefault("n_runs", ens.n_runs)
    meta.setdefault("se_defined", ens.se_defined)
    with path.open("w", newline="") as fh:
        for line in header_lines(meta):
            fh.write(line + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(cols))
        for i, t in enumerate(ens.t):
            row = []
            for kind, name in cols.values():
                if kind == "t":
                    row.append(_fmt(t))
                elif kind == "velocity":
                    row.append(_fmt(ens.velocity[i]))
                else:
                    row.append(_fmt(getattr(ens, kind)[name][i]))
            w.writerow(row)
    return path


def read_header(path) -> dict:
    meta = {}
    with Path(path).open() as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(":")
            try:
                meta[key.strip()] = json.loads(value)
            except json.JSONDecodeError:
                meta[key.strip()] = value.strip()
    return meta


def read_series(path) -> tuple[EnsembleSeries, dict]:
    """Parse a series file.  Only the ``t`` column is mandatory.

    Columns absent from the file are absent from the returned series.
    """
    path = Path(path)
    meta = read_header(path)
    with path.open() as fh:
        body = [line for line in fh if not line.startswith("#") and line.strip()]
    if not body:
        raise ValueError(f"{path}: no column header")
    reader = csv.reader(body)
    names = next(reader)
    rows = list(reader)
    if "t" not in names:
        raise ValueError(f"{path}: missing 't' column")
    try:
        table = np.array([[float(x) for x in r] for r in rows], dtype=float).reshape(len(rows), len(names))
    except ValueError as exc:
        raise ValueError(f"{path}: malformed row ({exc})") from None
    known = OPTIMISTIC_COLUMNS
    mean, se, vel = {}, {}, None
    t = table[:, names.index("t")].astype(np.int64)
    for j, col in enumerate(names):
        if col == "t" or col not in known:
            continue
        kind, name = known[col]
        if kind == "mean":
            mean[name] = table[:, j]
        elif kind == "se":
            se[name] = table[:, j]
        else:
            vel = table[:, j]
    config = meta.get("config") or {}
    ens = EnsembleSeries(
        config=config,
        n_runs=int(meta.get("n_runs", 1)),
        t=t,
        mean=mean,
        se=se,
        velocity=vel if vel is not None else np.full(t.shape, np.nan),
        se_defined=bool(meta.get("se_defined", True)),
    )
    return ens, meta
