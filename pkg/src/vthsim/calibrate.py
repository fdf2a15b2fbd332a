"""Measure the prefactors of the scaling laws and write ``data/calibration.json``.

    python -m vthsim.calibrate [--quick]

The prefactors are properties of this simulator, not published constants.
Saturation statistics come from unit-load rings of several sizes; the
values of the largest size are stored, the smaller ones are kept in the
file for reference.
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from . import __version__
from .conservative import ConservativeConfig, record_times, run
from .measurements import aggregate
from .scaling import detect_saturation, detect_t0

SIZES = (32, 64, 128, 256)
SEED = 20240917


def measure_prefactors(sizes=SIZES, runs: int = 100, t0_size: int = 1000, t0_runs: int = 100, seed: int = SEED) -> dict:
    per_size = []
    for L in sizes:
        t_max = int(40 * L**1.5)
        ts = record_times(t_max, max_gap=max(1, t_max // 1000))
        series = run(ConservativeConfig(L, 1), list(range(seed, seed + runs)), t_max, ts)
        ens = aggregate(series)
        t_x, plateau = detect_saturation(ts, ens.mean["width_sq"])
        tail = ts >= 0.8 * t_max
        w_mean = float(np.sqrt(series.data["width_sq"][tail]).mean())
        per_size.append(
            {
                "L": L,
                "runs": runs,
                "t_max": t_max,
                "w_sq_plateau": plateau,
                "w_plateau": w_mean,
                "t_cross": t_x,
                "width_prefactor": w_mean / np.sqrt(L),
                "crossover_prefactor": t_x / L**1.5,
            }
        )
    ts = np.arange(1, 2001)
    series = run(ConservativeConfig(t0_size, 1), list(range(seed, seed + t0_runs)), 2000, ts)
    ens = aggregate(series)
    t0 = detect_t0(ts, ens.mean["f_above"], ens.mean["f_at_or_below"])
    largest = per_size[-1]
    return {
        "version": __version__,
        "source": "artifact-derived: unit-load simulations by vthsim.calibrate",
        "seed": seed,
        "width_prefactor": largest["width_prefactor"],
        "crossover_prefactor": largest["crossover_prefactor"],
        "t0": float(t0) if t0 is not None else None,
        "t0_measurement": {"L": t0_size, "runs": t0_runs, "t_max": 2000},
        "per_size": per_size,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--quick", action="store_true", help="small sizes and ensembles (smoke test)")
    ap.add_argument("--output", type=Path, default=Path(__file__).parent / "data" / "calibration.json")
    args = ap.parse_args(argv)
    if args.quick:
        result = measure_prefactors(sizes=(16, 32), runs=20, t0_size=200, t0_runs=20)
    else:
        result = measure_prefactors()
    args.output.write_text(json.dumps(result, indent=2) + "\n")
    print(json.dumps({k: result[k] for k in ("width_prefactor", "crossover_prefactor", "t0")}, indent=2))


if __name__ == "__main__":
    main()
