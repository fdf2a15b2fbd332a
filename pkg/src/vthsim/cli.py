"""Command-line front end.

    vthsim run --protocol conservative -L 100 -N 1 -t 2000 -R 800 --seed 7
    vthsim theory -L 2 3 10:100:10 1000 -N 1 2 10
    vthsim exponents runs/*.csv --alpha
    vthsim collapse a.csv b.csv --alpha 0.5 --z 1.5

Exit codes: 0 success, 1 runtime failure, 2 usage error.  The default
output directory is taken from ``$VTHSIM_OUTPUT_DIR`` (else the current
directory).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import scaling, theory
from .conservative import record_times
from .ensemble import make_config, simulate_ensemble
from .output import base_header, read_series, write_series

OUTPUT_DIR_ENV = "VTHSIM_OUTPUT_DIR"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    protocol: str = "conservative"
    L: int = 100
    N: int | None = None
    N_c: int | None = None
    t_max: int = 1000
    runs: int = 800
    seed: int = 0
    output: str | None = None
    stride: int | None = None
    jobs: int = 1
    thresholds: dict = field(
        default_factory=lambda: {
            "t0_delta": scaling.T0_DELTA,
            "t0_persist": scaling.T0_PERSIST,
            "saturation_tail": scaling.SATURATION_TAIL,
            "saturation_drift": scaling.SATURATION_DRIFT,
            "saturation_level": scaling.SATURATION_LEVEL,
        }
    )

    def validate(self):
        if self.protocol not in ("conservative", "optimistic"):
            raise UsageError(f"unknown protocol {self.protocol!r}")
        if self.L < 2:
            raise UsageError("L must be ≥ 2")
        if self.protocol == "conservative":
            if self.N_c is not None:
                raise UsageError("--Nc applies to the optimistic protocol only")
            if self.N is None:
                self.N = 1
            if self.N < 1:
                raise UsageError("N must be ≥ 1")
        else:
            if self.N is not None:
                raise UsageError("-N applies to the conservative protocol only; use --Nc")
            if self.N_c is None:
                self.N_c = 1
            if self.N_c != 1:
                raise UsageError("only N_c = 1 is supported")
        if self.t_max < 1:
            raise UsageError("t_max must be ≥ 1")
        if self.runs < 1:
            raise UsageError("runs must be ≥ 1")
        if self.stride is not None and self.stride < 1:
            raise UsageError("stride must be ≥ 1")
        if self.jobs < 1:
            raise UsageError("jobs must be ≥ 1")
        return self

    @property
    def load(self) -> int:
        return self.N if self.protocol == "conservative" else self.N_c

    def default_name(self) -> str:
        tag = f"N{self.N}" if self.protocol == "conservative" else f"Nc{self.N_c}"
        return f"{self.protocol}_L{self.L}_{tag}_t{self.t_max}_R{self.runs}_s{self.seed}.csv"


def _output_path(name: str | None, default: str) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    if name is None:
        return base / default
    p = Path(name)
    return p if p.is_absolute() or p.parent != Path(".") else base / p


def cmd_run(cfg: RunConfig) -> Path:
    cfg.validate()
    config = make_config(cfg.protocol, cfg.L, cfg.load)
    times = record_times(cfg.t_max, cfg.stride)
    ens, _ = simulate_ensemble(config, cfg.runs, cfg.seed, cfg.t_max, times, jobs=cfg.jobs)
    path = _output_path(cfg.output, cfg.default_name())
    path.parent.mkdir(parents=True, exist_ok=True)
    recording = {"stride": cfg.stride} if cfg.stride else {"dense_until": 1000, "factor": 1.02}
    meta = base_header(
        config.as_dict(),
        cfg.seed,
        {"t_max": cfg.t_max, "n_runs": cfg.runs, "recording": recording, "thresholds": cfg.thresholds, "run_config": asdict(cfg)},
    )
    write_series(path, ens, meta)
    return path


def _parse_int_ranges(tokens) -> list[int]:
    out = []
    for tok in tokens:
        parts = str(tok).split(":")
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise UsageError(f"not an integer or range: {tok!r}") from None
        if len(nums) == 1:
            out.append(nums[0])
        elif len(nums) in (2, 3):
            step = nums[2] if len(nums) == 3 else 1
            if step < 1:
                raise UsageError(f"bad range step in {tok!r}")
            out.extend(range(nums[0], nums[1] + 1, step))
        else:
            raise UsageError(f"bad range {tok!r}")
    return out


THEORY_COLUMNS = ("L", "N", "utilization", "speedup", "q", "q_bar", "u_asymptotic", "w_saturation", "t_cross", "t0", "note")


def theory_rows(Ls, Ns) -> list[dict]:
    rows = []
    for L in Ls:
        for N in Ns:
            try:
                p = theory.predict(L, N)
            except ValueError as exc:
                rows.append({"L": L, "N": N, "note": f"out of domain: {exc}"})
                continue
            rows.append(
                {
                    "L": L,
                    "N": N,
                    "utilization": p.utilization,
                    "speedup": p.speedup,
                    "q": p.q,
                    "q_bar": p.q_bar,
                    "u_asymptotic": p.asymptotic_utilization,
                    "w_saturation": p.saturation_width,
                    "t_cross": p.crossover_time,
                    "t0": p.startup_time,
                    "note": "",
                }
            )
    return rows


def cmd_theory(Ls, Ns, output=None, stream=None) -> list[dict]:
    stream = sys.stdout if stream is None else stream
    rows = theory_rows(Ls, Ns)
    if output:
        path = _output_path(output, output)
        with path.open("w") as fh:
            fh.write(f"# calibration_sha256: {json.dumps(theory.calibration_hash())}\n")
            fh.write(",".join(THEORY_COLUMNS) + "\n")
            for r in rows:
                fh.write(",".join("" if r.get(c) is None else str(r.get(c, "")) for c in THEORY_COLUMNS) + "\n")
    widths = (6, 6, 13, 12, 9, 9, 14, 14, 10, 9)
    print("".join(f"{c:>{w}}" for c, w in zip(THEORY_COLUMNS, widths)) + "  note", file=stream)
    for r in rows:
        if r.get("note"):
            print(f"{r['L']:>6}{r['N']:>6}  {r['note']}", file=stream)
            continue
        print(
            f"{r['L']:>6}{r['N']:>6}{r['utilization']:>13.6f}{r['speedup']:>12.4f}{r['q']:>9.4f}"
            f"{r['q_bar']:>9.4f}{r['u_asymptotic']:>14.4f}{r['w_saturation']:>14.3f}{r['t_cross']:>10.1f}{r['t0']:>9.1f}",
            file=stream,
        )
    return rows


def _exponent_entry(fit) -> dict:
    # w2 grows as t**(2 beta)
    return {"value": fit.exponent / 2, "stderr": fit.stderr / 2, "window": list(fit.window), "n_points": fit.n_points}


def _series_report(ens, meta, growth_window=None, early_window=None) -> dict:
    cfg = ens.config or {}
    L = cfg.get("L")
    N = cfg.get("N", 1)
    t = ens.t
    if "width_sq" not in ens.mean:
        raise ValueError("input has no w2_mean column")
    w2 = ens.mean["width_sq"]
    rep = {"L": L, "N": N, "n_points": int(t.size)}
    t0 = None
    if "f_above" in ens.mean and "f_at_or_below" in ens.mean:
        th = meta.get("thresholds") or {}
        t0 = scaling.detect_t0(
            t,
            ens.mean["f_above"],
            ens.mean["f_at_or_below"],
            th.get("t0_delta", scaling.T0_DELTA),
            th.get("t0_persist", scaling.T0_PERSIST),
        )
        rep["t0"] = t0 if t0 is not None else "not reached"
    try:
        t_x, plateau = scaling.detect_saturation(t, w2)
        rep["t_cross"] = t_x
        rep["w2_saturation"] = plateau
    except scaling.NotSaturatedError:
        t_x = None
        rep["t_cross"] = "not saturated"
    try:
        win = tuple(growth_window) if growth_window else scaling.default_growth_window(t, t0, t_x)
        fit = scaling.fit_power_law(t, w2, win)
        rep["beta"] = _exponent_entry(fit)
    except scaling.AnalysisError as exc:
        rep["beta"] = {"error": str(exc)}
    if N is not None and N >= 3:
        if early_window:
            ew = tuple(early_window)
        elif t0:
            ew = (float(t[0]), t0 / 2)
        else:
            ew = None
        if ew is None:
            rep["beta0"] = {"error": "no early window (t0 not reached)"}
        else:
            try:
                rep["beta0"] = _exponent_entry(scaling.fit_power_law(t, w2, ew))
            except scaling.AnalysisError as exc:
                rep["beta0"] = {"error": str(exc)}
    return rep


def cmd_exponents(paths, growth_window=None, early_window=None, want_alpha=False) -> dict:
    loaded = [read_series(p) for p in paths]
    if want_alpha and len({(ens.config or {}).get("L") for ens, _ in loaded}) < 2:
        raise UsageError("α needs ≥ 2 system sizes")
    reports = []
    for path, (ens, meta) in zip(paths, loaded):
        rep = _series_report(ens, meta, growth_window, early_window)
        rep["file"] = str(path)
        reports.append(rep)
    out = {"series": reports}
    sat = [r for r in reports if isinstance(r.get("t_cross"), float) and r.get("L")]
    sizes = sorted({r["L"] for r in sat})
    if len(sizes) >= 2:
        Ls = [r["L"] for r in sat]
        fa = scaling.fit_exponent_vs_size(Ls, [r["w2_saturation"] for r in sat])
        out["alpha"] = {"value": fa.exponent / 2, "stderr": fa.stderr / 2, "sizes": Ls}
        tx = [(r["L"], r["t_cross"]) for r in sat if r["t_cross"] > 0]
        if len({L for L, _ in tx}) >= 2:
            fz = scaling.fit_exponent_vs_size([L for L, _ in tx], [v for _, v in tx])
            out["z"] = {"value": fz.exponent, "stderr": fz.stderr, "sizes": [L for L, _ in tx]}
    elif want_alpha:
        raise UsageError("α needs ≥ 2 system sizes with saturated widths")
    return out


def _default_t_min(N) -> float:
    return theory.startup_time_estimate(N or 1)


def cmd_collapse(paths, alpha=theory.ALPHA, z=theory.Z, t_min="auto", output=None):
    if len(paths) < 2:
        raise UsageError("collapse needs at least two input series")
    family, cuts = [], []
    for p in paths:
        ens, _ = read_series(p)
        cfg = ens.config or {}
        if "L" not in cfg:
            raise ValueError(f"{p}: header lacks the system size")
        N = cfg.get("N", 1)
        family.append(scaling.Curve(ens.t, ens.mean["width_sq"], cfg["L"], N, str(p)))
        if t_min == "auto":
            cuts.append(_default_t_min(N))
        elif t_min in (None, "none"):
            cuts.append(None)
        else:
            cuts.append(float(t_min))
    curves = scaling.collapse_curves(family, alpha, z, cuts)
    residual = scaling.collapse_residual_xy(curves)
    path = None
    if output is not None:
        path = _output_path(output, output)
        meta = {
            "alpha": alpha,
            "z": z,
            "residual": residual,
            "t_min": [c if c is None else float(c) for c in cuts],
            "inputs": [str(p) for p in paths],
            "calibration_sha256": theory.calibration_hash(),
        }
        with path.open("w") as fh:
            for k, v in meta.items():
                fh.write(f"# {k}: {json.dumps(v)}\n")
            fh.write("curve,L,N,x,y\n")
            for i, (c, (x, y)) in enumerate(zip(family, curves)):
                for xi, yi in zip(x, y):
                    fh.write(f"{i},{c.L},{c.N},{xi:.17g},{yi:.17g}\n")
    return residual, path


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vthsim", description="Virtual-time horizon simulations on a ring.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate an ensemble and write its time series")
    r.add_argument("--protocol", choices=("conservative", "optimistic"), default="conservative")
    r.add_argument("-L", type=int, required=True, help="number of processors")
    r.add_argument("-N", type=int, help="load per processor (conservative)")
    r.add_argument("--Nc", dest="N_c", type=int, help="events per cycle (optimistic)")
    r.add_argument("-t", "--t-max", dest="t_max", type=int, default=1000)
    r.add_argument("-R", "--runs", type=int, default=800)
    r.add_argument("--seed", type=int, default=0, help="run i uses seed + i")
    r.add_argument("-o", "--output")
    r.add_argument("--stride", type=int, help="record every s-th attempt (default: dense then geometric)")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--t0-delta", type=float, default=scaling.T0_DELTA)
    r.add_argument("--t0-persist", type=int, default=scaling.T0_PERSIST)

    th = sub.add_parser("theory", help="print closed-form predictions")
    th.add_argument("-L", nargs="+", required=True, help="sizes or ranges a:b[:step]")
    th.add_argument("-N", nargs="+", default=["1"], help="loads or ranges a:b[:step]")
    th.add_argument("-o", "--output", help="also write the table as CSV")

    ex = sub.add_parser("exponents", help="fit exponents and characteristic times")
    ex.add_argument("inputs", nargs="+")
    ex.add_argument("--growth-window", nargs=2, type=float, metavar=("LO", "HI"))
    ex.add_argument("--early-window", nargs=2, type=float, metavar=("LO", "HI"))
    ex.add_argument("--alpha", action="store_true", help="require the roughness exponent")
    ex.add_argument("-o", "--output", help="write the JSON report here as well")

    co = sub.add_parser("collapse", help="scale a family of width curves onto one another")
    co.add_argument("inputs", nargs="+")
    co.add_argument("--alpha", type=float, default=theory.ALPHA)
    co.add_argument("--z", type=float, default=theory.Z)
    co.add_argument("--t-min", default="auto", help="'auto' (calibrated t0(N)), 'none', or a number")
    co.add_argument("-o", "--output")
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig(
                protocol=args.protocol,
                L=args.L,
                N=args.N,
                N_c=args.N_c,
                t_max=args.t_max,
                runs=args.runs,
                seed=args.seed,
                output=args.output,
                stride=args.stride,
                jobs=args.jobs,
            )
            cfg.thresholds["t0_delta"] = args.t0_delta
            cfg.thresholds["t0_persist"] = args.t0_persist
            print(cmd_run(cfg))
        elif args.command == "theory":
            cmd_theory(_parse_int_ranges(args.L), _parse_int_ranges(args.N), args.output)
        elif args.command == "exponents":
            report = cmd_exponents(args.inputs, args.growth_window, args.early_window, args.alpha)
            text = json.dumps(report, indent=2, default=_json_default)
            if args.output:
                Path(args.output).write_text(text + "\n")
            print(text)
        elif args.command == "collapse":
            residual, path = cmd_collapse(args.inputs, args.alpha, args.z, args.t_min, args.output)
            print(json.dumps({"alpha": args.alpha, "z": args.z, "residual": residual, "output": str(path) if path else None}))
    except UsageError as exc:
        parser.exit(2, f"vthsim {args.command}: error: {exc}\n")
    except (ValueError, OSError) as exc:
        print(f"vthsim {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        f = float(o)
        return f if math.isfinite(f) else None
    raise TypeError(type(o))


if __name__ == "__main__":
    sys.exit(main())
