"""Command line interface.

Subcommands:
  simulate   one gate width: write spectra + interferogram + record
  sweep      full complementarity pipeline over a p_t list
  analyze    run the estimation pipeline on external CSV data
  oracle     cross-check the analytic rate against the Monte Carlo

Configuration can come from a key=value file (--config); explicit
flags always win over file values.  Recognized keys mirror the flag
names: pt_ns, delta_f_hz, linewidth_hz, counts, noise, seed, jobs,
out, delay_step_ns, fringe_floor, spectrum_band_hz, gnuplot.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .estimation import FRINGE_FLOOR_REL
from .interference import coincidence_rate, default_experiment, mc_coincidence_oracle
from .pipeline import (SchemaError, analyze_files, build_sweep_spec,
                       record_json, run_sweep)

_DEFAULTS = {
    "pt_ns": "4,5,6,8,10,20,50,100",
    "delta_f_hz": 100e6,
    "linewidth_hz": 10e6,
    "counts": 1000.0,
    "noise": False,
    "seed": 12345,
    "jobs": 1,
    "out": "homsim_out",
    "delay_step_ns": 0.25,
    "fringe_floor": FRINGE_FLOOR_REL,
    "spectrum_band_hz": 1.5e9,
    "gnuplot": False,
}

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in _BOOL_TRUE:
        return True
    if t in _BOOL_FALSE:
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _load_config(path: str) -> dict:
    values = {}
    for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise SchemaError(f"{path}: line {i}: expected KEY=VALUE")
        key, _, val = stripped.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _DEFAULTS:
            raise SchemaError(f"{path}: line {i}: unknown key {key!r}")
        values[key] = val
    return values


def _coerce(key: str, val):
    if isinstance(val, str):
        default = _DEFAULTS[key]
        if isinstance(default, bool):
            return _parse_bool(val)
        if isinstance(default, int):
            return int(val)
        if isinstance(default, float):
            return float(val)
    return val


def _settings(args) -> dict:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        for key, val in _load_config(args.config).items():
            merged[key] = _coerce(key, val)
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return merged


def _pt_list_s(settings) -> list:
    items = str(settings["pt_ns"]).split(",")
    pts = [float(p) * 1e-9 for p in items if p.strip()]
    if not pts:
        raise ValueError("empty pt list")
    return pts


def _add_common(parser):
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--pt", dest="pt_ns",
                        help="gate width(s) p_t in ns, comma separated")
    parser.add_argument("--delta-f", dest="delta_f_hz", type=float,
                        help="laser frequency separation in Hz (default 100e6)")
    parser.add_argument("--linewidth", dest="linewidth_hz", type=float,
                        help="laser intensity-FWHM linewidth in Hz (default 10e6)")
    parser.add_argument("--counts", type=float,
                        help="mean coincidence counts per bin (default 1000)")
    parser.add_argument("--noise", type=_parse_bool,
                        help="Poisson shot noise on counts (true/false)")
    parser.add_argument("--seed", type=int, help="random seed (default 12345)")
    parser.add_argument("--jobs", type=int, help="parallel sweep workers")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--delay-step-ns", dest="delay_step_ns", type=float,
                        help="interferogram delay step in ns (default 0.25)")
    parser.add_argument("--fringe-floor", dest="fringe_floor", type=float,
                        help="fringe detection floor relative to R_dist")
    parser.add_argument("--spectrum-band-hz", dest="spectrum_band_hz", type=float,
                        help="half band of emitted spectrum CSVs in Hz")
    parser.add_argument("--gnuplot", type=_parse_bool,
                        help="also emit a gnuplot script (true/false)")


def _spec_from(settings, pts):
    return build_sweep_spec(
        pts, settings["out"],
        delta_f_hz=settings["delta_f_hz"],
        linewidth_hz=settings["linewidth_hz"],
        counts=settings["counts"],
        noise=settings["noise"],
        seed=settings["seed"],
        jobs=settings["jobs"],
        delay_step=settings["delay_step_ns"] * 1e-9,
        fringe_floor_rel=settings["fringe_floor"],
        spectrum_band_hz=settings["spectrum_band_hz"],
        emit_gnuplot=settings["gnuplot"])


def _cmd_sweep(args) -> int:
    settings = _settings(args)
    spec = _spec_from(settings, _pt_list_s(settings))
    records = run_sweep(spec)
    print(f"{'pt_ns':>8} {'K':>8} {'Vcal':>8} {'S':>8}  flags")
    for r in records:
        print(f"{r.pt_s * 1e9:>8.3g} {r.K:>8.4f} {r.Vcal:>8.4f} {r.S:>8.4f}"
              f"  {';'.join(r.flags)}")
    print(f"wrote {spec.out_dir}/complementarity.csv, records.json, manifest.json")
    return 0


def _cmd_simulate(args) -> int:
    settings = _settings(args)
    pts = _pt_list_s(settings)
    if len(pts) != 1:
        print("simulate expects exactly one --pt value", file=sys.stderr)
        return 2
    spec = _spec_from(settings, pts)
    records = run_sweep(spec)
    sys.stdout.write(record_json(records[0]))
    return 0


def _cmd_analyze(args) -> int:
    settings = _settings(args)
    pt_s = None
    if args.pt_ns is not None:
        pt_s = float(args.pt_ns) * 1e-9
    record = analyze_files(args.spectrum1, args.spectrum2, args.interferogram,
                           pt_s=pt_s,
                           fringe_floor_rel=settings["fringe_floor"])
    text = record_json(record)
    if args.record_out:
        Path(args.record_out).write_text(text)
    sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="homsim",
        description="Time-resolved HOM interference of frequency-displaced "
                    "weak coherent states")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="single gate-width run")
    _add_common(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="complementarity sweep over p_t")
    _add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_an = sub.add_parser("analyze", help="estimate K and Vcal from CSV data")
    _add_common(p_an)
    p_an.add_argument("--spectrum1", required=True)
    p_an.add_argument("--spectrum2", required=True)
    p_an.add_argument("--interferogram", required=True)
    p_an.add_argument("--record-out", help="also write the record JSON here")
    p_an.set_defaults(func=_cmd_analyze)

    p_or = sub.add_parser("oracle", help="Monte Carlo cross-check of the rate model")
    _add_common(p_or)
    p_or.add_argument("--samples", type=int, default=100_000)
    p_or.add_argument("--points", type=int, default=20)
    p_or.add_argument("--span-ns", type=float, default=30.0)
    p_or.set_defaults(func=_cmd_oracle)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def _cmd_oracle(args) -> int:
    settings = _settings(args)
    pts = _pt_list_s(settings)
    cfg = default_experiment(pts[0], settings["delta_f_hz"],
                             settings["linewidth_hz"],
                             rng_seed=settings["seed"])
    taus = np.linspace(-args.span_ns * 1e-9, args.span_ns * 1e-9, args.points)
    rows = []
    worst = 0.0
    for tau in taus:
        analytic = coincidence_rate(cfg, float(tau))
        mc, se = mc_coincidence_oracle(cfg, float(tau), args.samples)
        band = max(1e-3, 3 * se)
        worst = max(worst, abs(analytic - mc) / band)
        rows.append((tau, analytic, mc, se))
    print(f"{'tau_ns':>9} {'analytic':>10} {'monte_carlo':>12} {'std_err':>9}")
    for tau, analytic, mc, se in rows:
        print(f"{tau * 1e9:>9.3f} {analytic:>10.6f} {mc:>12.6f} {se:>9.2e}")
    print(f"max |diff| / max(1e-3, 3 SE) = {worst:.3f}  "
          f"({'OK' if worst <= 1.0 else 'MISMATCH'})")
    return 0 if worst <= 1.0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
