"""Sweep orchestration and file interfaces.

File formats (all text, deterministic byte-for-byte for a fixed seed):

  spectrum CSV       header ``freq_hz,intensity``; uniform frequency
                     grid in Hz, non-negative intensity
  interferogram CSV  header ``tau_s,counts``
  record JSON        fields pt_s, K, sigma_K, V, Vcal, sigma_Vcal,
                     S, sigma_S, flags[]
  manifest JSON      configuration echo, seed, package versions and
                     per-point status, written last

A sweep runs one point per gate width p_t: it writes the two gated
spectra, the interferogram, and appends one complementarity record.
Points are independent and may run in parallel; every stochastic
element is seeded per point, so results do not depend on the worker
count.  Files go to a temporary name first and are renamed into place.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .estimation import (ComplementarityRecord, DegenerateDataError,
                         FRINGE_FLOOR_REL, fit_fringe, fit_gaussian,
                         propagate_errors)
from .fitting import FitConvergenceError
from .interference import (ExperimentConfig, Interferogram,
                           default_experiment, gated_spectra,
                           synthesize_interferogram)
from .spectral import IntensitySpectrum, TWO_PI
from .wavepacket import GateConfig, SampledFunction


class SchemaError(ValueError):
    """Malformed input file; the message names the offending line/column."""


@dataclass(frozen=True)
class SweepSpec:
    """A complementarity sweep: one record per gate width in pt_values."""

    pt_values: tuple            # gate widths, seconds
    template: ExperimentConfig  # shared settings; gate width is replaced per point
    out_dir: Path
    seed: int = 12345
    noise: bool = False
    counts_per_bin: float = 1000.0
    jobs: int = 1
    fringe_floor_rel: float = FRINGE_FLOOR_REL
    spectrum_band_hz: float = 1.5e9
    emit_gnuplot: bool = False

    def __post_init__(self):
        if len(self.pt_values) == 0:
            raise ValueError("pt list must not be empty")
        if any(p <= 0 for p in self.pt_values):
            raise ValueError("all pt values must be positive")
        object.__setattr__(self, "out_dir", Path(self.out_dir))


def build_sweep_spec(pt_values_s, out_dir, delta_f_hz: float = 100e6,
                     linewidth_hz: float = 10e6, counts: float = 1000.0,
                     noise: bool = False, seed: int = 12345, jobs: int = 1,
                     delay_step: float = 0.25e-9,
                     fringe_floor_rel: float = FRINGE_FLOOR_REL,
                     spectrum_band_hz: float = 1.5e9,
                     emit_gnuplot: bool = False) -> SweepSpec:
    """Assemble a SweepSpec with a shared delay grid sized for the
    largest gate in the sweep."""
    pts = tuple(float(p) for p in pt_values_s)
    template = default_experiment(max(pts), delta_f_hz, linewidth_hz,
                                  counts, seed, noise, delay_step)
    return SweepSpec(pts, template, Path(out_dir), seed, noise, counts, jobs,
                     fringe_floor_rel, spectrum_band_hz, emit_gnuplot)


# ---------------------------------------------------------------------------
# Formatting and atomic IO
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _pt_tag(pt_s: float) -> str:
    return f"pt{pt_s * 1e9:g}ns"


def write_spectrum_csv(path: Path, spectrum: IntensitySpectrum,
                       band_hz: Optional[float] = None):
    """Emit ``freq_hz,intensity`` rows, optionally restricted to
    |freq| <= band_hz (FFT grids reach to Nyquist, mostly zeros)."""
    w = spectrum.grid
    vals = spectrum.values
    if band_hz is not None:
        mask = np.abs(w) <= TWO_PI * band_hz
        w, vals = w[mask], vals[mask]
    lines = ["freq_hz,intensity"]
    freq = w / TWO_PI
    lines.extend(f"{_fmt(f)},{_fmt(v)}" for f, v in zip(freq, vals))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_interferogram_csv(path: Path, data: Interferogram):
    lines = ["tau_s,counts"]
    lines.extend(f"{_fmt(t)},{_fmt(c)}" for t, c in zip(data.delays, data.counts))
    _atomic_write(path, "\n".join(lines) + "\n")


def _read_csv(path: Path, expected_header: str):
    """Parse a two-column CSV, reporting malformed cells by line/column."""
    try:
        raw = Path(path).read_text()
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err}") from None
    lines = raw.splitlines()
    if not lines:
        raise SchemaError(f"{path}: line 1: empty file")
    if lines[0].strip() != expected_header:
        raise SchemaError(
            f"{path}: line 1: expected header {expected_header!r}, "
            f"got {lines[0].strip()!r}")
    col_a, col_b = [], []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise SchemaError(f"{path}: line {i}: expected 2 columns, got {len(parts)}")
        for j, cell in enumerate(parts, start=1):
            try:
                float(cell)
            except ValueError:
                raise SchemaError(
                    f"{path}: line {i}, column {j}: not a number: {cell!r}") from None
        col_a.append(float(parts[0]))
        col_b.append(float(parts[1]))
    if len(col_a) < 2:
        raise SchemaError(f"{path}: need at least 2 data rows")
    return np.asarray(col_a), np.asarray(col_b)


def _uniformize(x: np.ndarray, y: np.ndarray, what: str):
    """Return (start, step, y) on a uniform grid, resampling if needed."""
    order = np.argsort(x)
    x, y = x[order], y[order]
    steps = np.diff(x)
    if np.any(steps <= 0):
        raise SchemaError(f"{what}: abscissa values must be strictly increasing")
    step = float(np.median(steps))
    if np.max(np.abs(steps - step)) > 1e-6 * step:
        warnings.warn(f"{what}: non-uniform grid, resampling onto uniform spacing")
        n = int(math.floor((x[-1] - x[0]) / step)) + 1
        xu = x[0] + step * np.arange(n)
        y = np.interp(xu, x, y)
        x = xu
    return float(x[0]), step, y


def read_spectrum_csv(path: Path) -> IntensitySpectrum:
    freq, inten = _read_csv(path, "freq_hz,intensity")
    bad = np.nonzero(inten < 0)[0]
    if bad.size:
        raise SchemaError(
            f"{path}: line {bad[0] + 2}, column 2: negative intensity")
    start_hz, step_hz, vals = _uniformize(freq, inten, str(path))
    sf = SampledFunction(TWO_PI * start_hz, TWO_PI * step_hz, vals,
                         "angular_frequency")
    return IntensitySpectrum(sf)


def read_interferogram_csv(path: Path) -> Interferogram:
    tau, counts = _read_csv(path, "tau_s,counts")
    bad = np.nonzero(counts < 0)[0]
    if bad.size:
        raise SchemaError(f"{path}: line {bad[0] + 2}, column 2: negative counts")
    start, step, vals = _uniformize(tau, counts, str(path))
    delays = start + step * np.arange(len(vals))
    return Interferogram(delays, vals)


def record_json(record: ComplementarityRecord) -> str:
    return json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def _point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _point_config(spec: SweepSpec, pt: float, index: int) -> ExperimentConfig:
    return dataclasses.replace(
        spec.template,
        gate=GateConfig(pt, spec.template.gate.center),
        mean_counts_per_bin=spec.counts_per_bin,
        noise_enabled=spec.noise,
        rng_seed=_point_seed(spec.seed, index))


def run_point(spec: SweepSpec, index: int):
    """Simulate, analyze and write one sweep point.  Returns
    (record, status, files); fit failures are reported in status with a
    placeholder record rather than raised."""
    pt = spec.pt_values[index]
    cfg = _point_config(spec, pt, index)
    tag = _pt_tag(pt)
    i1, i2 = gated_spectra(cfg)
    interferogram = synthesize_interferogram(cfg)
    files = {
        "spectrum1": f"spectrum1_{tag}.csv",
        "spectrum2": f"spectrum2_{tag}.csv",
        "interferogram": f"interferogram_{tag}.csv",
    }
    write_spectrum_csv(spec.out_dir / files["spectrum1"], i1, spec.spectrum_band_hz)
    write_spectrum_csv(spec.out_dir / files["spectrum2"], i2, spec.spectrum_band_hz)
    write_interferogram_csv(spec.out_dir / files["interferogram"], interferogram)
    try:
        record = analyze_point(i1, i2, interferogram, pt, spec.fringe_floor_rel)
        status = "ok"
    except (DegenerateDataError, FitConvergenceError, ValueError) as err:
        record = ComplementarityRecord(pt, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                       0.0, 0.0, flags=("fit_failed",))
        status = f"fit_failed: {err}"
    return record, status, files


def analyze_point(i1: IntensitySpectrum, i2: IntensitySpectrum,
                  interferogram: Interferogram, pt_s: Optional[float],
                  fringe_floor_rel: float = FRINGE_FLOOR_REL) -> ComplementarityRecord:
    """Estimation pipeline shared by the sweep and external-data paths."""
    g1 = fit_gaussian(_real_sf(i1))
    g2 = fit_gaussian(_real_sf(i2))
    ff = fit_fringe(interferogram, floor_rel=fringe_floor_rel)
    return propagate_errors(g1, g2, ff, pt_s)


def _real_sf(spec: IntensitySpectrum) -> SampledFunction:
    return SampledFunction(spec.sf.start, spec.sf.step, spec.values,
                           "angular_frequency")


def run_sweep(spec: SweepSpec) -> list[ComplementarityRecord]:
    """Run the full sweep, write all artifacts, return the records in
    pt order.  Per-point fit failures are recorded in the manifest and
    do not abort the run."""
    out = spec.out_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe.tmp"
        probe.write_text("")
        probe.unlink()
    except OSError as err:
        raise OSError(f"output directory not writable: {out}: {err}") from None

    n = len(spec.pt_values)
    results = [None] * n
    if spec.jobs > 1:
        with ThreadPoolExecutor(max_workers=spec.jobs) as pool:
            futures = {pool.submit(run_point, spec, i): i for i in range(n)}
            for fut, i in futures.items():
                results[i] = fut.result()
    else:
        for i in range(n):
            results[i] = run_point(spec, i)

    records = [r[0] for r in results]
    _write_table(out / "complementarity.csv", records)
    _atomic_write(out / "records.json",
                  json.dumps([r.to_dict() for r in records],
                             indent=2, sort_keys=True) + "\n")
    manifest = {
        "seed": spec.seed,
        "noise": spec.noise,
        "counts_per_bin": spec.counts_per_bin,
        "fringe_floor_rel": spec.fringe_floor_rel,
        "spectrum_band_hz": spec.spectrum_band_hz,
        "pt_values_s": [float(p) for p in spec.pt_values],
        "template": {
            "detuning_rad_s": spec.template.detuning,
            "sigma1_s": spec.template.packet1.sigma,
            "sigma2_s": spec.template.packet2.sigma,
            "gate_center_s": spec.template.gate.center,
            "delay_start_s": spec.template.delay_grid.start,
            "delay_step_s": spec.template.delay_grid.step,
            "delay_count": spec.template.delay_grid.count,
        },
        "versions": {
            "homsim": __version__,
            "numpy": np.__version__,
            "python": ".".join(map(str, sys.version_info[:3])),
        },
        "points": [
            {"pt_s": float(spec.pt_values[i]),
             "seed": _point_seed(spec.seed, i),
             "status": results[i][1],
             "files": results[i][2]}
            for i in range(n)
        ],
    }
    if spec.emit_gnuplot:
        _write_gnuplot(out / "plots.gp", spec)
        manifest["plots"] = "plots.gp"
    # manifest last: its presence marks a complete run
    _atomic_write(out / "manifest.json",
                  json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return records


def _write_table(path: Path, records):
    lines = ["pt_s,K,sigma_K,V,sigma_V,Vcal,sigma_Vcal,S,sigma_S,flags"]
    for r in records:
        flags = ";".join(r.flags)
        lines.append(",".join([
            _fmt(r.pt_s if r.pt_s is not None else math.nan),
            _fmt(r.K), _fmt(r.sigma_K), _fmt(r.V), _fmt(r.sigma_V),
            _fmt(r.Vcal), _fmt(r.sigma_Vcal), _fmt(r.S), _fmt(r.sigma_S),
            flags]))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_gnuplot(path: Path, spec: SweepSpec):
    lines = [
        "# gnuplot script for the sweep artifacts",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,600",
    ]
    for pt in spec.pt_values:
        tag = _pt_tag(pt)
        lines += [
            f"set output 'interferogram_{tag}.png'",
            "set xlabel 'tau (s)'; set ylabel 'counts'",
            f"plot 'interferogram_{tag}.csv' using 1:2 with lines",
            f"set output 'spectra_{tag}.png'",
            "set xlabel 'freq (Hz)'; set ylabel 'intensity'",
            f"plot 'spectrum1_{tag}.csv' using 1:2 with lines, \\",
            f"     'spectrum2_{tag}.csv' using 1:2 with lines",
        ]
    lines += [
        "set output 'complementarity.png'",
        "set xlabel 'p_t (s)'; set ylabel 'K^2 + Vcal^2'",
        "set logscale x",
        "plot 'complementarity.csv' using 1:8:9 with yerrorbars",
        "",
    ]
    _atomic_write(path, "\n".join(lines))


# ---------------------------------------------------------------------------
# External data path
# ---------------------------------------------------------------------------

def analyze_files(spectrum1_csv, spectrum2_csv, interferogram_csv,
                  pt_s: Optional[float] = None,
                  fringe_floor_rel: float = FRINGE_FLOOR_REL) -> ComplementarityRecord:
    """Run the estimation pipeline on user-supplied measured data."""
    i1 = read_spectrum_csv(Path(spectrum1_csv))
    i2 = read_spectrum_csv(Path(spectrum2_csv))
    interferogram = read_interferogram_csv(Path(interferogram_csv))
    return analyze_point(i1, i2, interferogram, pt_s, fringe_floor_rel)
