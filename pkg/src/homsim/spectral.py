"""Fourier analysis of temporal modes and spectral-overlap measures.

The transform convention is

    X(w) = (1/sqrt(2 pi)) int f(t) exp(+i w t) dt,

so a carrier exp(-i w0 t) shows up at +w0 on the angular-frequency
axis and Parseval holds without extra factors:

    int |X(w)|^2 dw = int |f(t)|^2 dt.

Discrete transforms zero-pad to at least 4x the input length, which
brings the frequency resolution of the default grid to well under
2*pi*1 MHz.

Angular frequency (rad/s) everywhere inside the library; plain Hz only
at file formats and CLI flags.  Mixing the two is the classic source
of silent 2*pi bugs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .wavepacket import TWO_PI, SampledFunction

#: Gaussian-lineshape relation between intensity-FWHM linewidth and
#: coherence time: tau_c = COHERENCE_FACTOR / linewidth.
COHERENCE_FACTOR = 0.66

#: Intensities below this fraction of the peak are clamped to zero
#: before sqrt(I1*I2), mirroring a spectrum analyser noise floor.
INTENSITY_FLOOR_REL = 1e-12


class DegenerateSpectrumError(ValueError):
    """Raised for all-zero (or non-normalizable) spectra."""


@dataclass(frozen=True)
class AmplitudeSpectrum:
    """Complex field spectrum X(w) on a uniform angular-frequency grid,
    relative to the common optical reference."""

    sf: SampledFunction

    def __post_init__(self):
        if self.sf.axis_kind != "angular_frequency":
            raise ValueError("AmplitudeSpectrum needs an angular_frequency axis")

    @property
    def grid(self) -> np.ndarray:
        return self.sf.grid

    @property
    def values(self) -> np.ndarray:
        return self.sf.values

    def total_intensity(self) -> float:
        return self.sf.total_intensity()


@dataclass(frozen=True)
class IntensitySpectrum:
    """Real non-negative intensity spectrum I(w) = |X(w)|^2."""

    sf: SampledFunction

    def __post_init__(self):
        if self.sf.axis_kind != "angular_frequency":
            raise ValueError("IntensitySpectrum needs an angular_frequency axis")
        if np.any(self.sf.values.real < -1e-30) or np.any(np.abs(self.sf.values.imag) > 0):
            raise ValueError("intensity samples must be real and non-negative")

    @property
    def grid(self) -> np.ndarray:
        return self.sf.grid

    @property
    def values(self) -> np.ndarray:
        return self.sf.values.real

    def integral(self) -> float:
        return self.sf.integral()


def spectrum_of(mode: SampledFunction, min_pad: int = 4) -> AmplitudeSpectrum:
    """Discrete Fourier transform of a time-axis mode, zero-padded to at
    least `min_pad` times the input length (next power of two).

    Parseval is verified to 1e-6 relative as a construction invariant.
    """
    if mode.axis_kind != "time":
        raise ValueError("spectrum_of expects a time-axis function")
    f = np.asarray(mode.values, dtype=complex)
    if f.size == 0:
        raise ValueError("empty input")
    n = f.size
    nfft = 1 << int(math.ceil(math.log2(min_pad * n)))
    # ifft carries the e^{+iwt} sign; undo its 1/N and add the t0 phase.
    spec = mode.step * nfft * np.fft.ifft(f, nfft) / math.sqrt(TWO_PI)
    w = TWO_PI * np.fft.fftfreq(nfft, d=mode.step)
    order = np.fft.fftshift(np.arange(nfft))
    w = w[order]
    spec = spec[order] * np.exp(1j * w * mode.start)
    out = SampledFunction(w[0], w[1] - w[0], spec, "angular_frequency")
    t_int = mode.total_intensity()
    s_int = out.total_intensity()
    if t_int > 0 and abs(s_int - t_int) > 1e-6 * t_int:
        raise AssertionError(
            f"Parseval violated: temporal {t_int:.6e} vs spectral {s_int:.6e}")
    return AmplitudeSpectrum(out)


def intensity_of(spectrum: AmplitudeSpectrum) -> IntensitySpectrum:
    """Pointwise squared modulus of an amplitude spectrum."""
    vals = np.abs(spectrum.sf.values) ** 2
    return IntensitySpectrum(spectrum.sf.with_values(vals))


def _align(g1: np.ndarray, v1: np.ndarray, g2: np.ndarray, v2: np.ndarray):
    """Resample two sampled curves onto a shared uniform grid.

    Linear interpolation onto the finer of the two steps, spanning the
    union of both supports; values are zero outside their own support.
    """
    s1 = g1[1] - g1[0]
    s2 = g2[1] - g2[0]
    if abs(s1 - s2) <= 1e-9 * min(s1, s2) and abs(g1[0] - g2[0]) <= 1e-9 * s1 \
            and len(g1) == len(g2):
        return g1, v1, v2
    step = min(s1, s2)
    lo = min(g1[0], g2[0])
    hi = max(g1[-1], g2[-1])
    n = int(math.floor((hi - lo) / step)) + 1
    g = lo + step * np.arange(n)
    r1 = np.interp(g, g1, v1, left=0.0, right=0.0)
    r2 = np.interp(g, g2, v2, left=0.0, right=0.0)
    return g, r1, r2


def spectral_fidelity(x1: AmplitudeSpectrum, x2: AmplitudeSpectrum) -> float:
    """Squared modulus of the field-spectrum overlap of two unit-normalized
    amplitude spectra:  F = |int X1(w) X2*(w) dw|^2, F in [0, 1].
    """
    i1 = x1.total_intensity()
    i2 = x2.total_intensity()
    if i1 <= 0 or i2 <= 0:
        raise DegenerateSpectrumError("degenerate spectrum: zero intensity")
    # Complex overlap needs the complex values on a common grid.
    g, re1, re2 = _align(x1.grid, x1.values.real, x2.grid, x2.values.real)
    _, im1, im2 = _align(x1.grid, x1.values.imag, x2.grid, x2.values.imag)
    v1 = (re1 + 1j * im1) / math.sqrt(i1)
    v2 = (re2 + 1j * im2) / math.sqrt(i2)
    overlap = np.trapezoid(v1 * np.conj(v2), g)
    f = float(np.abs(overlap) ** 2)
    if f > 1.0 + 1e-9:
        raise AssertionError(f"fidelity {f} above 1")
    return f


def distinguishability_from_amplitudes(x1: AmplitudeSpectrum,
                                       x2: AmplitudeSpectrum) -> float:
    """Distinguishability from amplitude-spectrum moduli:

        K = 1 - (int |X1(w)| |X2(w)| dw)^2

    for unit-normalized spectra.  Valid at the dip center, where the
    relative phase is fixed and drops out of the overlap integral.
    """
    i1 = x1.total_intensity()
    i2 = x2.total_intensity()
    if i1 <= 0 or i2 <= 0:
        raise DegenerateSpectrumError("degenerate spectrum: zero intensity")
    g, m1, m2 = _align(x1.grid, np.abs(x1.values), x2.grid, np.abs(x2.values))
    overlap = np.trapezoid(m1 * m2, g) / math.sqrt(i1 * i2)
    k = 1.0 - float(overlap) ** 2
    return min(max(k, 0.0), 1.0)


def distinguishability_from_intensities(i1: IntensitySpectrum,
                                        i2: IntensitySpectrum,
                                        floor_rel: float = INTENSITY_FLOOR_REL) -> float:
    """Distinguishability from measured intensity spectra:

        K = 1 - ( int sqrt(I1 I2) dw / sqrt(int I1 dw * int I2 dw) )^2.

    Self-normalizing (the Bhattacharyya overlap of the two intensity
    distributions), hence invariant under independent rescaling of
    either input.  Samples below floor_rel * peak are clamped to zero
    first so that numerical tails cannot inflate the overlap.
    """
    g, v1, v2 = _align(i1.grid, i1.values, i2.grid, i2.values)
    if np.any(v1 < 0) or np.any(v2 < 0):
        raise ValueError("intensity spectra must be non-negative")
    n1 = np.trapezoid(v1, g)
    n2 = np.trapezoid(v2, g)
    if n1 <= 0 or n2 <= 0:
        raise DegenerateSpectrumError("degenerate spectrum: zero total intensity")
    if floor_rel > 0:
        v1 = np.where(v1 < floor_rel * v1.max(), 0.0, v1)
        v2 = np.where(v2 < floor_rel * v2.max(), 0.0, v2)
    overlap = np.trapezoid(np.sqrt(v1 * v2), g) / math.sqrt(n1 * n2)
    k = 1.0 - float(overlap) ** 2
    return min(max(k, 0.0), 1.0)


def coherence_time(linewidth_fwhm_hz: float) -> float:
    """Coherence time of a Gaussian lineshape: tau_c = 0.66 / linewidth,
    with the linewidth given as the FWHM of the intensity spectrum in Hz.
    """
    if linewidth_fwhm_hz <= 0:
        raise ValueError("linewidth must be positive")
    return COHERENCE_FACTOR / linewidth_fwhm_hz


def gaussian_amplitude_spectrum(center: float, std: float,
                                grid_lo: float, grid_hi: float, n: int = 4001,
                                phase: float = 0.0) -> AmplitudeSpectrum:
    """Analytic Gaussian amplitude spectrum, unit intensity integral.

    `std` is the standard deviation of the corresponding *intensity*
    spectrum |X|^2, i.e. |X(w)| = (2 pi std^2)^(-1/4) exp(-(w-center)^2/(4 std^2)).
    Handy for constructing exact test states.
    """
    if std <= 0:
        raise ValueError("std must be positive")
    w = np.linspace(grid_lo, grid_hi, n)
    mod = (TWO_PI * std**2) ** (-0.25) * np.exp(-((w - center) ** 2) / (4 * std**2))
    vals = mod * np.exp(1j * phase)
    return AmplitudeSpectrum(SampledFunction(w[0], w[1] - w[0], vals,
                                             "angular_frequency"))
