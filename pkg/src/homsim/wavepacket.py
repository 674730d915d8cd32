"""Wave-packet and sampled-signal primitives.

Conventions
-----------
A source wave-packet is a Gaussian temporal mode

    f(t) = exp(-(t - tau_center)^2 / (2 sigma^2)) / (sigma sqrt(2 pi))
           * exp(-i (omega_center t + phase))

with sigma the Gaussian width parameter of the field envelope (seconds)
and omega_center the carrier angular frequency stored *relative to a
common optical reference* (baseband representation).  Resolving THz
carriers on the grid is numerically pointless: every observable here
depends only on the detuning between the two arms, which is of order
2*pi*100 MHz, so only that beat has to live on the grid.

Useful identities for this parametrization:

    total intensity        int |f|^2 dt = 1 / (2 sigma sqrt(pi))
    intensity-spectrum std s = 1 / (sigma sqrt(2))        (rad/s)
    intensity FWHM (Hz)      = sqrt(ln 2) / (pi sigma)

Detection gates are rectangular windows (width = the trigger pulse
width p_t); samples outside the window are zeroed, inside untouched.
All quadrature on uniform grids is trapezoidal.

Everything in this module is an immutable value; the operations are
pure functions and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class GridError(ValueError):
    """Raised for unusable sampling grids ("bad grid", "insufficient support")."""


class GateError(ValueError):
    """Raised when a detection gate does not intersect the signal grid."""


def linewidth_to_sigma(fwhm_hz: float) -> float:
    """Envelope width sigma for a source whose intensity spectrum has the
    given FWHM linewidth in Hz.  sigma = sqrt(ln 2) / (pi * FWHM)."""
    if fwhm_hz <= 0:
        raise ValueError("linewidth must be positive")
    return math.sqrt(math.log(2.0)) / (math.pi * fwhm_hz)


def sigma_to_linewidth(sigma: float) -> float:
    """Inverse of :func:`linewidth_to_sigma` (intensity FWHM in Hz)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return math.sqrt(math.log(2.0)) / (math.pi * sigma)


@dataclass(frozen=True)
class GridSpec:
    """Uniform abscissa grid: start, step (> 0) and sample count."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.step <= 0 or not math.isfinite(self.step):
            raise GridError("bad grid: step must be positive")
        if self.count < 2:
            raise GridError("bad grid: need at least two samples")

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)


@dataclass(frozen=True)
class SampledFunction:
    """Uniformly sampled function of time or angular frequency.

    values may be complex (fields) or real non-negative (intensities).
    axis_kind is "time" or "angular_frequency".
    """

    start: float
    step: float
    values: np.ndarray
    axis_kind: str = "time"

    def __post_init__(self):
        if self.step <= 0 or not math.isfinite(self.step):
            raise GridError("bad grid: step must be positive")
        v = np.asarray(self.values)
        if v.size == 0:
            raise GridError("bad grid: empty values")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.axis_kind not in ("time", "angular_frequency"):
            raise ValueError(f"unknown axis_kind {self.axis_kind!r}")

    @property
    def grid(self) -> np.ndarray:
        return self.start + self.step * np.arange(len(self.values))

    @property
    def stop(self) -> float:
        return self.start + self.step * (len(self.values) - 1)

    def total_intensity(self) -> float:
        """Trapezoidal integral of |values|^2 over the grid."""
        return float(np.trapezoid(np.abs(self.values) ** 2, dx=self.step))

    def integral(self) -> float:
        """Trapezoidal integral of the (real) values."""
        return float(np.trapezoid(self.values.real, dx=self.step))

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(self.start, self.step, values, self.axis_kind)


@dataclass(frozen=True)
class WavePacket:
    """Gaussian temporal mode of one interferometer arm.

    tau_center   packet delay (s)
    sigma        Gaussian width parameter of the field envelope (s), > 0
    omega_center carrier angular frequency relative to the common
                 reference (rad/s); may be zero or negative since only
                 the inter-arm detuning is physical
    phase        carrier phase offset (rad)
    """

    tau_center: float
    sigma: float
    omega_center: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")
        if not math.isfinite(self.omega_center):
            raise ValueError("omega_center must be finite")

    @property
    def peak_amplitude(self) -> float:
        return 1.0 / (self.sigma * math.sqrt(TWO_PI))

    @property
    def analytic_norm(self) -> float:
        """Exact total intensity int |f|^2 dt = 1 / (2 sigma sqrt(pi))."""
        return 1.0 / (2.0 * self.sigma * math.sqrt(math.pi))

    @property
    def spectral_std(self) -> float:
        """Std of the packet's intensity spectrum (rad/s): 1/(sigma sqrt 2)."""
        return 1.0 / (self.sigma * math.sqrt(2.0))

    @property
    def linewidth_fwhm_hz(self) -> float:
        return sigma_to_linewidth(self.sigma)


@dataclass(frozen=True)
class GateConfig:
    """Rectangular detection gate: width = trigger pulse width p_t (s),
    center measured relative to the packet arrival time."""

    width: float
    center: float = 0.0

    def __post_init__(self):
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError("gate width must be positive")

    def window(self, reference: float = 0.0) -> tuple[float, float]:
        c = reference + self.center
        return (c - 0.5 * self.width, c + 0.5 * self.width)


def default_grid(*packets: WavePacket, gate: GateConfig | None = None,
                 step: float = 0.05e-9, span_factor: float = 8.0) -> GridSpec:
    """Default time grid: step 0.05 ns, span +-span_factor * max(sigma, p_t)
    around the packet centers.  Resolves a 10 ns beat with >= 200 samples
    per period and, after zero padding, spectra to about 1 MHz.
    """
    if not packets:
        raise ValueError("need at least one packet")
    scale = max(p.sigma for p in packets)
    if gate is not None:
        scale = max(scale, gate.width)
    lo = min(p.tau_center for p in packets) - span_factor * scale
    hi = max(p.tau_center for p in packets) + span_factor * scale
    count = int(math.ceil((hi - lo) / step)) + 1
    return GridSpec(lo, step, count)


def evaluate_temporal(packet: WavePacket, grid: GridSpec) -> SampledFunction:
    """Evaluate the complex baseband field of a packet on a time grid.

    The grid must contain [tau_center - 6 sigma, tau_center + 6 sigma];
    otherwise the Gaussian support is truncated and normalization is
    not guaranteed ("insufficient support").
    """
    if grid.step <= 0:
        raise GridError("bad grid: step must be positive")
    lo_needed = packet.tau_center - 6.0 * packet.sigma
    hi_needed = packet.tau_center + 6.0 * packet.sigma
    if grid.start > lo_needed or grid.stop < hi_needed:
        raise GridError(
            "insufficient support: grid must span tau_center +- 6 sigma "
            f"(need [{lo_needed:.3e}, {hi_needed:.3e}], "
            f"have [{grid.start:.3e}, {grid.stop:.3e}])")
    t = grid.points()
    dt = t - packet.tau_center
    envelope = np.exp(-dt**2 / (2.0 * packet.sigma**2)) * packet.peak_amplitude
    carrier = np.exp(-1j * (packet.omega_center * t + packet.phase))
    return SampledFunction(grid.start, grid.step, envelope * carrier, "time")


def apply_gate(mode: SampledFunction, gate: GateConfig,
               reference: float = 0.0) -> SampledFunction:
    """Chop a temporal mode with a rectangular gate.

    Samples outside [center - width/2, center + width/2] become zero;
    samples inside are untouched.  The window is placed relative to
    `reference` (normally the packet arrival time).
    """
    if mode.axis_kind != "time":
        raise ValueError("apply_gate expects a time-axis function")
    lo, hi = gate.window(reference)
    if hi < mode.start or lo > mode.stop:
        raise GateError("gate misses support: window entirely outside grid")
    t = mode.grid
    inside = (t >= lo) & (t <= hi)
    return mode.with_values(np.where(inside, mode.values, 0.0))
