"""Forward model of the time-resolved HOM coincidence experiment.

Physical picture
----------------
Two independent weak coherent beams with Gaussian lineshapes interfere
on a symmetric beam splitter.  Both outputs are chopped by identical
rectangular gates of width p; the slave gate is displaced by the
detection delay tau.  A coincidence is a click in both gates, so the
coincidence probability is proportional to the product of the
gate-integrated output intensities, averaged over the uncontrolled
relative optical phase and over the sources' frequency fluctuations.

For sources whose frequency jitters slowly compared with one gate
(which is what gives a Gaussian lineshape), the normalized rate is
exactly

    R(tau) = 1 - 1/2 * int T_p(v) mu(v - tau) cos(dw (v - tau)) dv

with T_p the normalized autocorrelation of the gate (a triangle of
half-width p), dw the detuning between the arms, and

    mu(u) = exp(-(s1^2 + s2^2) u^2 / 2),   s_i = 1/(sigma_i sqrt(2)),

the product of the two sources' field-coherence envelopes.  The gate
kernel damps the beat by its Fourier transform sinc^2(dw p / 2): short
gates resolve the beat, long gates average it away.  The mutual
coherence mu confines the fringes to the packet coherence interval;
outside it the rate settles at the distinguishable level 1.

Two consequences worth knowing before staring at plots:

* The minimum possible rate is 0.5.  Coherent states carry Poissonian
  photon statistics, and their two-photon contribution caps the HOM
  dip at half the distinguishable level.
* The beat swings the rate *above* 1 as well (up to 1.5): at delays
  where the interference term changes sign, coincidences are enhanced,
  not suppressed.  Only the fringe minima are bounded by 0.5.

The Monte Carlo oracle below simulates single trials of this
experiment (random relative phase, random per-trial source
frequencies, explicit beam-splitter algebra) and is the ground truth
against which the closed rate formula is validated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .wavepacket import (GateConfig, GridSpec, WavePacket, apply_gate,
                         default_grid, evaluate_temporal)
from .spectral import AmplitudeSpectrum, IntensitySpectrum, intensity_of, spectrum_of

R_FLOOR = 0.5          # coherent-state two-photon floor, in units of R_dist
_QUAD_POINTS = 4001    # kernel quadrature resolution


@dataclass(frozen=True)
class ExperimentConfig:
    """One time-resolved HOM measurement configuration.

    packet1/packet2      the two source wave-packets (baseband carriers)
    gate                 shared rectangular detection gate
    delay_grid           detection delays tau to scan
    mean_counts_per_bin  expected coincidence counts at the
                         distinguishable level
    rng_seed             seed for every stochastic element
    noise_enabled        Poisson shot noise on synthesized counts
    """

    packet1: WavePacket
    packet2: WavePacket
    gate: GateConfig
    delay_grid: GridSpec
    mean_counts_per_bin: float = 1000.0
    rng_seed: int = 12345
    noise_enabled: bool = False

    def __post_init__(self):
        if self.mean_counts_per_bin <= 0:
            raise ValueError("mean_counts_per_bin must be positive")
        dw = abs(self.detuning)
        if dw > 0:
            span = self.delay_grid.stop - self.delay_grid.start
            if span < 3 * (2 * math.pi / dw):
                raise ValueError("delay grid must span at least 3 beat periods")

    @property
    def detuning(self) -> float:
        """Inter-arm detuning dw = w1 - w2 (rad/s)."""
        return self.packet1.omega_center - self.packet2.omega_center

    @property
    def coherence_decay(self) -> float:
        """Gaussian decay constant a of the mutual coherence exp(-a u^2)."""
        return 1.0 / (4 * self.packet1.sigma**2) + 1.0 / (4 * self.packet2.sigma**2)


def default_experiment(gate_width: float,
                       delta_f_hz: float = 100e6,
                       linewidth_hz: float = 10e6,
                       mean_counts_per_bin: float = 1000.0,
                       rng_seed: int = 12345,
                       noise_enabled: bool = False,
                       delay_step: float = 0.25e-9,
                       delay_span: Optional[float] = None) -> ExperimentConfig:
    """Standard two-laser configuration: carriers at +-pi*delta_f around the
    reference, equal linewidths, packets synchronized at t = 0, gate centered
    on them.  The delay grid spans the mutual-coherence interval with margin.
    """
    from .wavepacket import linewidth_to_sigma
    sigma = linewidth_to_sigma(linewidth_hz)
    p1 = WavePacket(0.0, sigma, +math.pi * delta_f_hz, 0.0)
    p2 = WavePacket(0.0, sigma, -math.pi * delta_f_hz, 0.0)
    if delay_span is None:
        a = 1.0 / (2 * sigma**2)          # coherence_decay for equal widths
        delay_span = 3.0 / math.sqrt(a) + gate_width + 10e-9
    count = 2 * int(round(delay_span / delay_step)) + 1
    grid = GridSpec(-delay_span, delay_step, count)
    return ExperimentConfig(p1, p2, GateConfig(gate_width), grid,
                            mean_counts_per_bin, rng_seed, noise_enabled)


@dataclass(frozen=True)
class Interferogram:
    """Coincidence counts versus detection delay."""

    delays: np.ndarray
    counts: np.ndarray
    model_truth: Optional[dict] = None

    def __post_init__(self):
        d = np.asarray(self.delays, dtype=float)
        c = np.asarray(self.counts, dtype=float)
        if d.shape != c.shape:
            raise ValueError("delays and counts must have equal length")
        if np.any(c < 0):
            raise ValueError("counts must be non-negative")
        d.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "delays", d)
        object.__setattr__(self, "counts", c)


def coincidence_rate(cfg: ExperimentConfig, tau) -> np.ndarray | float:
    """Normalized coincidence rate at detection delay tau (R_dist = 1).

    Closed semi-analytic form: trapezoidal quadrature of the gate-kernel
    integral described in the module docstring.  Accepts a scalar or an
    array of delays.  Validated against :func:`mc_coincidence_oracle`.
    """
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    p = cfg.gate.width
    a = cfg.coherence_decay
    dw = cfg.detuning
    v = np.linspace(-p, p, _QUAD_POINTS)
    kernel = (1.0 - np.abs(v) / p) / p
    u = v[None, :] - tau_arr[:, None]
    integrand = kernel[None, :] * np.exp(-a * u**2) * np.cos(dw * u)
    rate = 1.0 - 0.5 * np.trapezoid(integrand, v, axis=1)
    return rate if np.ndim(tau) else float(rate[0])


def fringe_modulation(cfg: ExperimentConfig, search_half_width: float = 3e-9,
                      n: int = 1201) -> float:
    """Peak fringe modulation depth 2*(1 - min R) of the ideal curve near
    the synchronization point; equals the corrected visibility of the
    noiseless model."""
    taus = np.linspace(-search_half_width, search_half_width, n)
    return float(2.0 * (1.0 - coincidence_rate(cfg, taus).min()))


def mc_coincidence_oracle(cfg: ExperimentConfig, tau: float, n_samples: int,
                          seed: Optional[int] = None) -> tuple[float, float]:
    """Monte Carlo estimate (rate, standard error) of the coincidence rate.

    Each trial draws a uniform relative optical phase and per-trial
    source frequencies from the packets' spectral densities (the slow
    frequency jitter that realizes a Gaussian lineshape), sends the two
    fields through the symmetric beam splitter (E1 +- i E2)/sqrt(2),
    integrates both output intensities over their gates (master at the
    sync point, slave displaced by tau) and averages the product.
    Result: <I_A I_B> / (<I_A> <I_B>).  Deterministic for a fixed seed.

    Per trial each field is monochromatic, so the gate integrals are
    evaluated exactly; the Monte Carlo estimates only the ensemble
    average, fully independently of the kernel quadrature used by
    :func:`coincidence_rate`.
    """
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 10000 for a usable "
                         "standard error")
    if seed is None:
        # salt with the delay bits so different tau draw independent trials
        salt = int(np.float64(tau).view(np.uint64))
        seed_seq = np.random.SeedSequence([cfg.rng_seed, 0x0AC1E, salt])
    else:
        seed_seq = np.random.SeedSequence([seed])
    rng = np.random.default_rng(seed_seq)
    s1 = cfg.packet1.spectral_std
    s2 = cfg.packet2.spectral_std
    p = cfg.gate.width
    xi1 = rng.normal(0.0, s1, n_samples)
    xi2 = rng.normal(0.0, s2, n_samples)
    theta = rng.uniform(0.0, 2 * math.pi, n_samples)
    delta = cfg.detuning + xi1 - xi2
    x = delta * p / 2.0
    smear = np.sinc(x / math.pi)          # sin(x)/x
    t_master = 0.0
    t_slave = tau
    i_a = 1.0 - smear * np.sin(delta * t_master - theta)
    i_b = 1.0 + smear * np.sin(delta * t_slave - theta)
    prod = i_a * i_b
    ma, mb, mp_ = i_a.mean(), i_b.mean(), prod.mean()
    rate = mp_ / (ma * mb)
    # influence function of the ratio-of-means estimator
    infl = (prod - rate * (i_a * mb + ma * i_b - ma * mb)) / (ma * mb)
    se = float(infl.std(ddof=1) / math.sqrt(n_samples))
    return float(rate), se


def synthesize_interferogram(cfg: ExperimentConfig) -> Interferogram:
    """Simulate one interferogram over cfg.delay_grid.

    Ideal curve: mean_counts_per_bin * coincidence_rate(tau).  With
    noise enabled each bin is an independent Poisson draw with that
    mean, reproducibly seeded from cfg.rng_seed.
    """
    taus = cfg.delay_grid.points()
    ideal = cfg.mean_counts_per_bin * coincidence_rate(cfg, taus)
    if cfg.noise_enabled:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 0x9015504]))
        counts = rng.poisson(ideal).astype(float)
    else:
        counts = ideal
    truth = {
        "detuning_rad_s": cfg.detuning,
        "gate_width_s": cfg.gate.width,
        "mean_counts_per_bin": cfg.mean_counts_per_bin,
        "noise_enabled": cfg.noise_enabled,
        "rng_seed": cfg.rng_seed,
    }
    return Interferogram(taus, counts, truth)


def gated_spectra(cfg: ExperimentConfig,
                  grid: Optional[GridSpec] = None) -> tuple[IntensitySpectrum, IntensitySpectrum]:
    """Intensity spectra of the two gated temporal modes.

    Each packet is evaluated on a shared time grid, chopped by the gate
    (window placed relative to its own arrival time) and Fourier
    transformed.  Narrow gates broaden the spectra: that is the whole
    mechanism that trades distinguishability for visibility.
    """
    if grid is None:
        grid = default_grid(cfg.packet1, cfg.packet2, gate=cfg.gate)
    out = []
    for packet in (cfg.packet1, cfg.packet2):
        mode = evaluate_temporal(packet, grid)
        gated = apply_gate(mode, cfg.gate, reference=packet.tau_center)
        out.append(intensity_of(spectrum_of(gated)))
    return out[0], out[1]


def gated_amplitude_spectra(cfg: ExperimentConfig,
                            grid: Optional[GridSpec] = None) -> tuple[AmplitudeSpectrum, AmplitudeSpectrum]:
    """Amplitude spectra of the two gated modes (for fidelity cross-checks)."""
    if grid is None:
        grid = default_grid(cfg.packet1, cfg.packet2, gate=cfg.gate)
    out = []
    for packet in (cfg.packet1, cfg.packet2):
        mode = evaluate_temporal(packet, grid)
        gated = apply_gate(mode, cfg.gate, reference=packet.tau_center)
        out.append(spectrum_of(gated))
    return out[0], out[1]
