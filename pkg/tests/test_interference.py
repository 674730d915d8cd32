"""Forward coincidence model, Monte Carlo oracle, synthesis, gated spectra."""

import math

import numpy as np
import pytest

from homsim import (ExperimentConfig, GateConfig, GridSpec, WavePacket,
                    coincidence_rate, default_experiment,
                    distinguishability_from_intensities, fringe_modulation,
                    gated_spectra, mc_coincidence_oracle,
                    synthesize_interferogram)

TWO_PI = 2 * math.pi


def test_identical_packets_reach_the_floor():
    """Synchronized identical sources dip to the coherent-state floor 0.5
    when the gate is short against the coherence time."""
    cfg = default_experiment(2e-9, delta_f_hz=0.0)
    assert coincidence_rate(cfg, 0.0) == pytest.approx(0.5, abs=1e-3)


def test_distinguishable_limit_is_one():
    cfg = default_experiment(4e-9)
    assert coincidence_rate(cfg, 200e-9) == pytest.approx(1.0, abs=1e-3)
    assert coincidence_rate(cfg, -200e-9) == pytest.approx(1.0, abs=1e-3)


def test_fringe_minima_spaced_by_beat_period():
    """With a 100 MHz detuning, interior minima sit 10 ns apart."""
    cfg = default_experiment(4e-9)
    taus = np.arange(-35e-9, 35e-9, 0.05e-9)
    rate = coincidence_rate(cfg, taus)
    interior = (rate[1:-1] < rate[:-2]) & (rate[1:-1] < rate[2:])
    minima = taus[1:-1][interior]
    spacing = np.diff(minima)
    assert np.all(np.abs(spacing - 10e-9) <= 0.1e-9)


def test_rate_bounds_randomized():
    """0.5 <= rate <= 1.5 everywhere: the beat swings symmetrically about
    the distinguishable level and the coherent-state floor caps the dips."""
    rng = np.random.default_rng(3)
    for _ in range(10):
        pt = float(rng.uniform(1e-9, 60e-9))
        df = float(rng.choice([0.0, 30e6, 100e6, 250e6]))
        lw = float(rng.uniform(2e6, 30e6))
        cfg = default_experiment(pt, delta_f_hz=df, linewidth_hz=lw)
        taus = np.linspace(cfg.delay_grid.start, cfg.delay_grid.stop, 301)
        rate = coincidence_rate(cfg, taus)
        assert np.all(rate >= 0.5 - 1e-9)
        assert np.all(rate <= 1.5 + 1e-9)


def test_swap_symmetry():
    cfg = default_experiment(5e-9)
    swapped = ExperimentConfig(cfg.packet2, cfg.packet1, cfg.gate,
                               cfg.delay_grid, cfg.mean_counts_per_bin,
                               cfg.rng_seed, cfg.noise_enabled)
    taus = np.linspace(-30e-9, 30e-9, 61)
    np.testing.assert_allclose(coincidence_rate(cfg, taus),
                               coincidence_rate(swapped, taus),
                               rtol=0, atol=1e-12)


# ---------------------------------------------------------------------------
# Monte Carlo oracle
# ---------------------------------------------------------------------------

def test_oracle_floor_for_identical_packets():
    cfg = default_experiment(2e-9, delta_f_hz=0.0)
    rate, se = mc_coincidence_oracle(cfg, 0.0, 100_000)
    assert se < 0.005
    assert rate == pytest.approx(0.5, abs=0.005)


def test_oracle_distinguishable_limit():
    cfg = default_experiment(4e-9)
    rate, se = mc_coincidence_oracle(cfg, 180e-9, 100_000)
    assert rate == pytest.approx(1.0, abs=0.005)


def test_oracle_deterministic_for_fixed_seed():
    cfg = default_experiment(4e-9, rng_seed=99)
    a = mc_coincidence_oracle(cfg, 3e-9, 20_000)
    b = mc_coincidence_oracle(cfg, 3e-9, 20_000)
    assert a == b


def test_oracle_matches_analytic_rate():
    """Cross-validation contract: |analytic - MC| within 3 standard
    errors on a 20-point delay grid (and absolutely within 1e-3+3SE)."""
    cfg = default_experiment(4e-9, rng_seed=1234)
    taus = np.linspace(-30e-9, 30e-9, 20)
    for tau in taus:
        analytic = coincidence_rate(cfg, float(tau))
        mc, se = mc_coincidence_oracle(cfg, float(tau), 100_000)
        assert abs(analytic - mc) <= max(1e-3, 3 * se), \
            f"tau={tau*1e9:.2f} ns: {analytic:.5f} vs {mc:.5f} (se {se:.2e})"


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------

def test_noiseless_counts_equal_model_curve():
    cfg = default_experiment(4e-9)
    ig = synthesize_interferogram(cfg)
    expected = cfg.mean_counts_per_bin * coincidence_rate(cfg, ig.delays)
    np.testing.assert_allclose(ig.counts, expected, rtol=0, atol=0)


def test_noisy_synthesis_is_reproducible():
    cfg = default_experiment(4e-9, noise_enabled=True, rng_seed=777)
    a = synthesize_interferogram(cfg)
    b = synthesize_interferogram(cfg)
    np.testing.assert_array_equal(a.counts, b.counts)
    assert np.all(a.counts == np.round(a.counts))    # integer draws


def test_poisson_statistics_in_distinguishable_region():
    """Far-delay bins average to mean_counts_per_bin within 3 sigma."""
    cfg = default_experiment(4e-9, noise_enabled=True, rng_seed=2024)
    ig = synthesize_interferogram(cfg)
    far = np.abs(ig.delays) > 90e-9
    n = int(far.sum())
    assert n > 50
    mean = ig.counts[far].mean()
    sigma = math.sqrt(1000.0 / n)
    assert abs(mean - 1000.0) < 3 * sigma


def test_negative_counts_rejected():
    from homsim import Interferogram
    with pytest.raises(ValueError):
        Interferogram(np.array([0.0, 1.0]), np.array([1.0, -2.0]))


def test_delay_grid_must_cover_beats():
    p1 = WavePacket(0.0, 26.5e-9, TWO_PI * 50e6)
    p2 = WavePacket(0.0, 26.5e-9, -TWO_PI * 50e6)
    with pytest.raises(ValueError, match="3 beat periods"):
        ExperimentConfig(p1, p2, GateConfig(4e-9), GridSpec(-10e-9, 0.25e-9, 81))


# ---------------------------------------------------------------------------
# gated spectra
# ---------------------------------------------------------------------------

def test_long_gate_keeps_spectra_disjoint():
    """p_t = 100 ns on 10 MHz lasers 100 MHz apart: negligible overlap,
    distinguishability at its ceiling."""
    cfg = default_experiment(100e-9)
    i1, i2 = gated_spectra(cfg)
    k = distinguishability_from_intensities(i1, i2)
    assert k > 0.999
    # sqrt(I1 I2) integrates to essentially zero against either norm
    overlap = np.trapezoid(np.sqrt(i1.values * i2.values), i1.grid)
    norm = math.sqrt(np.trapezoid(i1.values, i1.grid)
                     * np.trapezoid(i2.values, i2.grid))
    assert overlap / norm < 0.05


def test_short_gate_creates_overlap():
    cfg = default_experiment(4e-9)
    i1, i2 = gated_spectra(cfg)
    k = distinguishability_from_intensities(i1, i2)
    assert k < 0.9


def test_halving_gate_roughly_doubles_spectral_width():
    """Fourier trade-off in the gate-limited regime."""
    widths = {}
    for pt in (4e-9, 8e-9):
        cfg = default_experiment(pt)
        i1, _ = gated_spectra(cfg)
        vals = i1.values
        peak = vals.max()
        above = i1.grid[vals >= peak / 2]
        widths[pt] = above.max() - above.min()
    ratio = widths[4e-9] / widths[8e-9]
    assert 1.6 < ratio < 2.4


def test_rate_monotone_sweep_trend():
    """Shrinking the gate raises the fringe modulation and lowers K."""
    mods, ks = [], []
    for pt in (10e-9, 8e-9, 6e-9, 4e-9):
        cfg = default_experiment(pt)
        mods.append(fringe_modulation(cfg))
        i1, i2 = gated_spectra(cfg)
        ks.append(distinguishability_from_intensities(i1, i2))
    assert np.all(np.diff(mods) > 0)
    assert np.all(np.diff(ks) < 0)


def test_forward_complementarity_inequality():
    """K^2 + Vcal^2 never exceeds 1 (beyond numerical slack): which-path
    information and fringe visibility trade off as an inequality."""
    for pt in (4e-9, 5e-9, 6e-9, 8e-9, 10e-9, 20e-9):
        cfg = default_experiment(pt)
        i1, i2 = gated_spectra(cfg)
        k = distinguishability_from_intensities(i1, i2)
        vcal = fringe_modulation(cfg)
        assert k**2 + vcal**2 <= 1.0 + 0.02
