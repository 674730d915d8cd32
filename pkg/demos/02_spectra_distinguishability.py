"""Gated spectra and the distinguishability K.

The two sources sit 100 MHz apart with 10 MHz linewidths: ungated,
their spectra are disjoint and a detector could in principle tell
every photon's origin (K = 1).  Chopping the light with a gate
shorter than the coherence time broadens both spectra until they
overlap, and K = 1 - (normalized overlap of sqrt(I1 I2))^2 drops.
"""

import numpy as np

from homsim import (default_experiment, distinguishability_from_intensities,
                    fit_gaussian, gated_spectra,
                    gaussian_pair_distinguishability)
from homsim.wavepacket import SampledFunction

print(f"{'p_t (ns)':>9} {'fit FWHM (MHz)':>15} {'K (raw)':>9} {'K (fits)':>9}")
for pt_ns in (100, 50, 20, 10, 8, 6, 5, 4):
    cfg = default_experiment(pt_ns * 1e-9)
    i1, i2 = gated_spectra(cfg)
    k_raw = distinguishability_from_intensities(i1, i2)
    g1 = fit_gaussian(SampledFunction(i1.sf.start, i1.sf.step, i1.values,
                                      "angular_frequency"))
    g2 = fit_gaussian(SampledFunction(i2.sf.start, i2.sf.step, i2.values,
                                      "angular_frequency"))
    k_fit, _ = gaussian_pair_distinguishability(g1.center, g1.std,
                                                g2.center, g2.std)
    fwhm_mhz = 2.3548 * g1.std / (2 * np.pi) / 1e6
    print(f"{pt_ns:>9} {fwhm_mhz:>15.1f} {k_raw:>9.4f} {k_fit:>9.4f}")

print("\nThe raw-quadrature K and the Gaussian-fit K disagree for short"
      "\ngates because a rectangular chop produces sinc-shaped side lobes"
      "\nthat a Gaussian cannot represent; the analysis pipeline uses the"
      "\nfits, mirroring how measured spectra are usually reduced.")
