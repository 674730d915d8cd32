"""Time-resolved coincidence interferograms.

Sweeping the detection delay between the two gated detectors traces
the two-photon interference: a 100 MHz beat under the mutual-coherence
envelope, dipping at best to half the distinguishable rate (the
coherent-state floor) and swinging symmetrically above it on the
anti-fringes.  An ASCII rendering is enough to see all of that.
"""

import numpy as np

from homsim import (coincidence_rate, default_experiment, fit_fringe,
                    synthesize_interferogram)

cfg = default_experiment(4e-9, noise_enabled=False)
taus = np.arange(-40e-9, 40e-9 + 1e-12, 1e-9)
rates = coincidence_rate(cfg, taus)

print("tau (ns)   rate   0.5" + " " * 27 + "1.0" + " " * 26 + "1.5")
for tau, rate in zip(taus[::2], rates[::2]):
    pos = int(round((rate - 0.5) * 60))
    line = [" "] * 61
    line[30] = "."                    # the distinguishable level
    line[min(max(pos, 0), 60)] = "*"
    print(f"{tau*1e9:8.1f}  {rate:5.3f}  |{''.join(line)}|")

ig = synthesize_interferogram(cfg)
fit = fit_fringe(ig)
period_ns = 2 * np.pi / fit.delta_omega * 1e9
print(f"\nfitted beat period  {period_ns:.2f} ns (detuning 100 MHz -> 10 ns)")
print(f"fitted envelope     {fit.envelope_width*1e9:.1f} ns "
      f"(mutual coherence of the two sources)")
print(f"fitted R_dist       {fit.r_dist:.1f} counts")
print(f"deepest model point {fit.r_min:.1f} counts "
      f"(floor would be {0.5 * fit.r_dist:.1f})")

noisy = default_experiment(4e-9, noise_enabled=True, rng_seed=31415)
fit_n = fit_fringe(synthesize_interferogram(noisy))
print(f"\nwith Poisson noise at 1000 counts/bin the same fit gives "
      f"amplitude {fit_n.amplitude:.4f} vs noiseless {fit.amplitude:.4f}")
