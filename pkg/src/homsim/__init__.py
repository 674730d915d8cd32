"""homsim: time-resolved Hong-Ou-Mandel interference of frequency-displaced
weak coherent states.

Forward physics (gated wave-packets, beat-note coincidence fringes, the
coherent-state 50% visibility floor), synthetic photon counting, spectrum
and fringe fitting, and the distinguishability/visibility trade-off sweep.
"""

__version__ = "0.1.0"

from .wavepacket import (GateConfig, GateError, GridError, GridSpec,
                         SampledFunction, WavePacket, apply_gate,
                         default_grid, evaluate_temporal,
                         linewidth_to_sigma, sigma_to_linewidth)
from .spectral import (AmplitudeSpectrum, DegenerateSpectrumError,
                       IntensitySpectrum, coherence_time,
                       distinguishability_from_amplitudes,
                       distinguishability_from_intensities,
                       gaussian_amplitude_spectrum, intensity_of,
                       spectral_fidelity, spectrum_of)
from .interference import (ExperimentConfig, Interferogram, coincidence_rate,
                           default_experiment, fringe_modulation,
                           gated_amplitude_spectra, gated_spectra,
                           mc_coincidence_oracle, synthesize_interferogram)
from .fitting import FitConvergenceError, FitResult, gauss_newton
from .estimation import (ComplementarityRecord, DegenerateDataError,
                         FringeFit, GaussianFit, corrected_visibility,
                         fit_fringe, fit_gaussian,
                         gaussian_pair_distinguishability, propagate_errors,
                         visibility)
from .pipeline import (SchemaError, SweepSpec, analyze_files,
                       build_sweep_spec, read_interferogram_csv,
                       read_spectrum_csv, run_sweep)

__all__ = [
    "__version__",
    # wavepacket
    "WavePacket", "SampledFunction", "GateConfig", "GridSpec",
    "GridError", "GateError", "evaluate_temporal", "apply_gate",
    "default_grid", "linewidth_to_sigma", "sigma_to_linewidth",
    # spectral
    "AmplitudeSpectrum", "IntensitySpectrum", "DegenerateSpectrumError",
    "spectrum_of", "intensity_of", "spectral_fidelity",
    "distinguishability_from_amplitudes", "distinguishability_from_intensities",
    "coherence_time", "gaussian_amplitude_spectrum",
    # interference
    "ExperimentConfig", "Interferogram", "coincidence_rate",
    "mc_coincidence_oracle", "synthesize_interferogram", "gated_spectra",
    "gated_amplitude_spectra", "default_experiment", "fringe_modulation",
    # fitting / estimation
    "FitResult", "FitConvergenceError", "gauss_newton",
    "GaussianFit", "FringeFit", "ComplementarityRecord",
    "DegenerateDataError", "fit_gaussian", "fit_fringe",
    "visibility", "corrected_visibility",
    "gaussian_pair_distinguishability", "propagate_errors",
    # pipeline
    "SweepSpec", "SchemaError", "build_sweep_spec", "run_sweep",
    "analyze_files", "read_spectrum_csv", "read_interferogram_csv",
]
