"""Analysis pipeline: spectrum fits, fringe fits, visibility and the
complementarity record.

The measured quantities mirror what the instruments deliver: Gaussian
fits of the two gated intensity spectra (centers and widths), and a
fringe-model fit of the coincidence interferogram

    C(tau) = R_dist * [1 - A exp(-(tau - tau0)^2/(2 w^2)) cos(dw (tau - tau0))].

From the spectrum fits the distinguishability

    K = 1 - (2 s1 s2/(s1^2+s2^2)) exp(-(c1-c2)^2 / (2 (s1^2+s2^2)))

(closed-form Bhattacharyya overlap of two Gaussian intensity
distributions, squared).  From the fringe fit the raw visibility
V = (R_dist - R_min)/R_dist and the coherent-state-corrected
visibility Vcal = V / 0.5.  First-order error propagation uses
analytic Jacobians throughout; R_min is the fitted-model minimum, so
its parameter sensitivities follow from the envelope theorem (the
minimizing delay needs no derivative of its own).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fitting import FitConvergenceError, FitResult, gauss_newton
from .interference import Interferogram
from .wavepacket import SampledFunction

WCS_VISIBILITY_FLOOR = 0.5

#: Smallest band-filtered fringe modulation (relative to R_dist) that
#: counts as a detected fringe on noiseless data.
FRINGE_FLOOR_REL = 1e-3


class DegenerateDataError(ValueError):
    """Raised when the input carries no fittable structure."""


@dataclass(frozen=True)
class GaussianFit:
    """A * exp(-(x - center)^2/(2 std^2)) + offset, with covariance."""

    amplitude: float
    center: float
    std: float
    offset: float
    covariance: np.ndarray      # 4x4, order (amplitude, center, std, offset)
    residual_norm: float

    def __post_init__(self):
        if self.std <= 0:
            raise ValueError("std must be positive")
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (4, 4):
            raise ValueError("covariance must be 4x4")
        cov = 0.5 * (cov + cov.T)
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)

    @property
    def center_std_cov(self) -> np.ndarray:
        """2x2 covariance block of (center, std)."""
        return self.covariance[np.ix_([1, 2], [1, 2])]


@dataclass(frozen=True)
class FringeFit:
    """Fitted interferogram model; params order (R_dist, A, tau0, w, dw)."""

    r_dist: float
    r_min: float
    delta_omega: float
    envelope_width: float
    tau0: float
    amplitude: float
    covariance: np.ndarray      # 5x5 in the parameter order above
    residual_norm: float
    no_fringe: bool = False
    flags: tuple = ()

    def __post_init__(self):
        if self.envelope_width <= 0:
            raise ValueError("envelope_width must be positive")
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (5, 5):
            raise ValueError("covariance must be 5x5")
        cov = 0.5 * (cov + cov.T)
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)

    @property
    def params(self) -> np.ndarray:
        return np.array([self.r_dist, self.amplitude, self.tau0,
                         self.envelope_width, self.delta_omega])


@dataclass(frozen=True)
class ComplementarityRecord:
    """One point of the distinguishability-visibility trade-off curve."""

    pt_s: Optional[float]
    K: float
    sigma_K: float
    V: float
    sigma_V: float
    Vcal: float
    sigma_Vcal: float
    S: float
    sigma_S: float
    flags: tuple = ()

    def __post_init__(self):
        for name in ("sigma_K", "sigma_V", "sigma_Vcal", "sigma_S"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not (0.0 <= self.K <= 1.0):
            raise ValueError("K must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "pt_s": self.pt_s,
            "K": self.K, "sigma_K": self.sigma_K,
            "V": self.V,
            "Vcal": self.Vcal, "sigma_Vcal": self.sigma_Vcal,
            "S": self.S, "sigma_S": self.sigma_S,
            "flags": list(self.flags),
        }


# ---------------------------------------------------------------------------
# Gaussian spectrum fit
# ---------------------------------------------------------------------------

def _gauss_model(x, theta):
    a, c, s, b = theta
    return a * np.exp(-((x - c) ** 2) / (2.0 * s * s)) + b


def _gauss_jac(x, theta):
    a, c, s, b = theta
    e = np.exp(-((x - c) ** 2) / (2.0 * s * s))
    jac = np.empty((x.size, 4))
    jac[:, 0] = e
    jac[:, 1] = a * e * (x - c) / (s * s)
    jac[:, 2] = a * e * (x - c) ** 2 / (s ** 3)
    jac[:, 3] = 1.0
    return jac


def _noise_estimate(y: np.ndarray) -> float:
    """Robust per-sample noise from second differences (MAD-based)."""
    if y.size < 3:
        return 0.0
    d2 = np.diff(y, 2)
    mad = np.median(np.abs(d2 - np.median(d2)))
    return float(1.4826 * mad / math.sqrt(6.0))


def fit_gaussian(samples: SampledFunction, fit_window_fwhm: float = 4.0) -> GaussianFit:
    """Nonlinear least-squares Gaussian fit of a real-valued peak.

    Moment-based initialization (intensity-weighted mean and RMS
    width); damped Gauss-Newton; covariance sigma_hat^2 (J^T J)^-1.
    The fit is restricted to +- fit_window_fwhm half-max widths around
    the peak so that far side lobes of gate-limited spectra do not
    drag the baseline.
    """
    x_all = samples.grid
    y_all = np.asarray(samples.values.real, dtype=float)
    if y_all.size < 8:
        raise DegenerateDataError("degenerate data: need at least 8 samples")
    noise = _noise_estimate(y_all)
    offset0 = float(np.min(y_all))
    peak = float(np.max(y_all))
    if peak - offset0 <= 5.0 * noise or peak <= offset0:
        raise DegenerateDataError("degenerate data: no peak above noise")
    c0 = float(x_all[np.argmax(y_all)])
    above = y_all >= offset0 + 0.5 * (peak - offset0)
    fwhm0 = float(x_all[above].max() - x_all[above].min())
    if fwhm0 <= 0:
        fwhm0 = 2.0 * samples.step
    mask = np.abs(x_all - c0) <= fit_window_fwhm * fwhm0
    x, y = x_all[mask], y_all[mask]
    if x.size < 8:
        x, y = x_all, y_all
    w = np.maximum(y - offset0, 0.0)
    wsum = w.sum()
    if wsum > 0:
        c0 = float((x * w).sum() / wsum)
        s0 = float(math.sqrt(((x - c0) ** 2 * w).sum() / wsum))
    else:
        s0 = fwhm0 / 2.3548
    s0 = max(s0, samples.step)
    theta0 = np.array([peak - offset0, c0, s0, offset0])

    def resid(th):
        return _gauss_model(x, th) - y

    def jac(th):
        return _gauss_jac(x, th)

    try:
        res = gauss_newton(resid, jac, theta0)
    except FitConvergenceError as err:
        best = err.best
        raise FitConvergenceError(
            str(err), _gaussfit_from_result(best)) from None
    return _gaussfit_from_result(res)


def _gaussfit_from_result(res: FitResult) -> GaussianFit:
    a, c, s, b = res.params
    cov = res.covariance
    if s < 0:      # Gaussian is even in s; normalize the sign
        s = -s
    return GaussianFit(float(a), float(c), float(s), float(b),
                       cov, res.residual_norm)


# ---------------------------------------------------------------------------
# Fringe fit
# ---------------------------------------------------------------------------

def _fringe_model(tau, theta):
    rd, a, t0, w, dw = theta
    return rd * (1.0 - a * np.exp(-((tau - t0) ** 2) / (2.0 * w * w))
                 * np.cos(dw * (tau - t0)))


def _fringe_jac(tau, theta):
    rd, a, t0, w, dw = theta
    u = tau - t0
    e = np.exp(-(u ** 2) / (2.0 * w * w))
    c = np.cos(dw * u)
    s = np.sin(dw * u)
    jac = np.empty((tau.size, 5))
    jac[:, 0] = 1.0 - a * e * c
    jac[:, 1] = -rd * e * c
    jac[:, 2] = -rd * a * e * (c * u / (w * w) - s * dw)
    jac[:, 3] = -rd * a * e * c * (u ** 2) / (w ** 3)
    jac[:, 4] = rd * a * e * s * u
    return jac


@dataclass(frozen=True)
class _BeatSearch:
    detected: bool
    dw: float = 0.0
    amplitude: float = 0.0       # peak of the band envelope, in counts
    band_sigma: float = 0.0
    center: float = 0.0          # delay of the deepest fringe dip
    env_width: float = 0.0       # RMS width of the beat envelope


def _detect_fringe(tau: np.ndarray, residual: np.ndarray, r_dist0: float,
                   floor_rel: float, k_min: int = 2) -> _BeatSearch:
    """Locate a beat note in the envelope-subtracted interferogram.

    The residual after the envelope-only fit carries no dip, so any
    significant spectral peak above DC is a beat.  The band around the
    dominant bin is turned into an analytic signal whose magnitude is
    the fringe envelope; that gives noise-robust starting values for
    amplitude, envelope center/width and the deepest-dip delay.
    Detection compares the envelope peak against 3x the noise level
    estimated from the upper spectral tail and against an absolute
    sensitivity floor (noiseless data has no noise to compare with).
    """
    n = residual.size
    dt = tau[1] - tau[0]
    fk = np.fft.rfft(residual - residual.mean())
    amp = 2.0 * np.abs(fk) / n
    nk = amp.size
    if nk <= k_min + 2:
        return _BeatSearch(False)
    kpk = k_min + int(np.argmax(amp[k_min:]))
    m = max(3, int(0.02 * n))
    lo, hi = max(kpk - m, k_min), min(kpk + m + 1, nk)
    # analytic band signal: positive frequencies only, magnitude = envelope
    full = np.zeros(n, dtype=complex)
    full[lo:hi] = fk[lo:hi]
    z_analytic = 2.0 * np.fft.ifft(full)
    envelope = np.abs(z_analytic)
    amp_est = float(envelope.max())
    tail_from = max(2 * kpk, int(0.6 * nk))
    if nk - tail_from > 4:
        sigma2 = float(np.mean(np.abs(fk[tail_from:]) ** 2)) * 2.0 / n
    else:
        sigma2 = 0.0
    band_sigma = math.sqrt(max(sigma2, 0.0) * (hi - lo) / n)
    # sub-bin frequency refinement (parabolic on the magnitude peak)
    dw = 2.0 * math.pi * kpk / (n * dt)
    if k_min < kpk < nk - 1:
        y0, y1, y2 = amp[kpk - 1], amp[kpk], amp[kpk + 1]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            dw += 2.0 * math.pi * (0.5 * (y0 - y2) / denom) / (n * dt)
    i_env = int(np.argmax(envelope))
    e2 = envelope**2
    w_env = math.sqrt(float(((tau - tau[i_env]) ** 2 * e2).sum() / e2.sum()))
    w_env *= math.sqrt(2.0)      # envelope^2 is narrower by sqrt(2)
    # deepest dip within a beat period of the envelope peak
    period = 2.0 * math.pi / dw if dw > 0 else 4 * dt
    near = np.abs(tau - tau[i_env]) <= 0.75 * period
    z_re = z_analytic.real
    center = float(tau[near][np.argmin(z_re[near])]) if near.any() else float(tau[i_env])
    detected = amp_est > max(3.0 * band_sigma, floor_rel * r_dist0)
    return _BeatSearch(bool(detected), float(dw), amp_est, band_sigma,
                       center, w_env)


def _linear_beat_stage(tau, counts, weights, r_dist0, beat: _BeatSearch,
                       w_env: float):
    """Pin (R_dist, A, tau0, dw) by scanning the beat frequency.

    For a fixed frequency and a fixed Gaussian envelope the model is
    linear in (R_dist, in-phase, quadrature):

        C(tau) ~ R + env(tau) [P cos(dw tau) + Q sin(dw tau)],

    so a weighted linear solve per candidate frequency finds the global
    phase/amplitude basin that plain Gauss-Newton can then polish.  The
    scan covers +-2 DFT bins around the detected peak.
    """
    n = tau.size
    span = tau[-1] - tau[0]
    dk = 2.0 * math.pi / span          # one DFT bin, rad/s
    center = tau[np.argmin(np.abs(tau - beat.center))]
    env = np.exp(-((tau - center) ** 2) / (2.0 * w_env * w_env))
    sw = np.sqrt(weights)
    best = None
    for dw in np.linspace(beat.dw - 2 * dk, beat.dw + 2 * dk, 41):
        if dw <= 0:
            continue
        design = np.column_stack([np.ones(n), env * np.cos(dw * tau),
                                  env * np.sin(dw * tau)]) * sw[:, None]
        coef, res, *_ = np.linalg.lstsq(design, counts * sw, rcond=None)
        cost = float(res[0]) if res.size else float(
            np.sum((design @ coef - counts * sw) ** 2))
        if best is None or cost < best[0]:
            best = (cost, dw, coef)
    _, dw, (rd, p, q) = best
    amp = math.hypot(p, q)
    a0 = amp / rd if rd > 0 else 0.0
    # P cos + Q sin = amp * cos(dw tau - phi); the model needs
    # -Rd A cos(dw (tau - tau0)), i.e. phi = dw tau0 + pi.
    phi = math.atan2(q, p)
    t0 = (phi - math.pi) / dw
    period = 2.0 * math.pi / dw
    t0 += period * round((center - t0) / period)
    return float(rd), float(a0), float(t0), float(dw)


def _run_fringe_gn(tau, counts, sqw, theta0, free, strict=True):
    """Damped Gauss-Newton on the fringe model with a subset of free params."""

    def resid(th_free):
        th = theta0.copy()
        th[free] = th_free
        return (_fringe_model(tau, th) - counts) * sqw

    def jac(th_free):
        th = theta0.copy()
        th[free] = th_free
        return _fringe_jac(tau, th)[:, free] * sqw[:, None]

    return gauss_newton(resid, jac, theta0[free], raise_on_maxiter=strict)


def fit_fringe(data: Interferogram, floor_rel: float = FRINGE_FLOOR_REL,
               outer_fraction: float = 0.2) -> FringeFit:
    """Fit the fringe model to an interferogram.

    Initialization: R_dist from the mean of the outer `outer_fraction`
    of bins, the beat frequency from the dominant non-zero DFT peak of
    the envelope-subtracted data, amplitude and envelope width from the
    central excursion.  Weighted by 1/max(C, 1) (Poisson).  When no
    beat survives envelope subtraction the model degenerates to its
    envelope (dw = 0) and the fit is flagged "no_fringe".
    """
    tau = data.delays
    counts = data.counts
    n = counts.size
    if n < 50:
        raise DegenerateDataError("degenerate data: need at least 50 bins")
    k = max(1, int(outer_fraction * n / 2))
    r_dist0 = float(np.concatenate([counts[:k], counts[-k:]]).mean())
    if r_dist0 <= 0:
        raise DegenerateDataError("degenerate data: empty outer bins")

    exc = np.maximum(r_dist0 - counts, 0.0)
    a0 = float(exc.max() / r_dist0)
    span = tau[-1] - tau[0]
    if a0 < 1e-12:
        # flat data: nothing to iterate on
        cov = np.zeros((5, 5))
        cov[0, 0] = float(np.var(counts, ddof=1) / n) if n > 1 else 0.0
        return FringeFit(r_dist0, r_dist0, 0.0, span / 4.0,
                         float(tau[n // 2]), 0.0, cov,
                         float(np.linalg.norm((counts - r_dist0)
                                              / np.sqrt(np.maximum(counts, 1.0)))),
                         no_fringe=True, flags=("no_fringe", "flat"))
    t00 = float(tau[np.argmax(exc)])
    wsum = exc.sum()
    w0 = float(math.sqrt(((tau - t00) ** 2 * exc).sum() / wsum)) if wsum > 0 \
        else span / 4.0
    w0 = min(max(w0, 2.0 * (tau[1] - tau[0])), span)

    weights = 1.0 / np.maximum(counts, 1.0)
    sqw = np.sqrt(weights)
    theta_env = np.array([r_dist0, a0, t00, w0, 0.0])
    free_env = np.arange(4)       # envelope-only: dw pinned at 0

    # Envelope-only pre-fit; a beat is whatever it cannot absorb.  The
    # envelope model on beat-free ripple data is nearly degenerate in
    # (tau0, w), so this fit is deliberately non-strict.
    env_res = _run_fringe_gn(tau, counts, sqw, theta_env, free_env, strict=False)
    env_theta = theta_env.copy()
    env_theta[free_env] = env_res.params
    residual = counts - _fringe_model(tau, env_theta)
    beat = _detect_fringe(tau, residual, r_dist0, floor_rel)

    if not beat.detected:
        flags = ("no_fringe",) if env_res.converged \
            else ("no_fringe", "not_converged")
        return _fringefit_from(env_res, theta_env, free_env, tau, flags)

    dt = tau[1] - tau[0]
    w_beat = min(max(beat.env_width, 2.0 * dt), span)
    rd1, a1, t01, dw1 = _linear_beat_stage(tau, counts, weights, r_dist0,
                                           beat, w_beat)
    a1 = min(max(a1, 1e-4), 0.6)
    # the linear stage pins tau0 only modulo the beat period; let the
    # envelope disambiguate by trying the neighbouring fringes too
    period = 2.0 * math.pi / dw1
    best_t0, best_cost = t01, math.inf
    for cand in (t01 - period, t01, t01 + period):
        model = _fringe_model(tau, np.array([rd1, a1, cand, w_beat, dw1]))
        cost = float(np.sum((model - counts) ** 2 * weights))
        if cost < best_cost:
            best_t0, best_cost = cand, cost
    theta0 = np.array([rd1, a1, best_t0, w_beat, dw1])
    free = np.arange(5)
    try:
        res = _run_fringe_gn(tau, counts, sqw, theta0, free)
    except FitConvergenceError as err:
        raise FitConvergenceError(str(err),
                                  _fringefit_from(err.best, theta0, free, tau,
                                                  ("not_converged",))) from None
    return _fringefit_from(res, theta0, free, tau, ())


def _fringefit_from(res: FitResult, theta0, free, tau, flags) -> FringeFit:
    theta = theta0.copy()
    theta[free] = res.params
    rd, a, t0, w, dw = theta
    if w < 0:
        w = -w
    dt = tau[1] - tau[0]
    data_span = tau[-1] - tau[0]
    if not math.isfinite(w) or w < 0.5 * dt:
        # an envelope narrower than one bin carries no information;
        # noisy beat-free data can collapse onto a single spike
        w = 0.5 * dt
        flags = flags + ("degenerate_envelope",)
    elif w > 10.0 * data_span:
        # wider than the window = indistinguishable from flat
        w = 10.0 * data_span
        flags = flags + ("degenerate_envelope",)
    theta[3] = w
    mid = 0.5 * (tau[0] + tau[-1])
    if not math.isfinite(t0) or abs(t0 - mid) > 2.0 * data_span:
        # envelope centered far outside the window: nothing was fitted
        t0 = mid
        theta[2] = t0
        if "degenerate_envelope" not in flags:
            flags = flags + ("degenerate_envelope",)
    cov = np.zeros((5, 5))
    cov[np.ix_(free, free)] = res.covariance
    r_min, _ = fringe_minimum(theta, tau[0], tau[-1])
    return FringeFit(float(rd), float(r_min), float(dw), float(w), float(t0),
                     float(a), cov, res.residual_norm,
                     no_fringe=("no_fringe" in flags), flags=flags)


def fringe_minimum(theta: np.ndarray, lo: float, hi: float,
                   n_scan: int = 20001) -> tuple[float, float]:
    """Minimum of the fitted fringe model on [lo, hi] and its location.

    Dense scan plus one parabolic refinement; the model is smooth and
    the scan resolves the beat by construction.
    """
    taus = np.linspace(lo, hi, n_scan)
    vals = _fringe_model(taus, theta)
    i = int(np.argmin(vals))
    if 0 < i < n_scan - 1:
        y0, y1, y2 = vals[i - 1], vals[i], vals[i + 1]
        denom = (y0 - 2 * y1 + y2)
        if denom > 0:
            dxs = 0.5 * (y0 - y2) / denom
            t_star = taus[i] + dxs * (taus[1] - taus[0])
            return float(_fringe_model(np.array([t_star]), theta)[0]), float(t_star)
    return float(vals[i]), float(taus[i])


# ---------------------------------------------------------------------------
# Visibility
# ---------------------------------------------------------------------------

def visibility(r_dist: float, r_min: float) -> float:
    """Raw dip visibility V = (R_dist - R_min) / R_dist."""
    if r_dist <= 0:
        raise ValueError("R_dist must be positive")
    if not (0.0 <= r_min <= r_dist):
        raise ValueError("R_min must lie in [0, R_dist]")
    return (r_dist - r_min) / r_dist


def corrected_visibility(r_dist: float, r_min: float) -> float:
    """Visibility rescaled by the coherent-state 50% ceiling, so that
    perfect indistinguishability gives 1:  Vcal = V / 0.5."""
    return visibility(r_dist, r_min) / WCS_VISIBILITY_FLOOR


# ---------------------------------------------------------------------------
# Closed-form K for Gaussian spectra, with gradient
# ---------------------------------------------------------------------------

def gaussian_pair_distinguishability(center1: float, std1: float,
                                     center2: float, std2: float):
    """K and its gradient for two Gaussian intensity spectra.

    The Bhattacharyya overlap of two normal distributions
    N(c1, s1^2), N(c2, s2^2) is

        B = sqrt(2 s1 s2 / (s1^2 + s2^2)) * exp(-(c1-c2)^2 / (4 (s1^2+s2^2)))

    and K = 1 - B^2.  Returns (K, dK/d(c1, s1, c2, s2)).
    """
    if std1 <= 0 or std2 <= 0:
        raise ValueError("stds must be positive")
    q = std1 * std1 + std2 * std2
    delta = center1 - center2
    pref = 2.0 * std1 * std2 / q
    expo = math.exp(-delta * delta / (2.0 * q))
    b2 = pref * expo
    k = 1.0 - b2
    # d(b2)/dc1 = b2 * (-delta/q); dc2 = +delta/q
    dk_dc1 = b2 * delta / q
    dk_dc2 = -dk_dc1
    # d(pref)/ds1 = 2 s2 (s2^2 - s1^2)/q^2 ; d(expo)/ds1 = expo * delta^2 s1 / q^2
    dpref_ds1 = 2.0 * std2 * (std2 * std2 - std1 * std1) / (q * q)
    dexpo_ds1 = expo * delta * delta * std1 / (q * q)
    dk_ds1 = -(dpref_ds1 * expo + pref * dexpo_ds1)
    dpref_ds2 = 2.0 * std1 * (std1 * std1 - std2 * std2) / (q * q)
    dexpo_ds2 = expo * delta * delta * std2 / (q * q)
    dk_ds2 = -(dpref_ds2 * expo + pref * dexpo_ds2)
    grad = np.array([dk_dc1, dk_ds1, dk_dc2, dk_ds2])
    return min(max(k, 0.0), 1.0), grad


# ---------------------------------------------------------------------------
# First-order error propagation into a record
# ---------------------------------------------------------------------------

def _check_finite_cov(cov: np.ndarray, what: str):
    if not np.all(np.isfinite(cov)):
        raise ValueError(f"singular covariance in {what}")


def propagate_errors(spectrum_fit1: GaussianFit, spectrum_fit2: GaussianFit,
                     fringe: FringeFit, pt_s: Optional[float] = None) -> ComplementarityRecord:
    """Assemble a complementarity record with first-order uncertainties.

    K comes from the two Gaussian spectrum fits via the closed form
    above; its variance from the (center, std) covariance blocks of the
    two fits, which are independent measurements.  V and Vcal come from
    (R_dist, R_min) of the fringe fit; R_min is the fitted-model
    minimum, so its sensitivity to the fit parameters is the partial
    derivative of the model at the minimizing delay (envelope theorem).
    S = K^2 + Vcal^2 assumes K and Vcal independent, which they are
    here (spectra and interferogram are separate acquisitions).
    """
    for f, name in ((spectrum_fit1, "spectrum fit 1"),
                    (spectrum_fit2, "spectrum fit 2")):
        _check_finite_cov(f.covariance, name)
    _check_finite_cov(fringe.covariance, "fringe fit")

    k, grad = gaussian_pair_distinguishability(
        spectrum_fit1.center, spectrum_fit1.std,
        spectrum_fit2.center, spectrum_fit2.std)
    j1 = grad[:2]
    j2 = grad[2:]
    var_k = float(j1 @ spectrum_fit1.center_std_cov @ j1
                  + j2 @ spectrum_fit2.center_std_cov @ j2)

    rd = fringe.r_dist
    rm = fringe.r_min
    if rd <= 0:
        raise ValueError("fringe fit has non-positive R_dist")
    theta = fringe.params
    # minimizing delay of the fitted model (for the envelope theorem)
    span = 6.0 * fringe.envelope_width
    _, t_star = fringe_minimum(theta, fringe.tau0 - span, fringe.tau0 + span)
    d_model = _fringe_jac(np.array([t_star]), theta)[0]   # dC/dtheta at the min
    g = np.zeros((2, 5))
    g[0, 0] = 1.0            # R_dist is a bare parameter
    g[1, :] = d_model        # R_min moves with the model at t_star
    cov_rd_rm = g @ fringe.covariance @ g.T

    v = (rd - rm) / rd       # not clamped: noise may push it past the floor
    jv = np.array([rm / (rd * rd), -1.0 / rd])
    var_v = float(jv @ cov_rd_rm @ jv)
    vcal = v / WCS_VISIBILITY_FLOOR
    sigma_v = math.sqrt(max(var_v, 0.0))
    sigma_vcal = sigma_v / WCS_VISIBILITY_FLOOR

    s_val = k * k + vcal * vcal
    sigma_k = math.sqrt(max(var_k, 0.0))
    sigma_s = math.sqrt((2.0 * k * sigma_k) ** 2 + (2.0 * vcal * sigma_vcal) ** 2)

    return ComplementarityRecord(pt_s, k, sigma_k, v, sigma_v,
                                 vcal, sigma_vcal, s_val, sigma_s,
                                 flags=fringe.flags)
