"""Monte Carlo random-telegraph simulation, an independent check on the Lorentzian model.

Each fluctuator is a symmetric two-state (+1/-1) Markov process whose
autocorrelation decays as exp(-Gamma |t|), Gamma = taf_rate(E_a, T, tau0);
each transition direction therefore fires at rate Gamma/2. The one-sided
power spectral density in units^2/Hz is ``4 tau / (1 + (2 pi f tau)^2)``.

Sampling on a regular grid is exact: between samples the state flips with
probability ``(1 - exp(-Gamma dt)) / 2``, so flip gaps are geometric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal
from scipy.special import digamma, polygamma

from .constants import TAU0_DEFAULT
from .errors import InputError, NumericalError
from .physics import taf_rate


@dataclass(frozen=True)
class Periodogram:
    frequency_Hz: np.ndarray
    psd: np.ndarray
    temperature_K: float
    n_segments: int
    rates: np.ndarray

    @property
    def omega(self):
        return 2 * np.pi * self.frequency_Hz

    @property
    def dof(self) -> float:
        return welch_dof(self.n_segments)


def welch_dof(n_segments: int) -> float:
    """Equivalent chi-square degrees of freedom of a Hann, 50%-overlap Welch estimate."""
    k = n_segments
    if k <= 1:
        return 2.0
    return 36.0 * k**2 / (19.0 * k - 1.0)


def telegraph_signal(rate, n_samples, dt, rng) -> np.ndarray:
    """One +/-1 telegraph trace of relaxation rate ``rate`` sampled every ``dt``."""
    p = 0.5 * -np.expm1(-rate * dt)
    state = np.zeros(n_samples, dtype=np.int8)
    if p > 0:
        # geometric gaps between flips; draw in blocks until the trace is covered
        flips = []
        pos = 0
        block = max(16, int(n_samples * p * 1.1) + 16)
        while pos < n_samples:
            gaps = rng.geometric(p, size=block)
            idx = pos + np.cumsum(gaps)
            flips.append(idx[idx < n_samples])
            pos = int(idx[-1])
        toggles = np.zeros(n_samples, dtype=np.int8)
        toggles[np.concatenate(flips)] = 1
        state = np.cumsum(toggles, dtype=np.int64) & 1
    s0 = 1 if rng.random() < 0.5 else 0
    return 1.0 - 2.0 * (state ^ s0)


def rts_montecarlo(energies_eV, T, tau0=TAU0_DEFAULT, duration=1e-2, sample_rate=1e8, seed=0,
                   nperseg=None) -> Periodogram:
    """Sum of independent telegraph fluctuators and its Welch-averaged periodogram.

    Each fluctuator draws from its own stream spawned from ``seed``, so the
    result does not depend on evaluation order.
    """
    E = np.atleast_1d(np.asarray(energies_eV, float))
    if duration <= 0 or sample_rate <= 0:
        raise InputError("duration and sample_rate must be positive")
    n = int(round(duration * sample_rate))
    if nperseg is None:
        nperseg = min(n, 4096)
    if nperseg > n or nperseg < 8:
        raise InputError(f"nperseg={nperseg} incompatible with {n} samples")
    dt = 1.0 / sample_rate
    rates = taf_rate(E, T, tau0) if E.size else np.array([])
    if rates.size and sample_rate <= 10 * rates.max():
        raise InputError(
            f"undersampled: sample_rate {sample_rate:g}/s must exceed 10 x max rate {rates.max():g}/s")
    if rates.size and duration * rates.min() < 10:
        raise InputError(f"duration too short: duration x min rate = {duration * rates.min():.3g} (need >= 10)")

    total = np.zeros(n)
    streams = np.random.SeedSequence(seed).spawn(E.size)
    for rate, ss in zip(rates, streams):
        total += telegraph_signal(rate, n, dt, np.random.default_rng(ss))
    f, psd = signal.welch(total, fs=sample_rate, window="hann", nperseg=nperseg,
                          noverlap=nperseg // 2, detrend="constant", scaling="density")
    n_seg = 1 + (n - nperseg) // (nperseg - nperseg // 2)
    # the DC bin is meaningless after detrending
    return Periodogram(f[1:], psd[1:], float(T), n_seg, rates)


def telegraph_psd(frequency_Hz, rates, weights=None):
    """Analytic one-sided PSD of a sum of unit-amplitude telegraph processes."""
    f = np.asarray(frequency_Hz, float)[..., None]
    r = np.atleast_1d(np.asarray(rates, float))
    w = np.ones_like(r) if weights is None else np.asarray(weights, float)
    tau = 1.0 / r
    return np.sum(w * 4 * tau / (1 + (2 * np.pi * f * tau) ** 2), axis=-1)


@dataclass(frozen=True)
class LorentzianFit:
    amplitude: float
    corner_rate: float
    corner_rate_err: float
    reduced_chi2: float
    dof: int


def fit_lorentzian(pg: Periodogram, f_min=None, f_max=None) -> LorentzianFit:
    """Fit psd = a / (1 + (2 pi f / Gamma)^2) in log space over a frequency band.

    Each Welch bin is chi-square distributed with ``pg.dof`` degrees of
    freedom, so ln(psd) has variance trigamma(dof/2).
    """
    m = np.ones(pg.frequency_Hz.size, bool)
    if f_min is not None:
        m &= pg.frequency_Hz >= f_min
    if f_max is not None:
        m &= pg.frequency_Hz <= f_max
    f, p = pg.frequency_Hz[m], pg.psd[m]
    if f.size < 3 or np.any(p <= 0):
        raise InputError("need at least 3 positive bins to fit a Lorentzian")
    nu = pg.dof
    sigma_ln = np.sqrt(float(polygamma(1, nu / 2)))
    # mean of ln(chi2_nu / nu) is biased low by this much
    bias = float(digamma(nu / 2) - np.log(nu / 2))
    y = np.log(p) - bias

    def resid(theta):
        ln_a, ln_g = theta
        return (y - (ln_a - np.log1p((2 * np.pi * f / np.exp(ln_g)) ** 2))) / sigma_ln

    g0 = 2 * np.pi * f[np.argmin(np.abs(p - p[0] / 2))]
    sol = optimize.least_squares(resid, x0=[np.log(p[0]), np.log(g0)], method="lm")
    if not sol.success:
        raise NumericalError("Lorentzian fit failed", {"message": sol.message})
    dof = f.size - 2
    chi2 = float(np.sum(sol.fun ** 2))
    cov = np.linalg.pinv(sol.jac.T @ sol.jac)
    g = float(np.exp(sol.x[1]))
    return LorentzianFit(float(np.exp(sol.x[0])), g, g * float(np.sqrt(cov[1, 1])), chi2 / max(dof, 1), dof)


def periodogram_alpha(pg: Periodogram, f_min, f_max):
    """Least-squares log-log slope (-alpha) of the periodogram over [f_min, f_max] Hz."""
    m = (pg.frequency_Hz >= f_min) & (pg.frequency_Hz <= f_max)
    if m.sum() < 3:
        raise InputError("fewer than 3 periodogram bins in the requested band")
    slope, _ = np.polyfit(np.log(pg.frequency_Hz[m]), np.log(pg.psd[m]), 1)
    return float(-slope)


def band_alpha(rates, f_min, f_max, n=64):
    """Same band-averaged log-log slope, computed from the analytic PSD."""
    f = np.geomspace(f_min, f_max, n)
    slope, _ = np.polyfit(np.log(f), np.log(telegraph_psd(f, rates)), 1)
    return float(-slope)

