"""End-to-end analyses on heating-rate series: smoothing, inversion, alpha prediction and sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import CA40, IonSpecies
from .distributions import TabulatedDistribution
from .errors import InputError
from .physics import (
    HeatingRateSeries,
    NoiseCurve,
    dominant_energy,
    series_to_noise_curve,
)
from .regression import fit_frequency_scaling, loess_smooth, t_test_delta_alpha
from .taf import (
    CorrectionReport,
    TafModelConfig,
    alpha_from_temperature_slope,
    alpha_numeric_curve,
    ddh_correct,
    ddh_invert,
    ensemble_spectrum,
    extrapolate_spectrum,
    log_temperature_slope,
)


def smooth_noise_curve(curve: NoiseCurve, span=0.6, degree=2, n_grid=100) -> NoiseCurve:
    """LOESS-smoothed S(T) on a uniform temperature grid over the measured range.

    Smoothing is done on ln S vs ln T with weights from the relative errors,
    which keeps the curve positive and makes power laws exact.
    """
    T = curve.temperature_K
    S = curve.values
    if np.any(S <= 0):
        raise InputError("smoothing in log space needs S > 0")
    err = curve.errors
    sigma = None if err is None or np.all(err == 0) else err / S
    if sigma is not None and np.any(sigma <= 0):
        raise InputError("uncertainties must be all positive or all zero")
    sm = loess_smooth(np.log(T), np.log(S), sigma, span, degree)
    T_grid = np.linspace(T[0], T[-1], n_grid)
    lnS = sm(np.log(T_grid))
    S_grid = np.exp(lnS)
    S_err = S_grid * sm.stderr(np.log(T_grid)) if sigma is not None else None
    return NoiseCurve.temperature_scan(curve.omega, T_grid, S_grid, S_err)


@dataclass
class InversionResult:
    location: str
    omega: float
    measured: NoiseCurve
    smooth: NoiseCurve
    extended: NoiseCurve
    D_points: TabulatedDistribution
    D_ddh: TabulatedDistribution
    D_corr: TabulatedDistribution
    correction: CorrectionReport
    S_taf_ddh: np.ndarray
    S_taf_corr: np.ndarray
    notes: list = field(default_factory=list)
    tau0: float = 1e-13

    def window(self, D: TabulatedDistribution) -> TabulatedDistribution:
        """Restrict an extended-range distribution to the measured energy window."""
        lo, hi = dominant_energy(self.omega, self.measured.temperature_K[[0, -1]], self.tau0)
        m = (D.energies_eV >= lo - 1e-12) & (D.energies_eV <= hi + 1e-12)
        err = None if D.density_err is None else D.density_err[m]
        return TabulatedDistribution(D.energies_eV[m], D.densities[m], err)


def run_inversion(series: HeatingRateSeries, ion: IonSpecies = CA40, cfg: TafModelConfig = TafModelConfig(),
                  span=0.6, degree=2, n_grid=100, extend_K=150.0, raise_on_failure=True) -> InversionResult:
    """Smooth -> extrapolate -> DDH invert -> correct, as for one trap location."""
    measured = series_to_noise_curve(series, ion)
    if len(series) < degree + 2:
        raise InputError(f"location {series.location_id!r}: need at least {degree + 2} temperatures")
    smooth = smooth_noise_curve(measured, span, degree, n_grid)
    extended = extrapolate_spectrum(smooth, extend_K, extend_K)
    D_points = ddh_invert(measured, cfg)
    D_ddh = ddh_invert(extended, cfg)
    T_meas = (smooth.temperature_K[0], smooth.temperature_K[-1])
    D_corr, report = ddh_correct(extended, D_ddh, cfg, check_range=T_meas, raise_on_failure=raise_on_failure)
    w = measured.omega
    S_pre = ensemble_spectrum(D_ddh, w, smooth.temperature_K, cfg)
    S_post = ensemble_spectrum(D_corr, w, smooth.temperature_K, cfg)
    notes = []
    if not report.converged:
        notes.append(f"correction did not reach {cfg.correction_tol:.0%} in {report.iterations} steps")
    return InversionResult(series.location_id, w, measured, smooth, extended, D_points, D_ddh, D_corr,
                           report, S_pre, S_post, notes, cfg.tau0_s)


def predict_alpha_curve(inv: InversionResult, cfg: TafModelConfig = TafModelConfig()):
    """alpha(T) from the smoothed temperature dependence and from the corrected TAF model.

    Returns a dict of equal-length arrays over the interior temperatures where
    the derivative stencil fits inside the data.
    """
    T = inv.smooth.temperature_K
    h = cfg.fd_rel_step
    m = (T * (1 - h) >= T[0]) & (T * (1 + h) <= T[-1])
    Ti = T[m]
    slope = log_temperature_slope(inv.smooth, Ti, h)
    a_ddh = alpha_from_temperature_slope(slope, inv.omega, cfg.tau0_s)
    a_taf = alpha_numeric_curve(inv.D_corr, inv.omega, Ti, cfg)
    return {"temperature_K": Ti, "dlnS_dlnT": slope, "alpha_predicted": a_ddh, "alpha_taf_model": a_taf}


def group_by_temperature(series: HeatingRateSeries, tol_K=1e-9):
    """Split a frequency-scaling series into one series per temperature."""
    groups = []
    for p in series.points:
        for g in groups:
            if abs(g[0].temperature_K - p.temperature_K) <= tol_K:
                g.append(p)
                break
        else:
            groups.append([p])
    out = []
    for g in groups:
        g = sorted(g, key=lambda p: p.frequency_rad_per_s)
        out.append(HeatingRateSeries(series.location_id, tuple(g)))
    return out


def fit_alpha_by_temperature(series: HeatingRateSeries):
    """Frequency-scaling fits for every temperature present in a location's data."""
    results = []
    for sub in group_by_temperature(series):
        if np.unique(sub.frequency_rad_per_s).size < 2:
            continue
        est, rep = fit_frequency_scaling(sub)
        results.append((est, rep))
    if not results:
        raise InputError(f"location {series.location_id!r}: no temperature has two distinct frequencies")
    return results


def delta_alpha_pairs(per_location):
    """(low-T, high-T) alpha pairs, one per location with at least two temperatures."""
    pairs = []
    for loc, fits in per_location.items():
        if len(fits) < 2:
            continue
        ests = sorted((e for e, _ in fits), key=lambda e: e.temperature_K)
        pairs.append(((ests[0].alpha, ests[0].alpha_err), (ests[-1].alpha, ests[-1].alpha_err)))
    return pairs


def maybe_t_test(per_location):
    pairs = delta_alpha_pairs(per_location)
    if len(pairs) < 2:
        return None
    return t_test_delta_alpha(pairs)


