"""Fit heating-rate temperature scans with a TAF model whose energy density is a sum of Gaussians."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from ..constants import CA40, IonSpecies
from ..distributions import GaussianMixture
from ..errors import DegenerateFitError, InputError, NumericalError
from ..physics import HeatingRateSeries, field_noise_to_heating_rate
from ..taf import TafModelConfig, ensemble_spectrum
from .fitting import FitReport


@dataclass(frozen=True)
class GaussianBasisSpec:
    """Equally spaced Gaussian centres with a common width.

    ``fwhm_eV`` defaults to the centre spacing. With a single Gaussian there is
    no spacing, so the default width is the full centre range.
    """

    n_gaussians: int = 5
    center_min_eV: float = 0.3
    center_max_eV: float = 0.65
    fwhm_eV: Optional[float] = None
    basis_shift_eV: float = 0.0

    def __post_init__(self):
        if self.n_gaussians < 1:
            raise InputError("n_gaussians must be >= 1")
        if not self.center_max_eV > self.center_min_eV:
            raise InputError("center_max_eV must exceed center_min_eV")
        if self.fwhm_eV is not None and not self.fwhm_eV > 0:
            raise InputError("fwhm_eV must be positive")

    @classmethod
    def reference(cls, basis_shift_eV=0.0):
        """Five Gaussians over 0.3-0.65 eV with the reference 0.07 eV width."""
        return cls(5, 0.3, 0.65, 0.07, basis_shift_eV)

    @property
    def spacing(self) -> float:
        if self.n_gaussians == 1:
            return self.center_max_eV - self.center_min_eV
        return (self.center_max_eV - self.center_min_eV) / (self.n_gaussians - 1)

    @property
    def centers(self) -> np.ndarray:
        if self.n_gaussians == 1:
            return np.array([0.5 * (self.center_min_eV + self.center_max_eV) + self.basis_shift_eV])
        return np.linspace(self.center_min_eV, self.center_max_eV, self.n_gaussians) + self.basis_shift_eV

    @property
    def width(self) -> float:
        return self.spacing if self.fwhm_eV is None else self.fwhm_eV

    def shifted(self, shift_eV):
        return GaussianBasisSpec(self.n_gaussians, self.center_min_eV, self.center_max_eV, self.fwhm_eV, shift_eV)


def model_heating_rate(D, series: HeatingRateSeries, cfg: TafModelConfig, ion: IonSpecies = CA40):
    """Heating rates the TAF model predicts for the series' (omega, T) points."""
    w = series.frequency_rad_per_s
    S = ensemble_spectrum(D, w, series.temperature_K, cfg)
    return field_noise_to_heating_rate(S, w, ion)


def _sigma(series):
    err = series.heating_rate_err
    if np.all(err == 0):
        return np.ones(len(series))
    if np.any(err <= 0):
        raise InputError("heating-rate errors must be all positive or all zero")
    return err


def fit_gaussian_basis(series: HeatingRateSeries, spec: GaussianBasisSpec = GaussianBasisSpec(),
                       cfg: TafModelConfig = TafModelConfig(), ion: IonSpecies = CA40):
    """Non-negative amplitudes of a fixed Gaussian basis, by NNLS.

    Returns ``(GaussianMixture, FitReport)``; amplitudes are in the same
    arbitrary density units as the rest of the TAF model.
    """
    if len(series) < spec.n_gaussians:
        raise InputError(f"need at least {spec.n_gaussians} temperatures for {spec.n_gaussians} Gaussians")
    sigma = _sigma(series)
    y = series.heating_rate
    centers, width = spec.centers, spec.width
    if np.any(centers - 0 < 0):
        raise InputError("shifted Gaussian centres must stay >= 0 eV")
    cols = [model_heating_rate(GaussianMixture.single(c, width, 1.0), series, cfg, ion) for c in centers]
    G = np.column_stack(cols) / sigma[:, None]
    norms = np.linalg.norm(G, axis=0)
    if np.any(norms == 0):
        raise DegenerateFitError("a basis Gaussian produces no noise at the measured temperatures",
                                 {"centers": centers.tolist()})
    try:
        x, _ = optimize.nnls(G / norms, y / sigma)
    except RuntimeError as exc:
        raise DegenerateFitError(f"NNLS failed: {exc}") from exc
    amps = x / norms
    if not np.any(amps > 0):
        raise DegenerateFitError("NNLS returned an all-zero distribution")
    r = (y - G @ amps * sigma) / sigma
    chi2 = float(r @ r)
    errs = np.zeros_like(amps)
    active = amps > 0
    Ga = G[:, active]
    try:
        cov = np.linalg.inv(Ga.T @ Ga)
        errs[active] = np.sqrt(np.diag(cov))
    except np.linalg.LinAlgError:
        errs[active] = np.nan
    D = GaussianMixture.from_arrays(centers, width, amps)
    params = {f"amp_{i}": (float(a), float(e)) for i, (a, e) in enumerate(zip(amps, errs))}
    dof = max(len(series) - int(active.sum()), 0)
    notes = [f"centers_eV={np.round(centers, 6).tolist()}", f"fwhm_eV={width:g}"]
    return D, FitReport("gaussian_basis", params, chi2, dof, r, notes)


def basis_shift_sweep(series, spec: GaussianBasisSpec, shifts, cfg=TafModelConfig(), ion=CA40):
    """Refit with every Gaussian centre moved by each of ``shifts`` (eV)."""
    return [fit_gaussian_basis(series, spec.shifted(s), cfg, ion) for s in shifts]


def fit_single_gaussian(series: HeatingRateSeries, cfg: TafModelConfig = TafModelConfig(),
                        ion: IonSpecies = CA40, center0=0.5, fwhm0=0.2):
    """One Gaussian with amplitude, centre and width all free (bounded LM-style fit)."""
    if len(series) < 4:
        raise InputError("a free single-Gaussian fit needs at least 4 temperatures")
    sigma = _sigma(series)
    y = series.heating_rate
    unit = model_heating_rate(GaussianMixture.single(center0, fwhm0, 1.0), series, cfg, ion)
    a0 = float((unit / sigma) @ (y / sigma) / ((unit / sigma) @ (unit / sigma)))
    if not a0 > 0:
        raise DegenerateFitError("initial amplitude is not positive")

    def resid(p):
        ln_a, c, w = p
        m = model_heating_rate(GaussianMixture.single(c, w, np.exp(ln_a)), series, cfg, ion)
        return (y - m) / sigma

    sol = optimize.least_squares(resid, [np.log(a0), center0, fwhm0],
                                 bounds=([-np.inf, 0.05, 0.01], [np.inf, 1.5, 1.0]), x_scale=[1.0, 0.05, 0.05])
    if not sol.success:
        raise NumericalError("single-Gaussian fit failed", {"message": sol.message})
    try:
        cov = np.linalg.inv(sol.jac.T @ sol.jac)
    except np.linalg.LinAlgError:
        cov = np.full((3, 3), np.nan)
    ln_a, c, w = sol.x
    amp = float(np.exp(ln_a))
    params = {"amplitude": (amp, amp * float(np.sqrt(cov[0, 0]))),
              "center_eV": (float(c), float(np.sqrt(cov[1, 1]))),
              "fwhm_eV": (float(w), float(np.sqrt(cov[2, 2])))}
    chi2 = float(sol.fun @ sol.fun)
    return GaussianMixture.single(c, w, amp), FitReport("single_gaussian", params, chi2, max(len(series) - 3, 0), sol.fun)
