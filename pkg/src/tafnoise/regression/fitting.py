"""Weighted least-squares fits of heating-rate data and goodness-of-fit statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from ..constants import K_B_EV
from ..errors import DegenerateFitError, InputError, NumericalError
from ..physics import HeatingRateSeries
from ..taf import AlphaEstimate


@dataclass
class FitReport:
    model_name: str
    parameters: dict  # name -> (value, 1-sigma error)
    chi2: float
    dof: int
    residuals: np.ndarray  # normalised: (data - model) / sigma
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.dof < 0:
            raise InputError("negative degrees of freedom")
        self.residuals = np.asarray(self.residuals, float)

    @property
    def reduced_chi2(self) -> float:
        # an exactly determined fit has nothing left to test
        return self.chi2 / self.dof if self.dof > 0 else 0.0

    @property
    def p_value(self) -> float:
        return chi2_p_value(self.chi2, self.dof)

    def value(self, name):
        return self.parameters[name][0]

    def error(self, name):
        return self.parameters[name][1]

    def as_dict(self):
        return {
            "model_name": self.model_name,
            "parameters": {k: {"value": float(v), "error": float(e)} for k, (v, e) in self.parameters.items()},
            "chi2": float(self.chi2),
            "dof": int(self.dof),
            "reduced_chi2": float(self.reduced_chi2),
            "p_value": float(self.p_value),
            "residuals": [float(r) for r in self.residuals],
            "notes": list(self.notes),
        }


def chi2_p_value(chi2, dof):
    """Upper-tail probability of the chi-square statistic."""
    if dof <= 0:
        return 1.0
    return float(stats.chi2.sf(chi2, dof))


def _sigma_or_ones(sigma, n):
    if sigma is None:
        return np.ones(n)
    sigma = np.broadcast_to(np.asarray(sigma, float), (n,)).copy()
    if np.any(sigma <= 0):
        raise InputError("uncertainties must be positive for a weighted fit")
    return sigma


def weighted_line(x, y, sigma=None):
    """Weighted straight-line fit y = a + b x. Returns (a, b, cov, chi2, normalised residuals)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    sigma = _sigma_or_ones(sigma, x.size)
    if np.unique(x).size < 2:
        raise InputError("a line fit needs at least two distinct x values")
    A = np.column_stack([np.ones_like(x), x]) / sigma[:, None]
    b = y / sigma
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    cov = np.linalg.inv(A.T @ A)
    r = b - A @ coef
    return coef[0], coef[1], cov, float(r @ r), r


def fit_heating_rate(t_wait, nbar, sigma=None) -> FitReport:
    """Heating rate as the slope of mean phonon number vs wait time.

    Repeated cycles are pooled simply by concatenating all (t, nbar) pairs.
    """
    t_wait = np.asarray(t_wait, float)
    nbar = np.asarray(nbar, float)
    if t_wait.shape != nbar.shape or t_wait.ndim != 1:
        raise InputError("t_wait and nbar must be 1-D arrays of equal length")
    a, b, cov, chi2, r = weighted_line(t_wait, nbar, sigma)
    return FitReport(
        "linear_heating",
        {"intercept": (a, np.sqrt(cov[0, 0])), "heating_rate": (b, np.sqrt(cov[1, 1]))},
        chi2, t_wait.size - 2, r,
    )


def _temperature_data(series: HeatingRateSeries):
    T = series.temperature_K
    y = series.heating_rate
    if np.any(T <= 0) or np.any(y <= 0):
        raise InputError("temperatures and heating rates must be positive")
    sigma = series.heating_rate_err
    if np.all(sigma == 0):
        sigma = None
    return T, y, _sigma_or_ones(sigma, T.size)


def _nonlinear_fit(name, model, jac, p0, x, y, sigma, names):
    if x.size <= len(p0) - 1:
        raise InputError(f"{name} fit needs at least {len(p0)} points")

    def resid(p):
        return (y - model(x, p)) / sigma

    def rjac(p):
        return -jac(x, p) / sigma[:, None]

    sol = optimize.least_squares(resid, p0, jac=rjac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if not sol.success:
        raise NumericalError(f"{name} fit did not converge", {"message": sol.message})
    J = sol.jac
    try:
        cov = np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError as exc:
        raise DegenerateFitError(f"{name} fit has a singular covariance") from exc
    chi2 = float(sol.fun @ sol.fun)
    params = {n: (float(v), float(np.sqrt(cov[i, i]))) for i, (n, v) in enumerate(zip(names, sol.x))}
    return FitReport(name, params, chi2, x.size - len(p0), sol.fun), cov


def fit_power_law(series: HeatingRateSeries) -> FitReport:
    """Fit ndot = ndot0 * T**gamma (log-space start, then weighted LM on the raw scale)."""
    T, y, sigma = _temperature_data(series)
    # weights for ln(y) are (y/sigma)^2
    a, g, *_ = weighted_line(np.log(T), np.log(y), sigma / y)
    T_ref = np.exp(np.mean(np.log(T)))
    # parametrise the amplitude at a reference temperature to decorrelate it from gamma
    model = lambda x, p: p[0] * (x / T_ref) ** p[1]
    jac = lambda x, p: np.column_stack([(x / T_ref) ** p[1], p[0] * (x / T_ref) ** p[1] * np.log(x / T_ref)])
    p0 = [np.exp(a) * T_ref**g, g]
    rep, cov = _nonlinear_fit("power_law", model, jac, p0, T, y, sigma, ["amp_at_Tref", "gamma"])
    A, gamma = rep.value("amp_at_Tref"), rep.value("gamma")
    n0 = A * T_ref ** (-gamma)
    # ndot0 = A T_ref^-gamma, propagate through (A, gamma)
    grad = np.array([T_ref ** (-gamma), -n0 * np.log(T_ref)])
    rep.parameters["ndot0"] = (n0, float(np.sqrt(grad @ cov @ grad)))
    rep.parameters["T_ref"] = (T_ref, 0.0)
    return rep


def fit_arrhenius(series: HeatingRateSeries) -> FitReport:
    """Fit ndot = ndot0 * exp(-T0/T); also reports E_b = k_B T0 in eV."""
    T, y, sigma = _temperature_data(series)
    a, b, *_ = weighted_line(1.0 / T, np.log(y), sigma / y)
    T_ref = 1.0 / np.mean(1.0 / T)
    model = lambda x, p: p[0] * np.exp(-p[1] * (1.0 / x - 1.0 / T_ref))
    jac = lambda x, p: np.column_stack([
        np.exp(-p[1] * (1.0 / x - 1.0 / T_ref)),
        -p[0] * (1.0 / x - 1.0 / T_ref) * np.exp(-p[1] * (1.0 / x - 1.0 / T_ref)),
    ])
    p0 = [np.exp(a + b / T_ref), -b]
    rep, cov = _nonlinear_fit("arrhenius", model, jac, p0, T, y, sigma, ["amp_at_Tref", "T0"])
    A, T0 = rep.value("amp_at_Tref"), rep.value("T0")
    n0 = A * np.exp(T0 / T_ref)
    grad = np.array([np.exp(T0 / T_ref), n0 / T_ref])
    rep.parameters["ndot0"] = (n0, float(np.sqrt(grad @ cov @ grad)))
    rep.parameters["E_b_eV"] = (K_B_EV * T0, K_B_EV * rep.error("T0"))
    rep.parameters["T_ref"] = (T_ref, 0.0)
    return rep


def alpha_two_point(omega1, ndot1, err1, omega2, ndot2, err2):
    """alpha from two frequencies: alpha + 1 = ln(ndot1/ndot2) / ln(omega2/omega1)."""
    if omega1 == omega2:
        raise InputError("two distinct frequencies are required")
    L = np.log(omega2 / omega1)
    alpha = np.log(ndot1 / ndot2) / L - 1.0
    err = np.sqrt((err1 / ndot1) ** 2 + (err2 / ndot2) ** 2) / abs(L)
    return float(alpha), float(err)


def fit_frequency_scaling(series: HeatingRateSeries):
    """Fit ndot = c / omega**(alpha+1) at fixed temperature.

    Returns ``(AlphaEstimate, FitReport)``. The fit is linear in log space with
    weights from the relative heating-rate errors, which for two points is the
    exact two-point formula.
    """
    w = series.frequency_rad_per_s
    y = series.heating_rate
    if np.unique(w).size < 2:
        raise InputError("frequency scaling needs at least two distinct frequencies")
    if np.any(y <= 0):
        raise InputError("heating rates must be positive")
    err = series.heating_rate_err
    sigma_ln = None if np.all(err == 0) else err / y
    a, b, cov, chi2, r = weighted_line(np.log(w), np.log(y), sigma_ln)
    alpha = -b - 1.0
    alpha_err = float(np.sqrt(cov[1, 1]))
    T = float(np.mean(series.temperature_K))
    rep = FitReport("frequency_scaling", {"alpha": (alpha, alpha_err), "ln_c": (a, float(np.sqrt(cov[0, 0])))},
                    chi2, w.size - 2, r)
    return AlphaEstimate(float(alpha), alpha_err, T, (float(w.min()), float(w.max()))), rep
