"""Thermally activated fluctuator (TAF) noise model.

Single fluctuators contribute Lorentzians ``A tau / (1 + (omega tau)^2)`` with
``tau = tau0 exp(E/kT)``; ensembles integrate that kernel against a density
D(E). The Dutta-Dimon-Horn (DDH) limit of the integral,
``S ~ A pi kT D(E_bar) / (2 omega)``, is used as the inversion constant so the
forward model and the inversion share one normalisation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .constants import K_B_EV, TAU0_DEFAULT
from .distributions import (
    DiscreteFluctuators,
    EnergyDistribution,
    TabulatedDistribution,
    iter_parts,
)
from .errors import BoundaryError, InputError, NumericalError, OutOfRegimeError
from .physics import NoiseCurve, dominant_energy

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TafModelConfig:
    tau0_s: float = TAU0_DEFAULT
    e_min_eV: float = 0.0
    e_max_eV: float = 2.0
    e_step_eV: float = 1e-3
    amplitude: float = 1.0
    # relative change allowed when the energy step is halved
    quad_tol: float = 1e-3
    check_quadrature: bool = False
    fd_rel_step: float = 0.01
    max_correction_iter: int = 3
    correction_tol: float = 0.02

    def __post_init__(self):
        if not (self.e_min_eV >= 0 and self.e_max_eV > self.e_min_eV):
            raise InputError("energy grid needs 0 <= e_min < e_max")
        if not self.e_step_eV > 0 or not self.tau0_s > 0:
            raise InputError("e_step and tau0 must be positive")
        if not 0 < self.fd_rel_step < 0.5:
            raise InputError("fd_rel_step must lie in (0, 0.5)")
        if self.max_correction_iter < 1:
            raise InputError("max_correction_iter must be >= 1")

    def energy_grid(self, step=None) -> np.ndarray:
        step = self.e_step_eV if step is None else step
        n = int(round((self.e_max_eV - self.e_min_eV) / step)) + 1
        return np.linspace(self.e_min_eV, self.e_max_eV, n)


@dataclass(frozen=True)
class AlphaEstimate:
    alpha: float
    alpha_err: float
    temperature_K: float
    frequency_band: tuple

    def as_dict(self):
        return {"alpha": self.alpha, "alpha_err": self.alpha_err, "temperature_K": self.temperature_K,
                "frequency_band_rad_per_s": list(self.frequency_band)}


def _half_sech(x):
    # 1 / (2 cosh x) without overflow
    ax = np.abs(x)
    e = np.exp(-ax)
    return e / (1.0 + e * e)


def _lorentzian(E, T, omega, tau0):
    """tau / (1 + (omega tau)^2), written as 1/(2 omega cosh(ln(omega tau)))."""
    x = np.log(omega * tau0) + E / (K_B_EV * T)
    return _half_sech(x) / omega


def single_taf_spectrum(E_a, T, omega, cfg: TafModelConfig = TafModelConfig()):
    """Noise of one fluctuator with barrier ``E_a`` (eV), arbitrary units."""
    E_a, T, omega = np.broadcast_arrays(*(np.asarray(v, float) for v in (E_a, T, omega)))
    if np.any(E_a < 0) or np.any(T <= 0) or np.any(omega <= 0):
        raise InputError("single_taf_spectrum needs E_a >= 0, T > 0, omega > 0")
    out = cfg.amplitude * _lorentzian(E_a, T, omega, cfg.tau0_s)
    return out if out.ndim else float(out)


def single_taf_peak_temperature(E_a, omega, tau0=TAU0_DEFAULT):
    """Temperature at which a fluctuator's switching rate equals ``omega``."""
    if omega * tau0 >= 1:
        raise OutOfRegimeError("omega*tau0 >= 1")
    return np.asarray(E_a, float) / (K_B_EV * np.log(1.0 / (omega * tau0)))


def _integrate(D, omega, T, cfg, step):
    E = cfg.energy_grid(step)
    dens = D(E)
    nz = np.nonzero(dens)[0]
    if nz.size == 0:
        return np.zeros(omega.shape)
    # trim to the non-zero support (plus one node each side) to save work
    lo, hi = max(nz[0] - 1, 0), min(nz[-1] + 2, E.size)
    E, dens = E[lo:hi], dens[lo:hi]
    out = np.empty(omega.shape)
    w_flat, T_flat, o_flat = omega.ravel(), T.ravel(), out.reshape(-1)
    chunk = max(1, 2_000_000 // E.size)
    for s in range(0, w_flat.size, chunk):
        w = w_flat[s:s + chunk, None]
        t = T_flat[s:s + chunk, None]
        kern = _lorentzian(E[None, :], t, w, cfg.tau0_s)
        o_flat[s:s + chunk] = np.trapezoid(dens[None, :] * kern, E, axis=1)
    return out


def ensemble_spectrum(D: EnergyDistribution, omega, T, cfg: TafModelConfig = TafModelConfig()):
    """A * integral D(E) tau/(1+(omega tau)^2) dE, broadcast over ``omega`` and ``T``.

    Discrete fluctuators are summed exactly; continuous parts use the
    trapezoidal rule on the configured energy grid. With
    ``cfg.check_quadrature`` the integral is repeated at half the energy step
    and a :class:`NumericalError` raised if it moves by more than ``quad_tol``.
    """
    omega, T = np.broadcast_arrays(np.asarray(omega, float), np.asarray(T, float))
    if np.any(omega <= 0) or np.any(T <= 0):
        raise InputError("omega and T must be positive")
    total = np.zeros(omega.shape)
    continuous = []
    for part in iter_parts(D):
        if isinstance(part, DiscreteFluctuators):
            for e, wgt in zip(part.energies_eV, part.weights):
                total = total + wgt * _lorentzian(e, T, omega, cfg.tau0_s)
        else:
            continuous.append(part)
    for part in continuous:
        val = _integrate(part, omega, T, cfg, cfg.e_step_eV)
        if cfg.check_quadrature:
            fine = _integrate(part, omega, T, cfg, cfg.e_step_eV / 2)
            scale = np.maximum(np.abs(fine), np.finfo(float).tiny)
            change = np.abs(val - fine) / scale
            if np.any(change > cfg.quad_tol):
                raise NumericalError(
                    f"energy quadrature not converged (max relative change {change.max():.3g})",
                    {"max_relative_change": float(change.max()), "e_step_eV": cfg.e_step_eV},
                )
            val = fine
        total = total + val
    out = cfg.amplitude * total
    return out if out.ndim else float(out)


def ddh_spectrum(D: EnergyDistribution, omega, T, cfg: TafModelConfig = TafModelConfig()):
    """Closed-form DDH approximation A pi kT D(E_bar) / (2 omega)."""
    omega = np.asarray(omega, float)
    T = np.asarray(T, float)
    E_bar = dominant_energy(omega, T, cfg.tau0_s)
    return cfg.amplitude * np.pi * K_B_EV * T * D(E_bar) / (2.0 * omega)


def ddh_invert(curve: NoiseCurve, cfg: TafModelConfig = TafModelConfig()) -> TabulatedDistribution:
    """Invert a fixed-frequency S(T) into D(E_bar) with the DDH closed form.

    Each temperature maps to E_bar = kT ln(1/(omega tau0)) and the density is
    2 omega S / (A pi kT). Uncertainties on S propagate linearly.
    """
    omega = curve.omega
    T = curve.temperature_K
    S = curve.values
    if np.any(S <= 0):
        raise InputError("DDH inversion needs S > 0 at every temperature")
    E_bar = dominant_energy(omega, T, cfg.tau0_s)
    factor = 2.0 * omega / (cfg.amplitude * np.pi * K_B_EV * T)
    err = None if curve.err is None else curve.errors * factor
    return TabulatedDistribution(E_bar, S * factor, err)


@dataclass
class CorrectionReport:
    iterations: int
    converged: bool
    temperatures_K: np.ndarray
    initial_residual: np.ndarray
    final_residual: np.ndarray
    history: list = field(default_factory=list)
    # temperatures the convergence test looked at (all when None)
    checked: Optional[np.ndarray] = None

    def _in_range(self, r):
        return r if self.checked is None else r[self.checked]

    @property
    def max_initial_residual(self):
        return float(np.max(np.abs(self._in_range(self.initial_residual))))

    @property
    def max_final_residual(self):
        return float(np.max(np.abs(self._in_range(self.final_residual))))

    def as_dict(self):
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "max_initial_residual": self.max_initial_residual,
            "max_final_residual": self.max_final_residual,
            "temperature_K": self._in_range(self.temperatures_K).tolist(),
            "initial_residual": self._in_range(self.initial_residual).tolist(),
            "final_residual": self._in_range(self.final_residual).tolist(),
        }


def ddh_correct(target: NoiseCurve, D0: EnergyDistribution, cfg: TafModelConfig = TafModelConfig(),
                check_range=None, raise_on_failure=True):
    """Rescale a distribution until the forward TAF spectrum matches ``target``.

    D0 is tabulated at the dominant energies of the target temperatures and
    each step multiplies it pointwise by S_target / S_TAF(D). The residual
    S_TAF/S_target - 1 is checked over ``check_range`` (K, defaults to the
    whole target) after every step; iteration stops once it is below
    ``cfg.correction_tol`` or after ``cfg.max_correction_iter`` steps.
    """
    omega = target.omega
    T = target.temperature_K
    S_t = target.values
    if np.any(S_t <= 0):
        raise InputError("target spectrum must be positive")
    E_bar = dominant_energy(omega, T, cfg.tau0_s)
    lo, hi = (T[0], T[-1]) if check_range is None else check_range
    mask = (T >= lo) & (T <= hi)
    if not mask.any():
        raise InputError("check range does not overlap the target temperatures")

    dens = np.asarray(D0(E_bar), float)
    rel_err = None
    if isinstance(D0, TabulatedDistribution) and D0.density_err is not None:
        with np.errstate(invalid="ignore", divide="ignore"):
            rel_err = np.interp(E_bar, D0.energies_eV, np.where(D0.densities > 0, D0.density_err / D0.densities, 0.0))

    D = TabulatedDistribution(E_bar, dens)
    S = ensemble_spectrum(D, omega, T, cfg)
    initial = S / S_t - 1.0
    residual = initial
    history = [float(np.max(np.abs(initial[mask])))]
    it = 0
    while it < cfg.max_correction_iter:
        it += 1
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(S > 0, S_t / S, 1.0)
        dens = dens * ratio
        D = TabulatedDistribution(E_bar, dens)
        S = ensemble_spectrum(D, omega, T, cfg)
        residual = S / S_t - 1.0
        history.append(float(np.max(np.abs(residual[mask]))))
        log.debug("correction step %d: max residual %.4g", it, history[-1])
        if history[-1] < cfg.correction_tol:
            break
    converged = history[-1] < cfg.correction_tol
    report = CorrectionReport(it, converged, T, initial, residual, history, mask)
    if not converged and raise_on_failure:
        raise NumericalError(
            f"DDH correction did not reach {cfg.correction_tol:.1%} after {it} steps "
            f"(max residual {history[-1]:.3%})",
            report.as_dict(),
        )
    err = None if rel_err is None else rel_err * dens
    return TabulatedDistribution(E_bar, dens, err), report


def _loglog_spline(curve: NoiseCurve):
    T = curve.temperature_K
    S = curve.values
    if T.size < 3:
        raise InputError("need at least 3 temperatures for a log-log derivative")
    if np.any(S <= 0):
        raise InputError("log-log derivative needs S > 0")
    return CubicSpline(np.log(T), np.log(S))


def log_temperature_slope(curve: NoiseCurve, T, rel_step=0.01):
    """d ln S / d ln T by central differences on a log-log cubic spline."""
    spline = _loglog_spline(curve)
    T = np.asarray(T, float)
    lo_T, hi_T = T * (1 - rel_step), T * (1 + rel_step)
    t_min, t_max = curve.temperature_K[0], curve.temperature_K[-1]
    if np.any(lo_T < t_min * (1 - 1e-12)) or np.any(hi_T > t_max * (1 + 1e-12)):
        raise BoundaryError(
            f"derivative stencil leaves the data range [{t_min:g}, {t_max:g}] K",
            {"T": np.atleast_1d(T).tolist(), "range": [float(t_min), float(t_max)]},
        )
    return (spline(np.log(hi_T)) - spline(np.log(lo_T))) / (np.log(hi_T) - np.log(lo_T))


def alpha_from_temperature_slope(slope, omega, tau0=TAU0_DEFAULT):
    """alpha = 1 - (slope - 1) / ln(omega tau0)."""
    x = omega * tau0
    if x >= 1:
        raise OutOfRegimeError("omega*tau0 >= 1")
    return 1.0 - (np.asarray(slope, float) - 1.0) / np.log(x)


def alpha_predict(curve: NoiseCurve, T, cfg: TafModelConfig = TafModelConfig()):
    """Frequency exponent predicted from the temperature dependence of S.

    Returns an :class:`AlphaEstimate` for scalar ``T`` and a list of them for
    an array.
    """
    omega = curve.omega
    slope = log_temperature_slope(curve, T, cfg.fd_rel_step)
    alpha = alpha_from_temperature_slope(slope, omega, cfg.tau0_s)
    if np.ndim(alpha) == 0:
        return AlphaEstimate(float(alpha), float("nan"), float(T), (omega, omega))
    return [AlphaEstimate(float(a), float("nan"), float(t), (omega, omega))
            for a, t in zip(alpha, np.asarray(T, float))]


def log_frequency_slope(spectrum_fn, omega, rel_step=0.01):
    """-d ln S / d ln omega for a callable S(omega), by central differences."""
    omega = np.asarray(omega, float)
    hi, lo = omega * (1 + rel_step), omega * (1 - rel_step)
    return -(np.log(spectrum_fn(hi)) - np.log(spectrum_fn(lo))) / (np.log(hi) - np.log(lo))


def alpha_numeric(D: EnergyDistribution, omega, T, cfg: TafModelConfig = TafModelConfig()) -> AlphaEstimate:
    """Frequency exponent from the forward TAF model, -d ln S / d ln omega."""
    h = cfg.fd_rel_step
    a = log_frequency_slope(lambda w: ensemble_spectrum(D, w, T, cfg), omega, h)
    return AlphaEstimate(float(a), float("nan"), float(T), (omega * (1 - h), omega * (1 + h)))


def alpha_numeric_curve(D: EnergyDistribution, omega, T, cfg: TafModelConfig = TafModelConfig()) -> np.ndarray:
    """Vectorised :func:`alpha_numeric` over an array of temperatures."""
    T = np.asarray(T, float)
    return log_frequency_slope(lambda w: ensemble_spectrum(D, w, T, cfg), np.full(T.shape, omega), cfg.fd_rel_step)


def _end_slope(x, y):
    # second-order one-sided derivative at x[0] from three points
    h1, h2 = x[1] - x[0], x[2] - x[1]
    return (-(2 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1]
            - h1 / (h2 * (h1 + h2)) * y[2])


def extrapolate_spectrum(curve: NoiseCurve, extend_low_K: float = 100.0, extend_high_K: float = 100.0,
                         n_points=None, t_floor_K: float = 10.0) -> NoiseCurve:
    """Continue a fixed-frequency S(T) beyond its ends along the end log-log gradients.

    The gradient at each end is the second-order one-sided derivative of
    ln S vs ln T over the three outermost points, so the extension is
    continuous with matching first derivative. New points use the mean
    temperature spacing of the data unless ``n_points`` (per side) is given.
    """
    T = curve.temperature_K
    S = curve.values
    if T.size < 3:
        raise InputError("extrapolation needs at least 3 points")
    if np.any(S <= 0):
        raise InputError("extrapolation works in log space; S must be > 0")
    if extend_low_K < 0 or extend_high_K < 0:
        raise InputError("extension lengths must be >= 0")
    x, y = np.log(T), np.log(S)
    g_lo = _end_slope(x[:3], y[:3])
    g_hi = _end_slope(x[::-1][:3], y[::-1][:3])
    dT = (T[-1] - T[0]) / (T.size - 1)

    def new_temps(start, length, direction):
        if length == 0:
            return np.array([])
        n = n_points if n_points is not None else max(1, int(np.ceil(length / dT)))
        pts = start + direction * length * np.arange(1, n + 1) / n
        return pts[pts > t_floor_K]

    T_lo = new_temps(T[0], extend_low_K, -1)[::-1]
    T_hi = new_temps(T[-1], extend_high_K, +1)
    S_lo = S[0] * (T_lo / T[0]) ** g_lo
    S_hi = S[-1] * (T_hi / T[-1]) ** g_hi
    T_all = np.concatenate([T_lo, T, T_hi])
    S_all = np.concatenate([S_lo, S, S_hi])
    err = None
    if curve.err is not None:
        e = curve.errors
        err = np.concatenate([S_lo * e[0] / S[0], e, S_hi * e[-1] / S[-1]])
    return NoiseCurve.temperature_scan(curve.omega, T_all, S_all, err)
