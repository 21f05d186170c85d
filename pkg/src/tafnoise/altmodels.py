"""Competing surface-noise models: adatom diffusion, phonon-driven adatoms, Johnson noise, TAF dipoles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import DEBYE, EPS0, E_CHARGE, H_PLANCK, K_B, K_B_EV, TAU0_DEFAULT
from .distributions import EnergyDistribution
from .errors import DegenerateFitError, InputError


@dataclass(frozen=True)
class MaterialParams:
    speed_of_sound_m_per_s: float
    density_kg_per_m3: float
    debye_frequency_Hz: float

    def __post_init__(self):
        if min(self.speed_of_sound_m_per_s, self.density_kg_per_m3, self.debye_frequency_Hz) <= 0:
            raise InputError("material parameters must be positive")


ALUMINUM = MaterialParams(6320.0, 2700.0, 8e12)


@dataclass(frozen=True)
class ModelResult:
    """A model value together with its validity flag and caveats."""

    value: float
    valid: bool = True
    notes: tuple = ()

    def as_dict(self):
        return {"value": self.value, "valid": self.valid, "notes": list(self.notes)}


def diffusion_spectrum(D0, E_b, T, omega):
    """Adatom diffusion on a flat surface: D0 exp(-E_b / kT) / omega^2 (arbitrary units)."""
    T = np.asarray(T, float)
    omega = np.asarray(omega, float)
    if np.any(T <= 0) or np.any(omega <= 0):
        raise InputError("T and omega must be positive")
    return D0 * np.exp(-np.asarray(E_b, float) / (K_B_EV * T)) / omega**2


def adatom_nu10_from_T0(T0):
    """Vibrational level spacing (Hz) implied by an Arrhenius T0: k_B T0 / h."""
    if np.any(np.asarray(T0) < 0):
        raise InputError("T0 must be >= 0")
    return K_B * np.asarray(T0, float) / H_PLANCK


def adatom_gamma0(nu10, adatom_mass_kg, mat: MaterialParams = ALUMINUM) -> ModelResult:
    """Zero-temperature transition rate nu10^4 m / (4 pi v^3 rho).

    Only meaningful for nu10 below the Debye frequency; violations are
    reported through ``valid`` rather than raised.
    """
    if nu10 < 0 or adatom_mass_kg < 0:
        raise InputError("nu10 and mass must be >= 0")
    g = nu10**4 * adatom_mass_kg / (4 * np.pi * mat.speed_of_sound_m_per_s**3 * mat.density_kg_per_m3)
    valid = nu10 < mat.debye_frequency_Hz
    notes = () if valid else (
        f"nu10 = {nu10:.3g} Hz exceeds the Debye frequency {mat.debye_frequency_Hz:.3g} Hz; "
        "the phonon-driven adatom model does not apply",)
    return ModelResult(float(g), valid, notes)


def adatom_corner_factor(nu10, T):
    """1 + 1/(exp(h nu10 / kT) - 1): the onset of the 1/f region in units of Gamma0."""
    if np.any(np.asarray(T) <= 0):
        raise InputError("T must be positive")
    x = H_PLANCK * np.asarray(nu10, float) / (K_B * np.asarray(T, float))
    # 1/(e^x - 1) written to avoid overflow at low temperature
    return 1.0 + np.exp(-x) / -np.expm1(-x)


def adatom_corner_frequency(gamma0, nu10, T):
    return gamma0 * adatom_corner_factor(nu10, T)


def adatom_model(T0, adatom_mass_kg, T, mat: MaterialParams = ALUMINUM) -> dict:
    """Chain T0 -> nu10 -> Gamma0 -> corner frequency, with validity notes."""
    nu10 = float(adatom_nu10_from_T0(T0))
    g0 = adatom_gamma0(nu10, adatom_mass_kg, mat)
    factor = float(adatom_corner_factor(nu10, T))
    return {
        "nu10_Hz": nu10,
        "debye_frequency_Hz": mat.debye_frequency_Hz,
        "debye_violation": not g0.valid,
        "gamma0_Hz": g0.value,
        "corner_factor": factor,
        "corner_frequency_Hz": g0.value * factor,
        "valid": g0.valid,
        "notes": list(g0.notes),
    }


def johnson_voltage_noise(T, R):
    """Johnson voltage noise 4 k_B T R in V^2/Hz; white in frequency."""
    T = np.asarray(T, float)
    R = np.asarray(R, float)
    if np.any(T < 0) or np.any(R < 0):
        raise InputError("T and R must be >= 0")
    return 4.0 * K_B * T * R


def johnson_field_estimate(T, R, d) -> ModelResult:
    """Field noise (V/m)^2/Hz of a resistor at distance d, taken as S_V / d^2."""
    if not d > 0:
        raise InputError("distance must be positive")
    return ModelResult(float(johnson_voltage_noise(T, R) / d**2), True,
                       ("field estimated as S_V / d^2 (order-of-magnitude conversion)",))


def thin_film_johnson_ratio(T1, T2):
    """S_V(T2)/S_V(T1) for a thin film whose Johnson noise scales as T^2."""
    if T1 <= 0 or T2 <= 0:
        raise InputError("temperatures must be positive")
    return (T2 / T1) ** 2


@dataclass(frozen=True)
class DipoleModelParams:
    dipole_moment_C_m: float
    ion_surface_distance_m: float
    barrier_distribution: EnergyDistribution
    # density per eV (True) or per joule (False)
    distribution_per_eV: bool = True

    def __post_init__(self):
        if not self.dipole_moment_C_m > 0 or not self.ion_surface_distance_m > 0:
            raise InputError("dipole moment and distance must be positive")


def dipole_spectrum(params: DipoleModelParams, omega, T, tau0=TAU0_DEFAULT):
    """Averaged dipole fluctuation spectrum mu^2 (pi k_B T / 4 omega) D(E_bar) in (C m)^2/Hz."""
    if omega * tau0 >= 1:
        raise InputError("omega*tau0 must be < 1")
    E_bar = K_B_EV * T * np.log(1.0 / (omega * tau0))
    D = float(params.barrier_distribution(E_bar))
    if params.distribution_per_eV:
        D /= E_CHARGE
    return params.dipole_moment_C_m**2 * np.pi * K_B * T / (4 * omega) * D


def _field_per_areal_density(params, S_mu):
    d = params.ion_surface_distance_m
    return 3 * np.pi / 4 * (1.0 / (4 * np.pi * EPS0 * d**2)) ** 2 * S_mu


def dipole_field_noise(sigma_d, params: DipoleModelParams, omega, T, tau0=TAU0_DEFAULT):
    """Field noise parallel to the surface from fluctuating dipoles of areal density ``sigma_d`` (1/m^2)."""
    return sigma_d * _field_per_areal_density(params, dipole_spectrum(params, omega, T, tau0))


def dipole_density_solve(S_E_measured, params: DipoleModelParams, omega, T, tau0=TAU0_DEFAULT) -> ModelResult:
    """Areal dipole density (1/m^2) needed to produce ``S_E_measured``."""
    if not S_E_measured > 0 or not T > 0 or not omega > 0:
        raise InputError("S_E, T and omega must be positive")
    S_mu = dipole_spectrum(params, omega, T, tau0)
    if S_mu == 0:
        raise DegenerateFitError("barrier distribution is zero at the dominant energy; no dipole activity")
    sigma = S_E_measured / _field_per_areal_density(params, S_mu)
    return ModelResult(float(sigma), True, ("field noise taken as proportional to the areal dipole density",))


def debye_to_C_m(mu_debye):
    return mu_debye * DEBYE
