"""Measured-quantity containers and the elementary physics conversions.

Everything is SI internally; activation energies are in eV at every interface.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .constants import CA40, HBAR, K_B_EV, TAU0_DEFAULT, IonSpecies
from .errors import InputError, OutOfRegimeError


@dataclass(frozen=True)
class HeatingRatePoint:
    temperature_K: float
    temperature_err_K: float
    frequency_rad_per_s: float
    heating_rate_quanta_per_s: float
    heating_rate_err_quanta_per_s: float = 0.0

    def __post_init__(self):
        if not self.temperature_K > 0:
            raise InputError(f"temperature must be positive, got {self.temperature_K}")
        if not self.frequency_rad_per_s > 0:
            raise InputError(f"frequency must be positive, got {self.frequency_rad_per_s}")
        if not self.heating_rate_quanta_per_s >= 0:
            raise InputError(f"heating rate must be >= 0, got {self.heating_rate_quanta_per_s}")
        if self.temperature_err_K < 0 or self.heating_rate_err_quanta_per_s < 0:
            raise InputError("uncertainties must be >= 0")


@dataclass(frozen=True)
class HeatingRateSeries:
    """Heating rates at one trap location, either vs temperature or vs frequency."""

    location_id: str
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise InputError(f"series {self.location_id!r} is empty")

    @classmethod
    def from_arrays(cls, location_id, temperature_K, frequency_rad_per_s, heating_rate,
                    heating_rate_err=None, temperature_err_K=None):
        T = np.atleast_1d(np.asarray(temperature_K, float))
        n = T.size
        w = np.broadcast_to(np.asarray(frequency_rad_per_s, float), (n,))
        hr = np.broadcast_to(np.asarray(heating_rate, float), (n,))
        hr_err = np.zeros(n) if heating_rate_err is None else np.broadcast_to(np.asarray(heating_rate_err, float), (n,))
        T_err = np.zeros(n) if temperature_err_K is None else np.broadcast_to(np.asarray(temperature_err_K, float), (n,))
        pts = [HeatingRatePoint(float(T[i]), float(T_err[i]), float(w[i]), float(hr[i]), float(hr_err[i]))
               for i in range(n)]
        return cls(location_id, tuple(pts))

    def __len__(self):
        return len(self.points)

    @property
    def temperature_K(self) -> np.ndarray:
        return np.array([p.temperature_K for p in self.points])

    @property
    def temperature_err_K(self) -> np.ndarray:
        return np.array([p.temperature_err_K for p in self.points])

    @property
    def frequency_rad_per_s(self) -> np.ndarray:
        return np.array([p.frequency_rad_per_s for p in self.points])

    @property
    def heating_rate(self) -> np.ndarray:
        return np.array([p.heating_rate_quanta_per_s for p in self.points])

    @property
    def heating_rate_err(self) -> np.ndarray:
        return np.array([p.heating_rate_err_quanta_per_s for p in self.points])

    def is_temperature_scan(self) -> bool:
        return np.unique(self.frequency_rad_per_s).size == 1

    def validate_temperature_scan(self):
        if not self.is_temperature_scan():
            raise InputError(f"series {self.location_id!r}: expected a single frequency")
        if np.any(np.diff(self.temperature_K) <= 0):
            raise InputError(f"series {self.location_id!r}: temperatures must be strictly increasing")

    def validate_frequency_scan(self):
        if np.any(np.diff(self.frequency_rad_per_s) <= 0):
            raise InputError(f"series {self.location_id!r}: frequencies must be strictly increasing")


@dataclass(frozen=True)
class NoiseCurve:
    """Field-noise spectral density on a (frequency, temperature) grid.

    ``S`` has shape ``(len(frequency_rad_per_s), len(temperature_K))``.
    A temperature scan has a single frequency and a frequency scan a single
    temperature; ``values`` and ``errors`` flatten those cases.
    """

    frequency_rad_per_s: np.ndarray
    temperature_K: np.ndarray
    S: np.ndarray
    err: Optional[np.ndarray] = None

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.frequency_rad_per_s, float))
        T = np.atleast_1d(np.asarray(self.temperature_K, float))
        S = np.asarray(self.S, float).reshape(w.size, T.size)
        object.__setattr__(self, "frequency_rad_per_s", w)
        object.__setattr__(self, "temperature_K", T)
        object.__setattr__(self, "S", S)
        if self.err is not None:
            err = np.asarray(self.err, float).reshape(S.shape)
            if np.any(err < 0):
                raise InputError("noise uncertainties must be >= 0")
            object.__setattr__(self, "err", err)
        if np.any(S < 0) or not np.all(np.isfinite(S)):
            raise InputError("noise spectral density must be finite and >= 0")
        if np.any(np.diff(w) <= 0) or np.any(np.diff(T) <= 0):
            raise InputError("grid axes must be strictly increasing")

    @classmethod
    def temperature_scan(cls, omega, temperature_K, S, err=None):
        return cls(np.array([float(omega)]), temperature_K, np.asarray(S, float)[None, :],
                   None if err is None else np.asarray(err, float)[None, :])

    @classmethod
    def frequency_scan(cls, temperature_K, omega, S, err=None):
        return cls(omega, np.array([float(temperature_K)]), np.asarray(S, float)[:, None],
                   None if err is None else np.asarray(err, float)[:, None])

    @property
    def is_temperature_scan(self) -> bool:
        return self.frequency_rad_per_s.size == 1

    @property
    def omega(self) -> float:
        if not self.is_temperature_scan:
            raise InputError("curve is not at a single fixed frequency")
        return float(self.frequency_rad_per_s[0])

    @property
    def values(self) -> np.ndarray:
        return self.S.ravel().copy()

    @property
    def errors(self) -> Optional[np.ndarray]:
        return None if self.err is None else self.err.ravel().copy()

    def restrict_temperature(self, t_min, t_max) -> "NoiseCurve":
        m = (self.temperature_K >= t_min) & (self.temperature_K <= t_max)
        return NoiseCurve(self.frequency_rad_per_s, self.temperature_K[m], self.S[:, m],
                          None if self.err is None else self.err[:, m])


def _check_ion_and_omega(omega, ion: IonSpecies):
    if not ion.mass_kg > 0:
        raise InputError("ion mass must be positive")
    if np.any(np.asarray(omega) <= 0):
        raise InputError("frequency must be positive")


def heating_rate_to_field_noise(heating_rate, omega, ion: IonSpecies = CA40):
    """Heating rate (quanta/s) -> electric-field noise density in (V/m)^2/Hz.

    S = 4 m hbar omega ndot / q^2. Linear, so it converts uncertainties too.
    """
    _check_ion_and_omega(omega, ion)
    return 4.0 * ion.mass_kg * HBAR * np.asarray(omega, float) * np.asarray(heating_rate, float) / ion.charge_C**2


def field_noise_to_heating_rate(S, omega, ion: IonSpecies = CA40):
    """Inverse of :func:`heating_rate_to_field_noise`."""
    _check_ion_and_omega(omega, ion)
    if np.any(np.asarray(S) < 0):
        raise InputError("field noise must be >= 0")
    return np.asarray(S, float) * ion.charge_C**2 / (4.0 * ion.mass_kg * HBAR * np.asarray(omega, float))


def point_to_field_noise(p: HeatingRatePoint, ion: IonSpecies = CA40):
    """Return ``(S, S_err)`` for one measured point."""
    S = heating_rate_to_field_noise(p.heating_rate_quanta_per_s, p.frequency_rad_per_s, ion)
    S_err = heating_rate_to_field_noise(p.heating_rate_err_quanta_per_s, p.frequency_rad_per_s, ion)
    return float(S), float(S_err)


def series_to_noise_curve(series: HeatingRateSeries, ion: IonSpecies = CA40) -> NoiseCurve:
    """Convert a temperature scan into a fixed-frequency :class:`NoiseCurve`."""
    series.validate_temperature_scan()
    w = series.frequency_rad_per_s[0]
    S = heating_rate_to_field_noise(series.heating_rate, w, ion)
    err = heating_rate_to_field_noise(series.heating_rate_err, w, ion)
    return NoiseCurve.temperature_scan(w, series.temperature_K, S, err)


def taf_rate(E_a, T, tau0=TAU0_DEFAULT):
    """Switching rate (1/s) of a symmetric thermally activated fluctuator."""
    E_a = np.asarray(E_a, float)
    T = np.asarray(T, float)
    if np.any(E_a < 0) or np.any(T <= 0) or tau0 <= 0:
        raise InputError("taf_rate needs E_a >= 0, T > 0, tau0 > 0")
    return np.exp(-E_a / (K_B_EV * T)) / tau0


def dominant_energy(omega, T, tau0=TAU0_DEFAULT):
    """Activation energy (eV) whose switching rate equals ``omega`` at ``T``."""
    omega = np.asarray(omega, float)
    if np.any(omega <= 0) or tau0 <= 0:
        raise InputError("omega and tau0 must be positive")
    x = omega * tau0
    if np.any(x >= 1):
        raise OutOfRegimeError(f"omega*tau0 = {np.max(x):g} >= 1; no thermally activated regime")
    return K_B_EV * np.asarray(T, float) * np.log(1.0 / x)


def temperature_rescale(series: HeatingRateSeries, room_K: float = 295.0, scale: float = 1.0) -> HeatingRateSeries:
    """Stretch temperatures about room temperature: T' = room + scale (T - room).

    scale = 1.1 is the case where the camera emissivity is 10% lower
    (temperatures higher), 0.9 the opposite. Heating rates are untouched;
    temperature uncertainties scale with the offset.
    """
    if not 0.5 <= scale <= 2.0:
        raise InputError(f"scale must lie in [0.5, 2.0], got {scale}")
    if not room_K > 0:
        raise InputError("room temperature must be positive")
    if scale == 1.0:
        return series
    pts = []
    for p in series.points:
        T_new = room_K + scale * (p.temperature_K - room_K)
        if T_new <= 0:
            raise InputError(f"rescaled temperature {T_new} K is not positive")
        pts.append(replace(p, temperature_K=T_new, temperature_err_K=scale * p.temperature_err_K))
    return HeatingRateSeries(series.location_id, tuple(pts))
