"""Fluctuator densities over activation energy (eV), arbitrary units per eV."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError

FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))


class EnergyDistribution:
    """Base class. Subclasses implement ``__call__(E) -> density``."""

    def __call__(self, E):
        raise NotImplementedError

    def __add__(self, other):
        if not isinstance(other, EnergyDistribution):
            return NotImplemented
        return CompositeDistribution((self, other))

    def scaled(self, factor: float) -> "EnergyDistribution":
        raise NotImplementedError


@dataclass(frozen=True)
class TabulatedDistribution(EnergyDistribution):
    """Linear interpolation of tabulated values; zero outside the tabulated support."""

    energies_eV: np.ndarray
    densities: np.ndarray
    density_err: Optional[np.ndarray] = None

    def __post_init__(self):
        E = np.atleast_1d(np.asarray(self.energies_eV, float))
        D = np.atleast_1d(np.asarray(self.densities, float))
        if E.shape != D.shape or E.ndim != 1:
            raise InputError("energies and densities must be 1-D arrays of equal length")
        if E.size == 0:
            raise InputError("tabulated distribution is empty")
        if np.any(np.diff(E) <= 0):
            raise InputError("tabulated energies must be strictly increasing")
        if np.any(D < 0) or not np.all(np.isfinite(D)):
            raise InputError("tabulated densities must be finite and >= 0")
        object.__setattr__(self, "energies_eV", E)
        object.__setattr__(self, "densities", D)
        if self.density_err is not None:
            object.__setattr__(self, "density_err", np.broadcast_to(np.asarray(self.density_err, float), E.shape).copy())

    def __call__(self, E):
        E = np.asarray(E, float)
        lo, hi = self.energies_eV[0], self.energies_eV[-1]
        # energies recomputed from temperatures can land a rounding error outside
        eps = 1e-12 * max(abs(lo), abs(hi), 1.0)
        inside = (E >= lo - eps) & (E <= hi + eps)
        return np.where(inside, np.interp(E, self.energies_eV, self.densities), 0.0)

    @property
    def support(self):
        return float(self.energies_eV[0]), float(self.energies_eV[-1])

    def scaled(self, factor):
        err = None if self.density_err is None else self.density_err * factor
        return TabulatedDistribution(self.energies_eV, self.densities * factor, err)


@dataclass(frozen=True)
class GaussianMixture(EnergyDistribution):
    """Sum of Gaussians, each given as ``(center_eV, fwhm_eV, amplitude)``.

    ``amplitude`` is the peak height of that component.
    """

    components: tuple

    def __post_init__(self):
        comps = tuple((float(c), float(w), float(a)) for c, w, a in self.components)
        for c, w, a in comps:
            if not w > 0:
                raise InputError(f"Gaussian fwhm must be positive, got {w}")
            if a < 0:
                raise InputError(f"Gaussian amplitude must be >= 0, got {a}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def single(cls, center_eV, fwhm_eV, amplitude=1.0):
        return cls(((center_eV, fwhm_eV, amplitude),))

    @classmethod
    def from_arrays(cls, centers, fwhm, amplitudes):
        centers = np.atleast_1d(centers)
        fwhm = np.broadcast_to(fwhm, centers.shape)
        amplitudes = np.broadcast_to(amplitudes, centers.shape)
        return cls(tuple(zip(centers, fwhm, amplitudes)))

    def __call__(self, E):
        E = np.asarray(E, float)
        out = np.zeros_like(E)
        for c, w, a in self.components:
            s = w * FWHM_TO_SIGMA
            out = out + a * np.exp(-0.5 * ((E - c) / s) ** 2)
        return out

    @property
    def centers(self):
        return np.array([c for c, _, _ in self.components])

    @property
    def amplitudes(self):
        return np.array([a for _, _, a in self.components])

    def integral(self) -> float:
        return float(sum(a * w * FWHM_TO_SIGMA * np.sqrt(2 * np.pi) for _, w, a in self.components))

    def scaled(self, factor):
        return GaussianMixture(tuple((c, w, a * factor) for c, w, a in self.components))


@dataclass(frozen=True)
class DiscreteFluctuators(EnergyDistribution):
    """A finite set of individual fluctuators (weighted delta functions).

    Spectra from this form are exact sums of single-fluctuator Lorentzians
    and do not go through the energy quadrature. Calling it returns zeros:
    there is no finite density to evaluate.
    """

    energies_eV: tuple
    weights: Optional[tuple] = None

    def __post_init__(self):
        E = tuple(float(e) for e in np.atleast_1d(self.energies_eV))
        w = (1.0,) * len(E) if self.weights is None else tuple(float(x) for x in np.atleast_1d(self.weights))
        if len(w) != len(E):
            raise InputError("weights must match energies")
        if any(e < 0 for e in E) or any(x < 0 for x in w):
            raise InputError("fluctuator energies and weights must be >= 0")
        object.__setattr__(self, "energies_eV", E)
        object.__setattr__(self, "weights", w)

    def __call__(self, E):
        return np.zeros_like(np.asarray(E, float))

    def scaled(self, factor):
        return DiscreteFluctuators(self.energies_eV, tuple(x * factor for x in self.weights))


@dataclass(frozen=True)
class CompositeDistribution(EnergyDistribution):
    parts: tuple

    def __call__(self, E):
        return sum(p(E) for p in self.parts)

    def scaled(self, factor):
        return CompositeDistribution(tuple(p.scaled(factor) for p in self.parts))


def constant_distribution(level: float, e_min: float = 0.0, e_max: float = 2.0) -> TabulatedDistribution:
    return TabulatedDistribution(np.array([e_min, e_max]), np.array([level, level]))


def iter_parts(D: EnergyDistribution):
    """Flatten composites into their leaf distributions."""
    if isinstance(D, CompositeDistribution):
        for p in D.parts:
            yield from iter_parts(p)
    else:
        yield D
