"""Physical constants (CODATA 2018 exact/recommended values) and ion species."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    boltzmann_J_per_K: float = 1.380649e-23
    hbar_J_s: float = 1.054571817e-34
    planck_J_s: float = 6.62607015e-34
    elementary_charge_C: float = 1.602176634e-19
    atomic_mass_unit_kg: float = 1.66053906660e-27
    vacuum_permittivity_F_per_m: float = 8.8541878128e-12
    # 1 debye = 1e-21 / c  C m
    debye_C_m: float = 1e-21 / 299792458.0

    @property
    def boltzmann_eV_per_K(self) -> float:
        return self.boltzmann_J_per_K / self.elementary_charge_C


CONSTANTS = PhysicalConstants()

K_B = CONSTANTS.boltzmann_J_per_K
K_B_EV = CONSTANTS.boltzmann_eV_per_K
HBAR = CONSTANTS.hbar_J_s
H_PLANCK = CONSTANTS.planck_J_s
E_CHARGE = CONSTANTS.elementary_charge_C
AMU = CONSTANTS.atomic_mass_unit_kg
EPS0 = CONSTANTS.vacuum_permittivity_F_per_m
DEBYE = CONSTANTS.debye_C_m

#: Default TAF attempt time (inverse phonon frequency), seconds.
TAU0_DEFAULT = 1e-13


@dataclass(frozen=True)
class IonSpecies:
    name: str
    mass_kg: float
    charge_C: float

    def __post_init__(self):
        from .errors import InputError

        if not self.mass_kg > 0:
            raise InputError(f"ion mass must be positive, got {self.mass_kg}")
        if self.charge_C == 0:
            raise InputError("ion charge must be non-zero")


CA40 = IonSpecies("40Ca+", 39.9626 * AMU, E_CHARGE)

ION_SPECIES = {
    "40Ca+": CA40,
    "Ca40": CA40,
    "9Be+": IonSpecies("9Be+", 9.0122 * AMU, E_CHARGE),
    "88Sr+": IonSpecies("88Sr+", 87.9056 * AMU, E_CHARGE),
    "171Yb+": IonSpecies("171Yb+", 170.9363 * AMU, E_CHARGE),
}


def get_ion(name: str) -> IonSpecies:
    from .errors import InputError

    try:
        return ION_SPECIES[name]
    except KeyError:
        raise InputError(f"unknown ion species {name!r}; known: {sorted(ION_SPECIES)}") from None
