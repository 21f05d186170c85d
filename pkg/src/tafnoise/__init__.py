"""Electric-field noise from thermally activated fluctuators (TAFs) in ion traps.

Converts heating rates to field noise, inverts S(T) into an activation-energy
distribution, predicts the frequency exponent alpha, fits the usual empirical
models and evaluates a few alternative noise mechanisms.
"""

__version__ = "0.1.0"

from .constants import CA40, ION_SPECIES, IonSpecies, get_ion
from .distributions import (
    CompositeDistribution,
    DiscreteFluctuators,
    EnergyDistribution,
    GaussianMixture,
    TabulatedDistribution,
    constant_distribution,
)
from .errors import (
    BoundaryError,
    DegenerateFitError,
    InputError,
    NumericalError,
    OutOfRegimeError,
    TafNoiseError,
)
from .physics import (
    HeatingRatePoint,
    HeatingRateSeries,
    NoiseCurve,
    dominant_energy,
    field_noise_to_heating_rate,
    heating_rate_to_field_noise,
    series_to_noise_curve,
    taf_rate,
    temperature_rescale,
)
from .taf import (
    AlphaEstimate,
    CorrectionReport,
    TafModelConfig,
    alpha_numeric,
    alpha_predict,
    ddh_correct,
    ddh_invert,
    ddh_spectrum,
    ensemble_spectrum,
    extrapolate_spectrum,
    single_taf_peak_temperature,
    single_taf_spectrum,
)
from .telegraph import Periodogram, fit_lorentzian, rts_montecarlo, telegraph_psd
