"""Smoothing, curve fitting and test statistics."""

from .fitting import (
    FitReport,
    alpha_two_point,
    chi2_p_value,
    fit_arrhenius,
    fit_frequency_scaling,
    fit_heating_rate,
    fit_power_law,
    weighted_line,
)
from .gaussian_basis import (
    GaussianBasisSpec,
    basis_shift_sweep,
    fit_gaussian_basis,
    fit_single_gaussian,
    model_heating_rate,
)
from .loess import Loess, loess_smooth
from .stats import DeltaAlphaTest, t_test_delta_alpha, weighted_mean_std
