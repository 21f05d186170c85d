"""Reference numbers from measurements at three trap locations.

These come from measured data that is not distributed with this package, so
they are kept as metadata for reports and comparison, not recomputed.
"""

POWER_LAW_FITS = {
    # location: (gamma, gamma_err, reduced_chi2, p_value)
    1: (1.4, 0.1, 5.1, 5.7e-8),
    2: (1.6, 0.1, 2.7, 9.6e-4),
    3: (1.1, 0.1, 2.8, 2.1e-3),
}

ARRHENIUS_FITS = {
    # location: (T0_K, T0_err, E_b_eV, E_b_err, reduced_chi2, p_value)
    1: (550.0, 40.0, 0.047, 0.003, 2.6, 2.8e-3),
    2: (620.0, 33.0, 0.053, 0.003, 1.7, 5.7e-2),
    3: (430.0, 40.0, 0.037, 0.003, 1.9, 3.8e-2),
}

ALPHA_ROOM_TEMPERATURE = {1: (0.99, 0.07), 2: (1.05, 0.08), 3: (0.89, 0.09)}
ALPHA_HIGH_TEMPERATURE = {
    # location: (temperature_K, alpha, alpha_err)
    1: (472.0, 0.83, 0.09),
    2: (485.0, 0.76, 0.09),
    3: (480.0, 1.02, 0.08),
}

DELTA_ALPHA_TEST = {"t_value": 3.95, "mean_decrease": 0.12, "mean_decrease_err": 0.03, "confidence": 0.995}

ACTIVATION_ENERGY_WINDOW_EV = (0.35, 0.65)
MEASURED_TEMPERATURE_RANGE_K = (295.0, 530.0)
SECULAR_FREQUENCY_HZ = 1e6
ION_SURFACE_DISTANCE_M = 72e-6
HEATER_DISTANCE_M = 570e-6
HEATER_RESISTANCE_OHM = 1.2
HEATER_TEMPERATURE_K = 530.0
JOHNSON_FIELD_ESTIMATE = 1.1e-13
MEAN_ARRHENIUS_T0_K = 530.0
NU10_ESTIMATE_HZ = 11e12
GAMMA0_REFERENCE_HZ = 10e12  # stated without the adatom mass; not reproducible from the formula
CORNER_FACTOR_REFERENCE = 1.6
DIPOLE_MOMENT_DEBYE = 5.0
DIPOLE_AREAL_DENSITY_RANGE_PER_M2 = (7e18, 10e18)
