import numpy as np
import pytest
from hypothesis import given, strategies as st

from tafnoise import GaussianMixture, InputError
from tafnoise.altmodels import (
    ALUMINUM,
    DipoleModelParams,
    adatom_corner_factor,
    adatom_gamma0,
    adatom_model,
    adatom_nu10_from_T0,
    debye_to_C_m,
    diffusion_spectrum,
    dipole_density_solve,
    dipole_field_noise,
    dipole_spectrum,
    johnson_field_estimate,
    johnson_voltage_noise,
    thin_film_johnson_ratio,
)
from tafnoise.constants import CA40, H_PLANCK, K_B, K_B_EV

W1 = 2 * np.pi * 1e6


def test_diffusion_is_inverse_square():
    w = np.array([1e5, 2e5, 7e6])
    S = diffusion_spectrum(1.0, 0.3, 500.0, w)
    assert S[1] / S[0] == pytest.approx(0.25, rel=1e-14)
    slope = np.polyfit(np.log(w), np.log(S), 1)[0]
    assert slope == pytest.approx(-2.0, abs=1e-12)
    assert diffusion_spectrum(3.0, 0.0, 500.0, 2.0) == pytest.approx(0.75)


@given(st.floats(0.01, 1.0), st.floats(100, 1000))
def test_diffusion_is_arrhenius(E_b, T):
    a = diffusion_spectrum(1.0, E_b, T, W1) / diffusion_spectrum(1.0, 0.0, T, W1)
    assert a == pytest.approx(np.exp(-(E_b / K_B_EV) / T), rel=1e-12)


def test_adatom_nu10():
    assert adatom_nu10_from_T0(530.0) == pytest.approx(1.104e13, rel=1e-3)
    assert adatom_nu10_from_T0(0.0) == 0.0


def test_adatom_gamma0():
    r = adatom_gamma0(1.104e13, CA40.mass_kg)
    assert r.value == pytest.approx(1.15e11, rel=1e-2)
    assert not r.valid and "Debye" in r.notes[0]
    assert adatom_gamma0(2e12, CA40.mass_kg).valid
    assert adatom_gamma0(2e12, CA40.mass_kg).value * 16 == pytest.approx(adatom_gamma0(4e12, CA40.mass_kg).value)
    assert adatom_gamma0(1e12, 0.0).value == 0.0


def test_adatom_corner_factor():
    nu = adatom_nu10_from_T0(530.0)
    assert H_PLANCK * nu / (K_B * 530.0) == pytest.approx(1.0, rel=1e-12)
    assert adatom_corner_factor(nu, 530.0) == pytest.approx(1.582, abs=1e-3)
    assert adatom_corner_factor(nu, 1e-3) == pytest.approx(1.0)
    T = H_PLANCK * 1e12 / (K_B * np.log(2))
    assert adatom_corner_factor(1e12, T) == pytest.approx(2.0, rel=1e-12)


def test_adatom_model_chain():
    out = adatom_model(530.0, CA40.mass_kg, 530.0, ALUMINUM)
    assert out["debye_violation"]
    assert out["corner_frequency_Hz"] == pytest.approx(out["gamma0_Hz"] * out["corner_factor"])


def test_johnson_noise():
    assert johnson_voltage_noise(530.0, 1.2) == pytest.approx(3.512e-20, rel=1e-3)
    assert johnson_voltage_noise(530.0, 0.0) == 0.0
    assert johnson_voltage_noise(1060.0, 1.2) == pytest.approx(2 * johnson_voltage_noise(530.0, 1.2))
    assert johnson_voltage_noise(530.0, 3.6) == pytest.approx(3 * johnson_voltage_noise(530.0, 1.2))
    est = johnson_field_estimate(530.0, 1.2, 570e-6)
    assert est.value == pytest.approx(1.081e-13, rel=1e-3)
    assert est.value == pytest.approx(1.1e-13, rel=0.03)
    assert johnson_field_estimate(530.0, 1.2, np.inf).value == 0.0
    assert thin_film_johnson_ratio(295.0, 590.0) == pytest.approx(4.0)
    with pytest.raises(InputError):
        johnson_field_estimate(530.0, 1.2, 0.0)


def _dipole(mu_debye=5.0):
    D = GaussianMixture.single(0.5, 0.3, 1.0)
    return DipoleModelParams(debye_to_C_m(mu_debye), 72e-6, D)


def test_dipole_spectrum_scales_with_moment_squared():
    assert dipole_spectrum(_dipole(10.0), W1, 400.0) == pytest.approx(4 * dipole_spectrum(_dipole(5.0), W1, 400.0))


def test_dipole_density_is_proportional_to_noise():
    p = _dipole()
    s1 = dipole_density_solve(1e-11, p, W1, 400.0)
    s2 = dipole_density_solve(2e-11, p, W1, 400.0)
    assert s2.value == pytest.approx(2 * s1.value)
    assert dipole_field_noise(s1.value, p, W1, 400.0) == pytest.approx(1e-11)
    assert s1.notes


def test_dipole_density_plausible_scale():
    # measured-scale noise with a 5 D dipole gives a sub-monolayer areal density
    r = dipole_density_solve(1e-11, _dipole(), W1, 400.0)
    assert 1e15 < r.value < 1e20
