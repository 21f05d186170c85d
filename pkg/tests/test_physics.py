import numpy as np
import pytest
from hypothesis import given, strategies as st

from tafnoise import (
    CA40,
    HeatingRatePoint,
    HeatingRateSeries,
    InputError,
    NoiseCurve,
    OutOfRegimeError,
    dominant_energy,
    field_noise_to_heating_rate,
    get_ion,
    heating_rate_to_field_noise,
    taf_rate,
    temperature_rescale,
)
from tafnoise.constants import AMU, E_CHARGE, HBAR
from tafnoise.physics import point_to_field_noise

W1 = 2 * np.pi * 1e6


def test_conversion_matches_hand_arithmetic():
    m = 39.9626 * 1.66053906660e-27
    hand = 4 * m * 1.054571817e-34 * W1 * 1.0 / 1.602176634e-19**2
    assert heating_rate_to_field_noise(1.0, W1) == pytest.approx(hand, rel=1e-9)
    assert heating_rate_to_field_noise(1.0, W1) == pytest.approx(6.85e-15, rel=1e-3)


def test_conversion_scales_linearly():
    assert heating_rate_to_field_noise(0.0, W1) == 0.0
    assert heating_rate_to_field_noise(1000.0, W1) == pytest.approx(6.85e-12, rel=1e-3)


def test_inverse_conversion():
    assert field_noise_to_heating_rate(6.85e-15, W1) == pytest.approx(1.0, rel=1e-3)
    assert field_noise_to_heating_rate(0.0, W1) == 0.0


@given(st.floats(1e-3, 1e6), st.floats(1e5, 1e8), st.sampled_from(["40Ca+", "9Be+", "171Yb+"]))
def test_conversion_round_trip(hr, w, ion):
    ion = get_ion(ion)
    back = field_noise_to_heating_rate(heating_rate_to_field_noise(hr, w, ion), w, ion)
    assert back == pytest.approx(hr, rel=1e-12)


def test_conversion_rejects_bad_input():
    with pytest.raises(InputError):
        heating_rate_to_field_noise(1.0, -1.0)
    with pytest.raises(InputError):
        field_noise_to_heating_rate(-1.0, W1)
    with pytest.raises(InputError):
        get_ion("unobtainium+")


def test_point_conversion_propagates_error():
    p = HeatingRatePoint(300.0, 1.0, W1, 10.0, 1.0)
    S, err = point_to_field_noise(p)
    assert err / S == pytest.approx(0.1)


def test_point_validation():
    with pytest.raises(InputError):
        HeatingRatePoint(-1.0, 0.0, W1, 1.0)
    with pytest.raises(InputError):
        HeatingRatePoint(300.0, 0.0, W1, -1.0)


def test_taf_rate_values():
    assert taf_rate(0.0, 300.0) == pytest.approx(1e13)
    assert taf_rate(0.4, 300.0) == pytest.approx(1.90e6, rel=1e-2)
    assert taf_rate(0.4, 400.0) == pytest.approx(9.12e7, rel=1e-2)


@given(st.floats(0.05, 1.5), st.floats(50, 1000), st.floats(50, 1000))
def test_taf_rate_increases_with_temperature(E, T1, T2):
    if T1 < T2:
        assert taf_rate(E, T1) <= taf_rate(E, T2)


def test_dominant_energy_values():
    assert dominant_energy(W1, 295.0) == pytest.approx(0.363, abs=5e-4)
    assert dominant_energy(W1, 530.0) == pytest.approx(0.652, abs=5e-4)
    assert dominant_energy(W1, 325.05) == pytest.approx(0.400, abs=5e-4)


def test_dominant_energy_inverts_rate():
    E = dominant_energy(W1, 410.0)
    assert taf_rate(E, 410.0) == pytest.approx(W1, rel=1e-10)


def test_dominant_energy_regime():
    with pytest.raises(OutOfRegimeError):
        dominant_energy(2e13, 300.0)


def test_temperature_rescale():
    s = HeatingRateSeries.from_arrays("x", [295.0, 500.0], W1, [1.0, 2.0], temperature_err_K=[1.0, 1.0])
    assert temperature_rescale(s, 295.0, 1.0) is s
    out = temperature_rescale(s, 295.0, 1.1)
    assert out.temperature_K == pytest.approx([295.0, 520.5])
    assert out.heating_rate == pytest.approx(s.heating_rate)
    with pytest.raises(InputError):
        temperature_rescale(s, 295.0, 3.0)


@given(st.floats(0.5, 2.0))
def test_room_temperature_is_fixed_point(scale):
    s = HeatingRateSeries.from_arrays("x", [295.0], W1, [1.0])
    assert temperature_rescale(s, 295.0, scale).temperature_K[0] == pytest.approx(295.0)


def test_series_validation():
    s = HeatingRateSeries.from_arrays("x", [300.0, 310.0], [W1, 2 * W1], [1.0, 1.0])
    assert not s.is_temperature_scan()
    with pytest.raises(InputError):
        s.validate_temperature_scan()
    with pytest.raises(InputError):
        HeatingRateSeries("empty", ())


def test_noise_curve_checks():
    with pytest.raises(InputError):
        NoiseCurve.temperature_scan(W1, [300.0, 300.0], [1.0, 2.0])
    with pytest.raises(InputError):
        NoiseCurve.temperature_scan(W1, [300.0, 310.0], [1.0, -2.0])
    c = NoiseCurve.temperature_scan(W1, [300.0, 310.0, 320.0], [1.0, 2.0, 3.0])
    assert c.restrict_temperature(305, 330).values.tolist() == [2.0, 3.0]


def test_ion_constants():
    assert CA40.mass_kg == pytest.approx(39.9626 * AMU)
    assert CA40.charge_C == E_CHARGE
    assert HBAR == pytest.approx(1.054571817e-34)
