import numpy as np
import pytest
from hypothesis import given, strategies as st

from tafnoise import (
    CompositeDistribution,
    DiscreteFluctuators,
    GaussianMixture,
    InputError,
    TabulatedDistribution,
    ensemble_spectrum,
)
from tafnoise.distributions import constant_distribution, iter_parts


def test_tabulated_interpolates_and_vanishes_outside():
    D = TabulatedDistribution([0.3, 0.5], [1.0, 3.0])
    assert D(0.4) == pytest.approx(2.0)
    assert D(0.2) == 0.0 and D(0.6) == 0.0
    assert D.support == (0.3, 0.5)
    with pytest.raises(InputError):
        TabulatedDistribution([0.5, 0.3], [1.0, 1.0])
    with pytest.raises(InputError):
        TabulatedDistribution([0.3, 0.5], [1.0, -1.0])


def test_gaussian_fwhm_and_integral():
    g = GaussianMixture.single(0.5, 0.2, 2.0)
    assert g(0.5) == pytest.approx(2.0)
    assert g(0.6) == pytest.approx(1.0)
    E = np.linspace(-1, 2, 30001)
    assert np.trapezoid(g(E), E) == pytest.approx(g.integral(), rel=1e-9)


def test_composite_adds_parts():
    a = GaussianMixture.single(0.4, 0.1, 1.0)
    b = constant_distribution(0.5)
    c = a + b
    assert isinstance(c, CompositeDistribution)
    assert c(0.4) == pytest.approx(1.5)
    assert len(list(iter_parts(c))) == 2


@given(st.floats(0.1, 10.0))
def test_spectrum_is_linear_in_density(k):
    D = GaussianMixture.single(0.5, 0.3, 1.0)
    T = np.array([300.0, 450.0])
    np.testing.assert_allclose(ensemble_spectrum(D.scaled(k), 2e6 * np.pi, T),
                               k * ensemble_spectrum(D, 2e6 * np.pi, T), rtol=1e-12)


def test_discrete_fluctuators_validation():
    d = DiscreteFluctuators([0.4, 0.5], [1.0, 2.0])
    assert np.all(d(np.linspace(0, 1, 5)) == 0)
    with pytest.raises(InputError):
        DiscreteFluctuators([0.4], [1.0, 2.0])
