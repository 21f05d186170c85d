import numpy as np
import pytest

from tafnoise import GaussianMixture, HeatingRateSeries, ensemble_spectrum, field_noise_to_heating_rate
from tafnoise.io import HEATING_RATE_COLUMNS

OMEGA = 2 * np.pi * 1e6
T_LAB = np.linspace(295.0, 530.0, 12)


def synthetic_series(D, T=T_LAB, omega=OMEGA, scale=1e-22, rel_err=0.03, location="A", rng=None):
    """Heating rates generated from the TAF forward model for distribution D."""
    S = ensemble_spectrum(D, omega, T) * scale
    hr = field_noise_to_heating_rate(S, omega)
    if rng is not None:
        hr = hr * (1 + rel_err * rng.standard_normal(hr.shape))
    return HeatingRateSeries.from_arrays(location, T, omega, hr, rel_err * np.abs(hr), 2.0)


def write_heating_csv(path, series_list):
    lines = [",".join(HEATING_RATE_COLUMNS)]
    for s in series_list:
        for p in s.points:
            lines.append(f"{s.location_id},{p.temperature_K!r},{p.temperature_err_K!r},"
                         f"{p.frequency_rad_per_s / (2 * np.pi)!r},{p.heating_rate_quanta_per_s!r},"
                         f"{p.heating_rate_err_quanta_per_s!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def smooth_D():
    return GaussianMixture.single(0.5, 0.3, 1.0)


@pytest.fixture
def heating_csv(tmp_path, smooth_D):
    return write_heating_csv(tmp_path / "hr.csv", [synthetic_series(smooth_D, location="A"),
                                                   synthetic_series(smooth_D, scale=3e-22, location="B")])


@pytest.fixture
def frequency_csv(tmp_path):
    rng = np.random.default_rng(0)
    lines = [",".join(HEATING_RATE_COLUMNS)]
    for loc in "123456":
        for T, a in ((295.0, 1.0), (530.0, 0.88)):
            for f in (0.8e6, 1.0e6, 1.3e6):
                h = 50 * (f / 1e6) ** -(a + 1) * (1 + 0.02 * rng.standard_normal())
                lines.append(f"{loc},{T},2,{f},{h!r},{0.02 * h!r}")
    p = tmp_path / "fs.csv"
    p.write_text("\n".join(lines) + "\n")
    return p


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
