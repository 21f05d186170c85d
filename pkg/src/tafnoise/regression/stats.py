"""t-test on the change of the frequency exponent between low and high temperature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import DegenerateFitError, InputError


@dataclass(frozen=True)
class DeltaAlphaTest:
    t_value: float
    mean_delta: float
    mean_delta_err: float
    weighted_std: float
    n_samples: int
    confidence_two_sided: float
    confidence_one_sided: float

    def as_dict(self):
        return dict(self.__dict__)


def weighted_mean_std(x, sigma):
    """Inverse-variance weighted mean and unbiased (reliability-weight) standard deviation."""
    x = np.asarray(x, float)
    w = 1.0 / np.asarray(sigma, float) ** 2
    V1, V2 = w.sum(), (w**2).sum()
    mean = float(np.sum(w * x) / V1)
    var = float(np.sum(w * (x - mean) ** 2) / (V1 - V2 / V1))
    return mean, np.sqrt(var)


def t_test_delta_alpha(pairs) -> DeltaAlphaTest:
    """One-sample t-test of delta = alpha_low_T - alpha_high_T against zero.

    ``pairs`` holds ``((alpha_low, err_low), (alpha_high, err_high))``. Each
    delta carries the quadrature sum of both errors; the weighted mean and
    standard deviation use inverse-variance weights and t = mean / (s / sqrt(n))
    with n - 1 degrees of freedom. A positive mean is a decrease of alpha on
    heating.
    """
    pairs = list(pairs)
    if len(pairs) < 2:
        raise InputError("the t-test needs at least two pairs")
    d = np.array([lo[0] - hi[0] for lo, hi in pairs], float)
    s = np.array([np.hypot(lo[1], hi[1]) for lo, hi in pairs], float)
    if np.any(s <= 0):
        raise InputError("every alpha needs a positive uncertainty")
    n = d.size
    if np.all(d == 0):
        return DeltaAlphaTest(0.0, 0.0, 0.0, 0.0, n, 0.0, 0.0)
    mean, std = weighted_mean_std(d, s)
    if std == 0:
        raise DegenerateFitError("all delta-alpha samples are identical; t is undefined")
    sem = std / np.sqrt(n)
    t = mean / sem
    p_two = 2 * stats.t.sf(abs(t), n - 1)
    p_one = stats.t.sf(t, n - 1)
    return DeltaAlphaTest(float(t), mean, float(sem), float(std), n, float(1 - p_two), float(1 - p_one))
