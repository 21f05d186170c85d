"""Locally weighted polynomial regression (LOESS)."""

from __future__ import annotations

import numpy as np

from ..errors import InputError


def tricube(u):
    u = np.clip(np.abs(u), 0.0, 1.0)
    return (1.0 - u**3) ** 3


class Loess:
    """LOESS smoother that can be evaluated at arbitrary x.

    For each evaluation point the ``ceil(span * n)`` nearest samples are
    weighted with a tricube kernel scaled to the distance of the farthest of
    them, multiplied by inverse-variance weights when ``sigma`` is given, and
    a polynomial of ``degree`` is fitted by weighted least squares.
    Polynomial data of order <= ``degree`` is reproduced exactly.
    """

    def __init__(self, x, y, sigma=None, span=0.6, degree=2):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        if x.shape != y.shape or x.ndim != 1:
            raise InputError("x and y must be 1-D arrays of equal length")
        if not 0 < span <= 1:
            raise InputError(f"span must lie in (0, 1], got {span}")
        if degree < 0:
            raise InputError("degree must be >= 0")
        if x.size < degree + 2:
            raise InputError(f"LOESS of degree {degree} needs at least {degree + 2} points, got {x.size}")
        self.has_sigma = sigma is not None
        if sigma is None:
            w = np.ones_like(x)
        else:
            sigma = np.broadcast_to(np.asarray(sigma, float), x.shape)
            if np.any(sigma <= 0):
                raise InputError("sigma must be positive")
            w = 1.0 / sigma**2
        order = np.argsort(x, kind="stable")
        self.x, self.y, self.w = x[order], y[order], w[order]
        self.span = span
        self.degree = degree
        # the farthest neighbour gets zero kernel weight, so keep degree + 2
        self.k = min(x.size, max(int(np.ceil(span * x.size)), degree + 2))
        self._scale = np.ptp(self.x) or 1.0

    def _operator_row(self, x0):
        # weights l such that the smoothed value at x0 is l @ y
        d = np.abs(self.x - x0)
        idx = np.argsort(d, kind="stable")[: self.k]
        h = d[idx].max()
        if h == 0:
            h = 1.0
        kw = tricube(d[idx] / h) * self.w[idx]
        u = (self.x[idx] - x0) / self._scale
        V = np.vander(u, self.degree + 1, increasing=True)
        sw = np.sqrt(kw)
        row = np.zeros(self.x.size)
        row[idx] = np.linalg.pinv(V * sw[:, None])[0] * sw
        return row

    def _apply(self, x, fn):
        x = np.asarray(x, float)
        out = np.array([fn(self._operator_row(v)) for v in np.atleast_1d(x).ravel()]).reshape(np.shape(x))
        return out if out.ndim else float(out)

    def __call__(self, x):
        return self._apply(x, lambda row: row @ self.y)

    def stderr(self, x):
        """Standard error of the smoothed value, propagated from ``sigma``.

        Returns zeros when the smoother was built without uncertainties.
        """
        if not self.has_sigma:
            return self._apply(x, lambda row: 0.0)
        return self._apply(x, lambda row: np.sqrt(row**2 @ (1.0 / self.w)))


def loess_smooth(x, y, sigma=None, span=0.6, degree=2) -> Loess:
    """Build a :class:`Loess` smoother (callable at arbitrary x)."""
    return Loess(x, y, sigma, span, degree)
