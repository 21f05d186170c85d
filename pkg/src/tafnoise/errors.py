"""Exception hierarchy.

``InputError`` maps to CLI exit code 2, ``NumericalError`` to exit code 1.
"""


class TafNoiseError(Exception):
    """Base class for all package errors."""


class InputError(TafNoiseError, ValueError):
    """Invalid input data or parameters."""


class OutOfRegimeError(InputError):
    """Parameters outside the regime where a formula applies (e.g. omega*tau0 >= 1)."""


class NumericalError(TafNoiseError, ArithmeticError):
    """A numerical procedure failed to converge or became degenerate.

    ``diagnostics`` carries whatever context is useful for debugging
    (residual profiles, iteration counts, ...).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class BoundaryError(NumericalError):
    """A finite-difference stencil falls outside the available data."""


class DegenerateFitError(NumericalError):
    """A fit has no unique or no non-trivial solution."""
