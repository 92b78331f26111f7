"""Gamma-family special functions in log space.

The kernel formulas combine gamma values whose magnitudes overflow double
precision within a few hundred lattice sites, so everything is carried as
logs and recombined only after cancellation.  Evaluation is backed by
``scipy.special`` (gammaln/gammasgn, loggamma, digamma) with explicit pole
guards; ``sinpi`` adds the argument reduction that keeps sin(pi x) accurate
near integers.

Accuracy, verified by the test suite against an independent high-precision
oracle: relative error of the reconstructed gamma below 1e-12 for |x| <= 170,
digamma absolute error below 1e-12 for |x| <= 1e6.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import scipy.special as _sp

from .errors import PoleError

__all__ = [
    "SignedLog",
    "log_gamma_signed",
    "log_gamma_complex",
    "digamma",
    "sinpi",
    "sinpi_complex",
]


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


@dataclass(frozen=True)
class SignedLog:
    """A nonzero real number stored as (log of absolute value, sign).

    Represents ``sign * exp(log_abs)``.  Zero is unrepresentable on purpose:
    the gamma function has no zeros, and its poles raise :class:`PoleError`
    before a SignedLog is ever built.
    """

    log_abs: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log_abs)


def log_gamma_signed(x: float) -> SignedLog:
    """Gamma(x) of a real argument, as a SignedLog.

    The sign alternates between consecutive negative integers:
    Gamma is negative on (-1, 0), positive on (-2, -1), and so on.
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma pole at x = {x}")
    return SignedLog(float(_sp.gammaln(x)), int(_sp.gammasgn(x)))


def log_gamma_complex(w: complex) -> complex:
    """Principal-branch log-gamma, continuous for Re(w) > 0."""
    w = complex(w)
    if w.imag == 0.0 and _is_nonpositive_integer(w.real):
        raise PoleError(f"gamma pole at w = {w}")
    return complex(_sp.loggamma(w))


def digamma(x):
    """psi(x) = Gamma'(x)/Gamma(x), for real or complex x.

    Real input gives a float, complex input a complex; non-positive integer
    arguments raise :class:`PoleError`.
    """
    if isinstance(x, complex):
        if x.imag == 0.0 and _is_nonpositive_integer(x.real):
            raise PoleError(f"digamma pole at x = {x}")
        return complex(_sp.digamma(x))
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"digamma pole at x = {x}")
    return float(_sp.digamma(x))


def sinpi(x: float) -> float:
    """sin(pi * x) with integer argument reduction (exact zeros at integers)."""
    x = float(x)
    n = math.floor(x)
    r = x - n
    if r > 0.5:
        r = 1.0 - r
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def sinpi_complex(w: complex) -> complex:
    """sin(pi * w) with the real part reduced modulo 2."""
    w = complex(w)
    n = math.floor(w.real)
    s = cmath.sin(math.pi * (w - n))
    return -s if n % 2 else s
