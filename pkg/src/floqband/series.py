"""Truncated power-series arithmetic for germs of analytic functions.

A germ at a real base point is stored as a finite list of Taylor
coefficients.  All arithmetic keeps the truncation order fixed, so the
objects form a (truncated) local algebra: products drop terms beyond the
truncation degree, derivatives lose one order of information but are
re-padded with zero.

Coefficients can be produced from an analytic callback by discretizing
Cauchy's coefficient formula on a small circle around the base point
(a plain FFT of uniformly sampled boundary values).
"""

from __future__ import annotations

import math

import numpy as np

#: vanishing order of the (numerically) zero germ
INFINITE_ORD = math.inf

#: default truncation order; enough for every polygon/Puiseux use here
DEFAULT_ORDER = 16

#: default radius for the Cauchy-formula quadrature circle
DEFAULT_RADIUS = 0.05

#: default relative threshold separating signal from quadrature noise
DEFAULT_REL_TOL = 1e-9


class TruncatedSeries:
    """Taylor coefficients c_0..c_N of a germ at ``base_point``.

    Instances are immutable in intent: operations return new series and
    never mutate the coefficient array in place.
    """

    __slots__ = ("coeffs", "base_point")

    def __init__(self, coeffs, base_point: float = 0.0):
        c = np.asarray(coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("a series needs at least the constant coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite series coefficients")
        self.coeffs = c
        self.base_point = float(base_point)

    @property
    def order(self) -> int:
        """Truncation order N (the series carries N+1 coefficients)."""
        return self.coeffs.size - 1

    @classmethod
    def constant(cls, value, order: int = DEFAULT_ORDER, base_point: float = 0.0):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c, base_point)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER, base_point: float = 0.0):
        return cls(np.zeros(order + 1, dtype=complex), base_point)

    @classmethod
    def monomial(cls, degree: int, coefficient=1.0,
                 order: int = DEFAULT_ORDER, base_point: float = 0.0):
        """Series of ``coefficient * (t - base_point)**degree``."""
        if not 0 <= degree <= order:
            raise ValueError("monomial degree outside truncation order")
        c = np.zeros(order + 1, dtype=complex)
        c[degree] = coefficient
        return cls(c, base_point)

    # -- arithmetic ----------------------------------------------------

    def _check_compatible(self, other: "TruncatedSeries"):
        if self.base_point != other.base_point:
            raise ValueError(
                f"base point mismatch: {self.base_point} vs {other.base_point}")
        if self.order != other.order:
            raise ValueError(
                f"truncation order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check_compatible(other)
        return TruncatedSeries(self.coeffs + other.coeffs, self.base_point)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check_compatible(other)
        return TruncatedSeries(self.coeffs - other.coeffs, self.base_point)

    def __neg__(self):
        return TruncatedSeries(-self.coeffs, self.base_point)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check_compatible(other)
            prod = np.convolve(self.coeffs, other.coeffs)[: self.order + 1]
            return TruncatedSeries(prod, self.base_point)
        if isinstance(other, (int, float, complex)):
            return TruncatedSeries(self.coeffs * other, self.base_point)
        return NotImplemented

    __rmul__ = __mul__

    def derivative(self) -> "TruncatedSeries":
        """Termwise derivative, zero-padded back to the same order."""
        n = self.order
        d = np.zeros(n + 1, dtype=complex)
        if n >= 1:
            d[:n] = self.coeffs[1:] * np.arange(1, n + 1)
        return TruncatedSeries(d, self.base_point)

    def rescale(self, c) -> "TruncatedSeries":
        """Substitute t -> c*t (relative to the base point): c_k -> c_k * c**k."""
        powers = np.power(complex(c), np.arange(self.order + 1))
        return TruncatedSeries(self.coeffs * powers, self.base_point)

    def __call__(self, t) -> complex:
        """Evaluate the truncated polynomial at the point ``t`` (absolute)."""
        dt = t - self.base_point
        return complex(np.polynomial.polynomial.polyval(dt, self.coeffs))

    # -- diagnostics ---------------------------------------------------

    def ord(self, rel_tol: float = DEFAULT_REL_TOL):
        """Smallest index with a coefficient above ``rel_tol`` relative to
        the largest one; ``INFINITE_ORD`` for the numerically zero germ."""
        if rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        mags = np.abs(self.coeffs)
        top = mags.max()
        if top == 0.0:
            return INFINITE_ORD
        above = np.nonzero(mags > rel_tol * top)[0]
        if above.size == 0:
            return INFINITE_ORD
        return int(above[0])

    def is_zero(self, rel_tol: float = DEFAULT_REL_TOL) -> bool:
        return math.isinf(self.ord(rel_tol))

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        return {
            "base_point": self.base_point,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries":
        coeffs = [complex(re, im) for re, im in data["coeffs"]]
        return cls(coeffs, data.get("base_point", 0.0))

    def __repr__(self):
        return (f"TruncatedSeries(order={self.order}, "
                f"base_point={self.base_point}, coeffs={self.coeffs!r})")


def series_from_function(func, base_point: float = 0.0,
                         order: int = DEFAULT_ORDER,
                         radius: float = DEFAULT_RADIUS,
                         nodes: int | None = None) -> TruncatedSeries:
    """Taylor coefficients of an analytic callback via Cauchy's formula.

    Samples ``func`` on the circle of the given radius around the base
    point and reads the coefficients off the discrete Fourier transform,
    scaled by ``radius**-k``.  The callback must be analytic on the
    closed disk for the aliasing error to stay at the noise floor.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if nodes is None:
        nodes = max(4 * order, 64)
    if nodes < 4 * order:
        raise ValueError("need at least 4*order quadrature nodes")
    angles = 2.0 * np.pi * np.arange(nodes) / nodes
    points = base_point + radius * np.exp(1j * angles)
    samples = np.asarray([func(z) for z in points], dtype=complex)
    if not np.all(np.isfinite(samples)):
        raise ValueError("callback returned non-finite samples")
    hat = np.fft.fft(samples) / nodes
    coeffs = hat[: order + 1] / radius ** np.arange(order + 1)
    return TruncatedSeries(coeffs, base_point)
