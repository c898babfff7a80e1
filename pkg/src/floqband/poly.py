"""Complex polynomial algebra: resultants, discriminants, GCD, roots.

Polynomials live in two flavours: ``ComplexPoly`` over the complex
numbers and ``SeriesPoly`` whose coefficients are truncated Taylor germs
(see :mod:`floqband.series`).  The Sylvester resultant follows the
classical banded layout (deg Q rows of P-coefficients over deg P rows of
Q-coefficients, each row shifted one column right); the discriminant of
a monic polynomial is the negated resultant of the polynomial with its
derivative, which for a quadratic reduces to ``p1**2 - 4*p0``.

The Euclidean GCD works with a relative remainder threshold because an
exact zero remainder never happens in floating point; cofactors of the
first Bezout identity are carried along through the remainder chain.
"""

from __future__ import annotations

import math

import numpy as np
import numpy.polynomial.polynomial as npoly

from .series import DEFAULT_REL_TOL, INFINITE_ORD, TruncatedSeries

__all__ = [
    "ComplexPoly", "SeriesPoly", "poly_derivative", "sylvester_matrix",
    "sylvester_resultant", "discriminant", "euclid_gcd_bezout", "is_simple",
    "poly_roots", "series_poly_derivative", "series_poly_discriminant",
]


class ComplexPoly:
    """Dense complex polynomial, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        self.coeffs = c

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def is_monic(self, tol: float = 1e-12) -> bool:
        return abs(self.leading - 1.0) <= tol

    @classmethod
    def from_roots(cls, roots) -> "ComplexPoly":
        """Monic polynomial with the given roots (leading coefficient 1)."""
        return cls(npoly.polyfromroots(np.asarray(roots, dtype=complex)))

    def __call__(self, z):
        return npoly.polyval(z, self.coeffs)

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            return ComplexPoly(npoly.polymul(self.coeffs, other.coeffs))
        return ComplexPoly(self.coeffs * other)

    __rmul__ = __mul__

    def __add__(self, other):
        return ComplexPoly(npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return ComplexPoly(npoly.polysub(self.coeffs, other.coeffs))

    def to_json(self) -> list:
        return [[float(c.real), float(c.imag)] for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "ComplexPoly":
        return cls([complex(re, im) for re, im in data])

    def __repr__(self):
        return f"ComplexPoly(degree={self.degree}, coeffs={self.coeffs!r})"


def _as_poly(p) -> ComplexPoly:
    return p if isinstance(p, ComplexPoly) else ComplexPoly(p)


def poly_derivative(p) -> ComplexPoly:
    """Formal derivative; a constant input yields the zero polynomial."""
    p = _as_poly(p)
    if p.degree == 0:
        return ComplexPoly([0.0])
    return ComplexPoly(npoly.polyder(p.coeffs))


def sylvester_matrix(p, q) -> np.ndarray:
    """Banded (m+n) x (m+n) resultant matrix of two complex polynomials.

    The first ``deg q`` rows carry the coefficients of ``p`` in
    descending order, each row shifted one column to the right; the
    remaining ``deg p`` rows carry ``q`` the same way.
    """
    p, q = _as_poly(p), _as_poly(q)
    m, n = p.degree, q.degree
    if m < 1 or n < 1:
        raise ValueError("resultant needs two polynomials of degree >= 1")
    if p.coeffs[-1] == 0 or q.coeffs[-1] == 0:
        raise ValueError("zero leading coefficient: degree is ambiguous")
    size = m + n
    s = np.zeros((size, size), dtype=complex)
    pdesc = p.coeffs[::-1]
    qdesc = q.coeffs[::-1]
    for row in range(n):
        s[row, row: row + m + 1] = pdesc
    for row in range(m):
        s[n + row, row: row + n + 1] = qdesc
    return s


def sylvester_resultant(p, q) -> complex:
    """Determinant of the Sylvester matrix, via pivoted LU."""
    return complex(np.linalg.det(sylvester_matrix(p, q)))


def discriminant(p) -> complex:
    """Negated resultant of a monic polynomial with its derivative."""
    p = _as_poly(p)
    if p.degree < 2:
        raise ValueError("discriminant needs degree >= 2")
    if not p.is_monic():
        raise ValueError("discriminant requires a monic polynomial")
    return -sylvester_resultant(p, poly_derivative(p))


def _inf_norm(coeffs) -> float:
    return float(np.max(np.abs(coeffs)))


def euclid_gcd_bezout(p, q, eps: float = 1e-9):
    """Euclidean remainder chain with Bezout cofactors.

    Returns ``(g, p1, q1)`` with ``g`` monic and ``p1*p + q1*q == g`` up
    to roundoff.  A remainder is treated as zero once its infinity norm
    drops below ``eps`` times the norm of the polynomial it was divided
    into, which is the only stable stopping rule in floating point.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    p, q = _as_poly(p), _as_poly(q)
    if _inf_norm(p.coeffs) == 0 and _inf_norm(q.coeffs) == 0:
        raise ValueError("GCD of two zero polynomials is undefined")

    # remainder chain state: r = s*p + t*q for each row
    r0, s0, t0 = p.coeffs, np.array([1.0 + 0j]), np.array([0.0 + 0j])
    r1, s1, t1 = q.coeffs, np.array([0.0 + 0j]), np.array([1.0 + 0j])
    if r1.size > r0.size:
        r0, s0, t0, r1, s1, t1 = r1, s1, t1, r0, s0, t0

    while _inf_norm(r1) > eps * max(_inf_norm(r0), 1e-300):
        quo, rem = npoly.polydiv(r0, r1)
        rem = rem if rem.size <= max(r1.size - 1, 1) else rem[: r1.size - 1]
        r0, s0, t0, r1, s1, t1 = (
            r1, s1, t1,
            np.atleast_1d(rem),
            npoly.polysub(s0, npoly.polymul(quo, s1)),
            npoly.polysub(t0, npoly.polymul(quo, t1)),
        )

    # trim trailing near-zero coefficients before normalizing
    keep = np.nonzero(np.abs(r0) > eps * max(_inf_norm(r0), 1e-300))[0]
    if keep.size:
        r0 = r0[: keep[-1] + 1]
    lead = r0[-1]
    g = ComplexPoly(r0 / lead)
    return g, ComplexPoly(s0 / lead), ComplexPoly(t0 / lead)


def poly_roots(p) -> np.ndarray:
    """All roots with multiplicity: companion eigenvalues plus one Newton
    polishing step (skipped where the derivative is numerically zero)."""
    p = _as_poly(p)
    if p.degree < 1:
        raise ValueError("roots of a constant polynomial are undefined")
    if p.coeffs[-1] == 0:
        raise ValueError("zero leading coefficient: degree is ambiguous")
    roots = npoly.polyroots(p.coeffs)
    dp = npoly.polyder(p.coeffs)
    vals = npoly.polyval(roots, p.coeffs)
    dvals = npoly.polyval(roots, dp)
    safe = np.abs(dvals) > 1e3 * np.finfo(float).tiny
    step = np.zeros_like(roots)
    step[safe] = vals[safe] / dvals[safe]
    # only polish where the Newton step is a small correction
    small = np.abs(step) < 1e-2 * (1.0 + np.abs(roots))
    polished = roots - np.where(safe & small, step, 0.0)
    return polished


def is_simple(p, eps: float = 1e-9, rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """Repeated-root test via the discriminant.

    Complex polynomials are simple when ``|D|`` clears ``eps`` times the
    product of the coefficient norms of the polynomial and its
    derivative.  Series polynomials are simple when the discriminant
    germ is not numerically zero (finite vanishing order).
    """
    if isinstance(p, SeriesPoly):
        return not math.isinf(series_poly_discriminant(p).ord(rel_tol))
    p = _as_poly(p)
    d = discriminant(p)
    scale = _inf_norm(p.coeffs) * _inf_norm(poly_derivative(p).coeffs)
    return abs(d) > eps * max(scale, 1e-300)


# ----------------------------------------------------------------------
# polynomials with truncated-series coefficients
# ----------------------------------------------------------------------

class SeriesPoly:
    """Monic-flagged polynomial in z whose coefficients are germs."""

    __slots__ = ("coeffs", "monic")

    def __init__(self, coeffs, monic: bool | None = None):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("empty coefficient list")
        base = coeffs[0].base_point
        order = coeffs[0].order
        for c in coeffs[1:]:
            if c.base_point != base:
                raise ValueError("coefficient series must share a base point")
            if c.order != order:
                raise ValueError("coefficient series must share a truncation order")
        self.coeffs = coeffs
        if monic is None:
            top = coeffs[-1].coeffs
            monic = abs(top[0] - 1.0) <= 1e-12 and _inf_norm(top[1:]) <= 1e-12 \
                if top.size > 1 else abs(top[0] - 1.0) <= 1e-12
        self.monic = bool(monic)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def base_point(self) -> float:
        return self.coeffs[0].base_point

    @property
    def order(self) -> int:
        return self.coeffs[0].order

    def at_base(self) -> ComplexPoly:
        """Specialize the coefficients at the base point (t = t0)."""
        return ComplexPoly([c.coeffs[0] for c in self.coeffs])

    def __call__(self, t, z) -> complex:
        """Evaluate the truncated polynomial at (t, z)."""
        vals = np.array([c(t) for c in self.coeffs])
        return complex(npoly.polyval(z, vals))

    def to_json(self) -> dict:
        return {"monic": self.monic,
                "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "SeriesPoly":
        return cls([TruncatedSeries.from_json(c) for c in data["coeffs"]],
                   monic=data.get("monic"))

    def __repr__(self):
        return f"SeriesPoly(degree={self.degree}, order={self.order})"


def series_poly_derivative(q: SeriesPoly) -> SeriesPoly:
    """d/dz of a series-coefficient polynomial."""
    if q.degree == 0:
        return SeriesPoly([TruncatedSeries.zero(q.order, q.base_point)],
                          monic=False)
    coeffs = [q.coeffs[k] * float(k) for k in range(1, q.degree + 1)]
    return SeriesPoly(coeffs, monic=False)


def _series_zero_like(q: SeriesPoly) -> TruncatedSeries:
    return TruncatedSeries.zero(q.order, q.base_point)


def _series_det_laplace(mat, zero: TruncatedSeries,
                        rel_tol: float) -> TruncatedSeries:
    """Division-free determinant of a series-entried matrix.

    Laplace expansion along rows with memoization on the active column
    set; entries that are numerically zero germs are skipped, which
    makes the banded Sylvester layout cheap despite the exponential
    worst case.
    """
    n = len(mat)
    nonzero = [[not mat[i][j].is_zero(rel_tol) for j in range(n)]
               for i in range(n)]
    cache: dict[tuple[int, int], TruncatedSeries] = {}

    def minor(row: int, colmask: int) -> TruncatedSeries:
        if row == n:
            return TruncatedSeries.constant(1.0, zero.order, zero.base_point)
        key = (row, colmask)
        hit = cache.get(key)
        if hit is not None:
            return hit
        total = zero
        sign = 1.0
        for j in range(n):
            bit = 1 << j
            if not (colmask & bit):
                continue
            if nonzero[row][j]:
                sub = minor(row + 1, colmask & ~bit)
                total = total + (sign * mat[row][j]) * sub
            sign = -sign
        cache[key] = total
        return total

    return minor(0, (1 << n) - 1)


def _series_div(a: TruncatedSeries, b: TruncatedSeries,
                rel_tol: float) -> TruncatedSeries:
    """Exact power-series division a/b, shifting out the common vanishing
    order of ``b``.  High-order coefficients beyond the shifted window are
    unknowable and returned as zero."""
    k = b.ord(rel_tol)
    if math.isinf(k):
        raise ZeroDivisionError("division by a numerically zero germ")
    k = int(k)
    n = a.order
    anum = np.zeros(n + 1, dtype=complex)
    anum[: n + 1 - k] = a.coeffs[k:]
    bden = np.zeros(n + 1, dtype=complex)
    bden[: n + 1 - k] = b.coeffs[k:]
    out = np.zeros(n + 1, dtype=complex)
    inv0 = 1.0 / bden[0]
    for i in range(n + 1):
        acc = anum[i]
        if i:
            acc = acc - np.dot(bden[1: i + 1][::-1], out[:i])
        out[i] = acc * inv0
    return TruncatedSeries(out, a.base_point)


def _series_det_bareiss(mat, zero: TruncatedSeries,
                        rel_tol: float) -> TruncatedSeries:
    """Fraction-free elimination for larger series matrices.

    Divisions are exact in the untruncated ring; with truncation the top
    coefficients can degrade when pivots vanish at the base point, so
    callers should prefer the Laplace path for small systems.
    """
    n = len(mat)
    a = [[mat[i][j] for j in range(n)] for i in range(n)]
    sign = 1.0
    prev = TruncatedSeries.constant(1.0, zero.order, zero.base_point)
    for k in range(n - 1):
        if a[k][k].is_zero(rel_tol):
            pivot_row = next((i for i in range(k + 1, n)
                              if not a[i][k].is_zero(rel_tol)), None)
            if pivot_row is None:
                return zero
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        # prefer the pivot of lowest vanishing order within the column
        best = min(range(k, n),
                   key=lambda i: (a[i][k].ord(rel_tol), i))
        if best != k:
            a[k], a[best] = a[best], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = _series_div(num, prev, rel_tol) \
                    if k > 0 else num
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def series_sylvester_resultant(p: SeriesPoly, q: SeriesPoly,
                               rel_tol: float = DEFAULT_REL_TOL
                               ) -> TruncatedSeries:
    """Resultant of two series polynomials as a truncated germ."""
    m, n = p.degree, q.degree
    if m < 1 or n < 1:
        raise ValueError("resultant needs two polynomials of degree >= 1")
    zero = _series_zero_like(p)
    size = m + n
    mat = [[zero for _ in range(size)] for _ in range(size)]
    pdesc = list(reversed(p.coeffs))
    qdesc = list(reversed(q.coeffs))
    for row in range(n):
        for j in range(m + 1):
            mat[row][row + j] = pdesc[j]
    for row in range(m):
        for j in range(n + 1):
            mat[n + row][row + j] = qdesc[j]
    if size <= 9:
        return _series_det_laplace(mat, zero, rel_tol)
    return _series_det_bareiss(mat, zero, rel_tol)


def series_poly_discriminant(q: SeriesPoly,
                             rel_tol: float = DEFAULT_REL_TOL
                             ) -> TruncatedSeries:
    """Discriminant germ of a monic series polynomial."""
    if q.degree < 2:
        raise ValueError("discriminant needs degree >= 2")
    if not q.monic:
        raise ValueError("discriminant requires a monic polynomial")
    res = series_sylvester_resultant(q, series_poly_derivative(q), rel_tol)
    return -res
