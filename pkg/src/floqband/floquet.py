"""Rational-flux Floquet operator families as q-by-q matrix functions.

At flux p/q (p, q coprime) each driven-rotor operator acts fiberwise on
the circle as a q-by-q matrix function of the Bloch parameter t.  Five
families are built here:

* ``ordkr``  - double kicked rotor at resonance, the product
  D(t) G^-1 D(t) G of the kick diagonal with a Gauss-sum circulant;
* ``harper`` - the self-adjoint Harper / almost Mathieu matrix with
  Bloch-phase boundary hopping;
* ``uh``     - the unitary exponential exp(-i kappa Harper);
* ``kh``     - the kicked Harper product of a kick factor and a
  Fourier-diagonal factor;
* ``skr``    - the single kicked rotor, kick factor times free
  quadratic-phase diagonal (needs p*q even to reduce to a q-fiber).

The kick factor of ``kh``/``skr`` is the fiber image of multiplication
by exp(-2i kappa cos 2 pi t): with S the t-twisted cyclic shift, the
multiplication operator cos(2 pi t) becomes (S + S*)/2.  Matrix
exponentials go through Hermitian eigendecompositions, which keeps the
results unitary to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly

__all__ = [
    "KINDS", "OperatorFamily", "MatrixSample", "CharPolySamples",
    "HalfAlphaError", "gauss_circulant", "kick_diagonal", "twisted_shift",
    "ordkr_matrix", "harper_matrix", "uh_matrix", "kh_matrix", "skr_matrix",
    "char_poly_coeffs", "char_poly_samples", "reduced_poly_samples",
]

KINDS = ("ordkr", "harper", "uh", "kh", "skr")


class HalfAlphaError(ValueError):
    """SKR at odd p*q does not reduce to a q-dimensional fiber."""
    code = "HALF_ALPHA"


@dataclass(frozen=True)
class OperatorFamily:
    """Parameter bundle (kind, p/q, kick strength, coupling, offset)."""
    kind: str
    p: int
    q: int
    kappa: float = 1.0
    lam: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected {KINDS}")
        if self.q < 1 or self.p < 1:
            raise ValueError("p and q must be positive")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"p={self.p} and q={self.q} must be coprime")

    @property
    def alpha(self) -> float:
        return self.p / self.q

    @property
    def hermitian(self) -> bool:
        return self.kind == "harper"

    def matrix(self, t: float) -> "MatrixSample":
        if self.kind == "ordkr":
            return ordkr_matrix(self.p, self.q, self.kappa, t)
        if self.kind == "harper":
            return harper_matrix(self.p, self.q, self.lam, self.theta, t)
        if self.kind == "uh":
            return uh_matrix(self.p, self.q, self.kappa, self.lam,
                             self.theta, t)
        if self.kind == "kh":
            return kh_matrix(self.p, self.q, self.kappa, self.lam,
                             self.theta, t)
        return skr_matrix(self.p, self.q, self.kappa, t)


@dataclass(frozen=True)
class MatrixSample:
    t: float
    matrix: np.ndarray

    def unitarity_residual(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))

    def hermiticity_residual(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m - m.conj().T)))


def gauss_circulant(p: int, q: int, half_phase: bool = False) -> np.ndarray:
    """Circulant of quadratic Gauss-sum entries; unitary for coprime p, q.

    Entry (r, c) is g[(c - r) mod q] with
    g_j = (1/q) sum_k exp(-2 pi i k^2 p/q) exp(2 pi i j k p/q).

    The doubled quadratic weight exp(-2 pi i k^2 p/q) is k-periodic mod
    q for every p, q, but at even q it collapses onto the flux
    p/(q/2) operator (the weights then only depend on k mod q/2).
    ``half_phase`` uses exp(-pi i k^2 p/q) instead, which carries
    genuine flux p/q; the resulting circulant is unitary for every
    coprime pair even though the weights themselves are only k-periodic
    mod q when p*q is even.
    """
    if math.gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    alpha = p / q
    k = np.arange(q)
    if half_phase:
        weights = np.exp(-1j * np.pi * k * k * alpha)
    else:
        weights = np.exp(-2j * np.pi * k * k * alpha)
    g = np.array([np.sum(weights * np.exp(2j * np.pi * j * k * alpha))
                  for j in range(q)]) / q
    idx = (np.arange(q)[None, :] - np.arange(q)[:, None]) % q
    return g[idx]


def kick_diagonal(p: int, q: int, kappa: float, t: float) -> np.ndarray:
    """Diagonal of unimodular kick phases exp(-2i kappa cos 2 pi (t - j p/q))."""
    j = np.arange(q)
    phases = np.exp(-2j * kappa * np.cos(2.0 * np.pi * (t - j * p / q)))
    return np.diag(phases)


def twisted_shift(q: int, t: float) -> np.ndarray:
    """Cyclic shift with Bloch phase: e_r -> e_{r+1}, e_{q-1} -> e^{2 pi i t} e_0."""
    s = np.zeros((q, q), dtype=complex)
    if q == 1:
        s[0, 0] = np.exp(2j * np.pi * t)
        return s
    for r in range(q - 1):
        s[r + 1, r] = 1.0
    s[0, q - 1] = np.exp(2j * np.pi * t)
    return s


def _expm_herm(h: np.ndarray, factor: complex) -> np.ndarray:
    """exp(factor * H) for Hermitian H via eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(factor * w)) @ v.conj().T


def ordkr_matrix(p: int, q: int, kappa: float, t: float) -> MatrixSample:
    """One-period operator of the resonant double kicked rotor.

    The product D(t) G^-1 D(t) G of the kick diagonal with the Gauss
    circulant.  G carries the halved quadratic weights exp(-i pi k^2
    p/q), which make the q-by-q fiber represent flux p/q for every
    coprime pair: the doubled weights would collapse even q onto flux
    p/(q/2), flattening the band structure and breaking the spectral
    correspondence with the kicked Harper family at the same flux.
    """
    g = gauss_circulant(p, q, half_phase=True)
    d = kick_diagonal(p, q, kappa, t)
    return MatrixSample(t, d @ g.conj().T @ d @ g)


def harper_matrix(p: int, q: int, lam: float, theta: float,
                  t: float) -> MatrixSample:
    """Harper (almost Mathieu) Bloch matrix; Hermitian.

    Nearest-neighbour hopping with corner phases exp(-+2 pi i t) plus
    the cosine potential 2*lam*cos(2 pi (j p/q + theta)) on the
    diagonal.  At q = 2 the corner and the subdiagonal coincide and
    their contributions add; at q = 1 both hopping terms fold onto the
    single entry.
    """
    if math.gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    alpha = p / q
    if q == 1:
        val = 2.0 * lam * np.cos(2.0 * np.pi * theta) \
            + 2.0 * np.cos(2.0 * np.pi * t)
        return MatrixSample(t, np.array([[val]], dtype=complex))
    s = twisted_shift(q, t)
    hop = s + s.conj().T
    diag = 2.0 * lam * np.cos(2.0 * np.pi * (np.arange(q) * alpha + theta))
    return MatrixSample(t, hop + np.diag(diag).astype(complex))


def uh_matrix(p: int, q: int, kappa: float, lam: float, theta: float,
              t: float) -> MatrixSample:
    """Unitary exponential of the Harper matrix."""
    h = harper_matrix(p, q, lam, theta, t).matrix
    return MatrixSample(t, _expm_herm(h, -1j * kappa))


def kh_matrix(p: int, q: int, kappa: float, lam: float, theta: float,
              t: float) -> MatrixSample:
    """Kicked Harper fiber matrix: kick factor times Fourier diagonal.

    The second factor exp(-2i kappa lam cos(2 pi (r p/q + theta))) is
    constant in t because the cosine argument only depends on the
    Fourier index mod q.
    """
    if math.gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    s = twisted_shift(q, t)
    kick = _expm_herm(s + s.conj().T, -1j * kappa)
    r = np.arange(q)
    fourier = np.exp(-2j * kappa * lam
                     * np.cos(2.0 * np.pi * (r * p / q + theta)))
    return MatrixSample(t, kick * fourier[None, :])


def skr_matrix(p: int, q: int, kappa: float, t: float) -> MatrixSample:
    """Single kicked rotor fiber matrix.

    The free factor acts on Fourier mode n as exp(-i pi (p/q) n^2),
    which is a function of n mod q only when p*q is even; odd p*q needs
    the doubled fiber (same p over 2q), signalled by ``HalfAlphaError``.
    """
    if math.gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    if (p * q) % 2 == 1:
        raise HalfAlphaError(
            f"p*q = {p * q} is odd: the quadratic phase is only periodic "
            f"mod 2q; rebuild with the doubled fiber (p={p}, q={2 * q})")
    s = twisted_shift(q, t)
    kick = _expm_herm(s + s.conj().T, -1j * kappa)
    r = np.arange(q)
    free = np.exp(-1j * np.pi * (p / q) * r * r)
    return MatrixSample(t, kick * free[None, :])


# ----------------------------------------------------------------------
# characteristic polynomials over a parameter grid
# ----------------------------------------------------------------------

@dataclass
class CharPolySamples:
    """Monic characteristic polynomial coefficients on a t grid.

    ``coeff_rows[i]`` holds the q+1 ascending coefficients of
    det(z I - M(ts[i])).
    """
    family: OperatorFamily
    ts: np.ndarray
    coeff_rows: np.ndarray

    @property
    def degree(self) -> int:
        return self.coeff_rows.shape[1] - 1


def char_poly_coeffs(m: np.ndarray, hermitian: bool = False) -> np.ndarray:
    """Ascending coefficients of det(zI - M) from the eigenvalue product."""
    eig = np.linalg.eigvalsh(m) if hermitian else np.linalg.eigvals(m)
    return npoly.polyfromroots(eig)


def char_poly_samples(family: OperatorFamily, t_grid) -> CharPolySamples:
    """Characteristic polynomials of the family along a sorted t grid."""
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("t_grid must be a nonempty 1-d array")
    if np.any(np.diff(ts) < 0) or ts[0] < 0 or ts[-1] >= 1.0 + 1e-12:
        raise ValueError("t_grid must be sorted inside [0, 1)")
    rows = np.empty((ts.size, family.q + 1), dtype=complex)
    herm = family.hermitian
    for i, t in enumerate(ts):
        rows[i] = char_poly_coeffs(family.matrix(float(t)).matrix, herm)
    return CharPolySamples(family, ts, rows)


def reduced_poly_samples(cps: CharPolySamples) -> CharPolySamples:
    """Reparametrize one coefficient period [0, 1/q) to the full circle.

    The coefficients of the characteristic polynomial repeat with period
    1/q in t, so P(s, .) := C(s/q, .) is a well-defined family with
    period-1 coefficients; the input grid must stay inside one period.
    """
    q = cps.family.q
    if np.any(cps.ts < 0) or np.any(cps.ts >= 1.0 / q):
        raise ValueError(f"grid must lie inside [0, 1/{q}) to cover one period")
    return CharPolySamples(cps.family, cps.ts * q, cps.coeff_rows.copy())
