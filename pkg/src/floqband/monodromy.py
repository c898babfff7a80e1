"""Eigenvalue paths around one parameter period and their monodromy.

Given a monic polynomial family with period-1 coefficients, the roots
at consecutive parameter values are joined by minimum-cost assignment
on squared distances.  Steps whose worst matched jump is large compared
with the local root separation are bisected; once a cluster of roots
falls below the separation floor, plain values no longer identify the
strands and the matching falls back to jets (value plus derivative
estimates from implicit differentiation), projected to scalars through
a fixed random direction.  The permutation closing the loop is the
computable shadow of the braid the root system traces out: the family
splits into period-1 root curves exactly when that permutation is the
identity.

Ambiguity is a first-class outcome: a step that cannot be resolved at
full refinement depth raises ``AmbiguousCrossing`` instead of guessing,
so an identity answer is never manufactured.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.optimize import linear_sum_assignment

from .poly import ComplexPoly, discriminant, poly_roots

__all__ = [
    "TrackedPaths", "MonodromyResult", "DiscriminantProfile",
    "AmbiguousCrossing", "track_roots", "monodromy_permutation",
    "jet_tiebreak", "fourier_closure_residual", "discriminant_profile",
]

GAP_FLOOR = 1e-6
JET_STEP = 1e-4


class AmbiguousCrossing(RuntimeError):
    """Root matching stayed ambiguous at full refinement depth."""
    code = "AMBIGUOUS_CROSSING"

    def __init__(self, message, s_interval=None):
        super().__init__(message)
        self.s_interval = s_interval


@dataclass
class TrackedPaths:
    """Continuously matched root paths over a refined parameter grid."""
    s_grid: np.ndarray
    paths: np.ndarray          # shape (n, len(s_grid))
    min_gap: float
    refinements: int
    jet_order_used: int
    initial_grid: int

    @property
    def degree(self) -> int:
        return self.paths.shape[0]


@dataclass
class MonodromyResult:
    permutation: tuple
    is_pure: bool
    min_discriminant: float
    near_degeneracies: list
    jet_order_used: int
    closure_residual: float

    def to_json(self):
        return {
            "permutation": list(self.permutation),
            "is_pure": self.is_pure,
            "min_discriminant": self.min_discriminant,
            "near_degeneracies": [[float(s), int(k)]
                                  for s, k in self.near_degeneracies],
            "jet_order_used": self.jet_order_used,
            "closure_residual": self.closure_residual,
        }


@dataclass
class DiscriminantProfile:
    min_abs: float
    argmin_s: float
    multiplicity_bound: int
    near_zeros: list


def _min_gap(roots: np.ndarray) -> float:
    if roots.size < 2:
        return np.inf
    d = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _assign(left: np.ndarray, right: np.ndarray):
    cost = np.abs(left[:, None] - right[None, :]) ** 2
    _, cols = linear_sum_assignment(cost)
    return cols


def _coeffs_of(p) -> np.ndarray:
    return p.coeffs if isinstance(p, ComplexPoly) else np.asarray(p, complex)


def _jets(p_eval, s: float, roots: np.ndarray, order: int,
          h: float = JET_STEP) -> np.ndarray:
    """Jet vectors (root, root', [root'']) via implicit differentiation.

    The parameter derivatives of the coefficients come from centered
    differences; the z-derivatives are exact.  Near-degenerate roots
    keep distinct jets as long as their separation stays well above the
    square root of machine precision.
    """
    c0 = _coeffs_of(p_eval(s))
    cp = _coeffs_of(p_eval(s + h))
    cm = _coeffs_of(p_eval(s - h))
    ds = (cp - cm) / (2.0 * h)
    dz = npoly.polyder(c0)
    out = np.empty((roots.size, order + 1), dtype=complex)
    out[:, 0] = roots
    pz = npoly.polyval(roots, dz)
    ps = npoly.polyval(roots, ds)
    lam1 = -ps / pz
    out[:, 1] = lam1
    if order >= 2:
        dss = (cp - 2.0 * c0 + cm) / (h * h)
        dzz = npoly.polyder(dz)
        dsz = npoly.polyder(ds)
        pss = npoly.polyval(roots, dss)
        psz = npoly.polyval(roots, dsz)
        pzz = npoly.polyval(roots, dzz)
        out[:, 2] = -(pss + 2.0 * psz * lam1 + pzz * lam1 * lam1) / pz
    return out


def jet_tiebreak(left: np.ndarray, right: np.ndarray, v: np.ndarray):
    """Match two jet families through their projections onto ``v``.

    Each jet is reduced to the Hermitian product <v, jet>; for almost
    every direction distinct jets stay distinct under this projection.
    Returns ``(assignment, separation)`` where the separation is the
    smallest pairwise distance among the projected left jets: callers
    treat a separation at rounding scale as still ambiguous.
    """
    k = left.shape[1]
    pv = v[:k]
    a = left @ pv.conj()
    b = right @ pv.conj()
    cols = _assign(a, b)
    sep = _min_gap(a)
    return cols, sep


def track_roots(p_eval, initial_grid: int = 256,
                gap_floor: float = GAP_FLOOR, max_depth: int = 20,
                projection_seed: int = 7) -> TrackedPaths:
    """Follow all roots of ``p_eval(s)`` continuously from s=0 to s=1.

    ``p_eval`` must return the monic :class:`ComplexPoly` (or its
    ascending coefficients) of a fixed degree, with period-1
    coefficients; closure is checked up front.  Matching is by
    minimum-cost assignment, refined by bisection wherever the motion
    per step is not small against the local root separation, with jet
    projections taking over below ``gap_floor``.
    """
    if initial_grid < 2:
        raise ValueError("initial_grid must be at least 2")
    c_start = _coeffs_of(p_eval(0.0))
    c_end = _coeffs_of(p_eval(1.0))
    if c_start.shape != c_end.shape or \
            np.max(np.abs(c_start - c_end)) > 1e-10 * max(1.0, np.max(np.abs(c_start))):
        raise ValueError("coefficients do not close up over one period")
    n = c_start.size - 1
    if n < 1:
        raise ValueError("degree must be at least 1")

    rng = np.random.default_rng(projection_seed)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    v /= np.linalg.norm(v)

    def roots_at(s: float) -> np.ndarray:
        return poly_roots(_coeffs_of(p_eval(s)))

    state = {"min_gap": np.inf, "refinements": 0, "jet_order": 0}

    def match_step(s0, r0, s1, r1, depth):
        """Align r1 to r0; returns the aligned r1 and intermediate
        samples collected during refinement."""
        gap = min(_min_gap(r0), _min_gap(r1))
        state["min_gap"] = min(state["min_gap"], gap)
        cols = _assign(r0, r1)
        worst = float(np.max(np.abs(r0 - r1[cols])))
        if gap < gap_floor:
            rscale = 1.0 + max(float(np.max(np.abs(r0))),
                               float(np.max(np.abs(r1))))
            if gap < 2e-7 * rscale:
                # a genuine multiple root at a sample point: implicit
                # derivatives are 0/0 there and nothing can tell the
                # strands apart from local data
                raise AmbiguousCrossing(
                    f"roots numerically coincident (gap {gap:.2e}) near "
                    f"s in [{s0:.8f}, {s1:.8f}]", (s0, s1))
            # plain values cannot identify strands this close together
            for order in (1, 2):
                j0 = _jets(p_eval, s0, r0, order)
                j1 = _jets(p_eval, s1, r1, order)
                jcols, sep = jet_tiebreak(j0, j1, v)
                state["jet_order"] = max(state["jet_order"], order)
                if sep > 1e-8 * (1.0 + float(np.max(np.abs(j0)))):
                    return r1[jcols], []
            raise AmbiguousCrossing(
                f"roots separated by {gap:.2e} with matching jets "
                f"near s in [{s0:.8f}, {s1:.8f}]", (s0, s1))
        if worst <= 0.5 * gap:
            return r1[cols], []
        if depth >= max_depth:
            raise AmbiguousCrossing(
                f"motion {worst:.2e} never fell below half the root gap "
                f"{gap:.2e} at depth {depth} on [{s0:.8f}, {s1:.8f}]",
                (s0, s1))
        state["refinements"] += 1
        sm = 0.5 * (s0 + s1)
        rm = roots_at(sm)
        rm_aligned, inner_left = match_step(s0, r0, sm, rm, depth + 1)
        r1_aligned, inner_right = match_step(sm, rm_aligned, s1, r1, depth + 1)
        samples = inner_left + [(sm, rm_aligned)] + inner_right
        return r1_aligned, samples

    base = np.linspace(0.0, 1.0, initial_grid + 1)
    grid_s = [0.0]
    r_prev = roots_at(0.0)
    path_cols = [r_prev]
    for k in range(initial_grid):
        s0, s1 = base[k], base[k + 1]
        r_next = roots_at(s1)
        aligned, inner = match_step(s0, r_prev, s1, r_next, 0)
        for sm, rm in inner:
            grid_s.append(sm)
            path_cols.append(rm)
        grid_s.append(s1)
        path_cols.append(aligned)
        r_prev = aligned

    return TrackedPaths(
        s_grid=np.asarray(grid_s),
        paths=np.asarray(path_cols).T.copy(),
        min_gap=state["min_gap"],
        refinements=state["refinements"],
        jet_order_used=state["jet_order"],
        initial_grid=initial_grid,
    )


def fourier_closure_residual(tp: TrackedPaths) -> float:
    """Smoothness check of the closed paths via trigonometric interpolation.

    Takes the path values on the even-index points of the uniform base
    grid, builds the trigonometric interpolant, and compares it against
    the actual values at the odd-index points.  Analytic closed curves
    leave an exponentially small residual; kinked gluings do not.
    """
    k = tp.initial_grid
    if k % 2 == 1:
        k -= 1
    base = np.linspace(0.0, 1.0, tp.initial_grid + 1)[:k]
    idx = np.searchsorted(tp.s_grid, base)
    vals = tp.paths[:, idx]
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    worst = 0.0
    half = k // 2
    for row in vals:
        even = row[0::2]
        hat = np.fft.fft(even) / half
        freqs = np.fft.fftfreq(half, d=1.0 / half)
        odd_s = base[1::2]
        rec = np.zeros(half, dtype=complex)
        for c, f in zip(hat, freqs):
            rec += c * np.exp(2j * np.pi * f * odd_s)
        worst = max(worst, float(np.max(np.abs(rec - row[1::2]))) / scale)
    return worst


def monodromy_permutation(tp: TrackedPaths, p_eval=None,
                          near_tol: float = 1e-2) -> MonodromyResult:
    """Permutation induced by transporting the roots once around the loop.

    Path ``i`` ends on the starting value of path ``permutation[i]``.
    When ``p_eval`` is given, the discriminant profile over the tracked
    grid is recorded along with clusters of nearly colliding roots.
    """
    start = tp.paths[:, 0]
    end = tp.paths[:, -1]
    scale = max(float(np.max(np.abs(start))), 1e-300)
    cols = _assign(end, start)
    resid = float(np.max(np.abs(end - start[cols])))
    if resid > 1e-8 * scale + 1e-8:
        raise ValueError(
            f"paths do not close onto the starting roots (residual {resid:.2e})")
    perm = tuple(int(c) for c in cols)
    is_pure = perm == tuple(range(len(perm)))

    min_disc = np.inf
    near = []
    if p_eval is not None:
        for k, s in enumerate(tp.s_grid):
            d = abs(discriminant(_coeffs_of(p_eval(float(s)))))
            min_disc = min(min_disc, d)
            roots = tp.paths[:, k]
            g = _min_gap(roots)
            if g < near_tol:
                near.append((float(s), _cluster_size(roots, g)))
    closure = fourier_closure_residual(tp) if is_pure else np.inf
    return MonodromyResult(perm, is_pure,
                           float(min_disc) if p_eval is not None else np.nan,
                           _dedupe_near(near), tp.jet_order_used,
                           float(closure))


def _cluster_size(roots: np.ndarray, gap: float) -> int:
    """Size of the largest root cluster at linkage threshold 3*gap."""
    thr = 3.0 * max(gap, 1e-15)
    n = roots.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= thr:
                parent[find(i)] = find(j)
    sizes = {}
    for i in range(n):
        sizes[find(i)] = sizes.get(find(i), 0) + 1
    return max(sizes.values())


def _dedupe_near(near: list) -> list:
    """Collapse runs of adjacent grid points into one event per dip."""
    out = []
    for s, k in near:
        if out and abs(s - out[-1][0]) < 1e-2:
            if k > out[-1][1]:
                out[-1] = (out[-1][0], k)
        else:
            out.append((s, k))
    return out


def discriminant_profile(p_eval, grid: int = 512,
                         near_tol: float = 1e-2) -> DiscriminantProfile:
    """Discriminant magnitude along the family and estimated root
    multiplicities at its near-zeros."""
    ss = np.linspace(0.0, 1.0, grid, endpoint=False)
    best = (np.inf, 0.0)
    near = []
    for s in ss:
        coeffs = _coeffs_of(p_eval(float(s)))
        d = abs(discriminant(coeffs))
        if d < best[0]:
            best = (d, float(s))
        roots = poly_roots(coeffs)
        g = _min_gap(roots)
        if g < near_tol:
            near.append((float(s), _cluster_size(roots, g)))
    near = _dedupe_near(near)
    bound = max((k for _, k in near), default=1)
    return DiscriminantProfile(float(best[0]), best[1], bound, near)
