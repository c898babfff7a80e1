"""Band spectra of matrix families: assembly, measure, distances, sweeps.

The spectrum of a fiberwise operator is the union over the Bloch
parameter of the pointwise eigenvalue sets: real eigenvalues on the
line for the Hermitian Harper family, eigenphases on the circle for the
unitary families.  Finite grids turn that union into a sample cloud;
bands are the maximal runs of samples with no gap larger than a
threshold, applied cyclically in the circle case.  Hausdorff distances
between band unions are evaluated exactly from interval endpoints and
gap midpoints, which are the only candidates where the point-to-set
distance can peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .floquet import OperatorFamily
from ._parallel import parallel_map

__all__ = [
    "SpectrumBands", "eigen_phases", "band_count", "spectrum_union",
    "hausdorff_distance", "band_measure", "butterfly_sweep", "farey_fractions",
    "default_gap_tol",
]

LINE = "line"
CIRCLE = "circle"


@dataclass
class SpectrumBands:
    """Disjoint closed intervals assembled from eigenvalue samples.

    Circle intervals live in phase coordinates [0, 1); at most one of
    them may wrap, encoded as lo > hi meaning [lo, 1) joined with
    [0, hi].  The raw sorted samples are kept for refinement checks.
    """
    space: str
    intervals: list
    samples: np.ndarray

    def __post_init__(self):
        if self.space not in (LINE, CIRCLE):
            raise ValueError(f"space must be {LINE!r} or {CIRCLE!r}")

    @property
    def count(self) -> int:
        return len(self.intervals)

    def to_json(self, with_samples: bool = False) -> dict:
        out = {"space": self.space,
               "intervals": [[float(a), float(b)] for a, b in self.intervals]}
        if with_samples:
            out["samples"] = [float(x) for x in self.samples]
        return out


def eigen_phases(m, tol: float = 1e-8) -> np.ndarray:
    """Sorted eigenphases of a unitary matrix, as fractions of a turn."""
    mat = getattr(m, "matrix", m)
    mat = np.asarray(mat, dtype=complex)
    resid = np.max(np.abs(mat @ mat.conj().T - np.eye(mat.shape[0])))
    if resid > tol:
        raise ValueError(f"matrix is not unitary (residual {resid:.2e})")
    lam = np.linalg.eigvals(mat)
    if np.any(np.abs(np.abs(lam) - 1.0) > tol):
        raise ValueError("eigenvalues stray from the unit circle")
    return np.sort(np.mod(np.angle(lam) / (2.0 * np.pi), 1.0))


def band_count(samples, gap_tol: float, space: str = LINE):
    """Split sorted samples into bands at gaps larger than ``gap_tol``.

    Returns ``(SpectrumBands, count)``.  On the circle the gap rule is
    applied cyclically, so a band may wrap through phase 0.
    """
    if gap_tol <= 0:
        raise ValueError("gap_tol must be positive")
    xs = np.sort(np.asarray(samples, dtype=float).ravel())
    if xs.size == 0:
        raise ValueError("no samples to assemble")
    if space == LINE:
        cut = np.nonzero(np.diff(xs) > gap_tol)[0]
        starts = np.concatenate(([0], cut + 1))
        ends = np.concatenate((cut, [xs.size - 1]))
        intervals = [(float(xs[a]), float(xs[b])) for a, b in zip(starts, ends)]
        bands = SpectrumBands(LINE, intervals, xs)
        return bands, len(intervals)
    if space != CIRCLE:
        raise ValueError(f"unknown space {space!r}")
    gaps = np.diff(xs)
    wrap_gap = xs[0] + 1.0 - xs[-1]
    if np.all(gaps <= gap_tol) and wrap_gap <= gap_tol:
        bands = SpectrumBands(CIRCLE, [(0.0, 1.0)], xs)
        return bands, 1
    cut = list(np.nonzero(gaps > gap_tol)[0])
    pieces = []
    starts = [0] + [c + 1 for c in cut]
    ends = cut + [xs.size - 1]
    for a, b in zip(starts, ends):
        pieces.append([float(xs[a]), float(xs[b])])
    if wrap_gap <= gap_tol and len(pieces) > 1:
        # last piece continues through 0 into the first one
        first = pieces.pop(0)
        pieces[-1][1] = first[1]
    intervals = [tuple(p) for p in sorted(pieces)]
    bands = SpectrumBands(CIRCLE, intervals, xs)
    return bands, len(intervals)


def default_gap_tol(span: float, q: int, grid_size: int) -> float:
    """Sampling-aware band gap threshold.

    Must exceed the spurious gaps left by finite sampling (a few times
    the expected eigenvalue spacing divided by the grid size) while
    staying below real spectral gaps; 1e-3 is the floor that makes the
    parity experiments stable at 512-point grids.
    """
    return max(1e-3, 4.0 * (span / max(q, 1)) / max(grid_size, 1))


def t_period(family: OperatorFamily) -> float:
    """Length of the t interval that already exhausts the spectrum.

    The double-kicked-rotor characteristic polynomial has coefficient
    period 1/q in t, so its spectrum over [0, 1/q) equals the spectrum
    over the full circle; the other families only repeat with period 1.
    """
    return 1.0 / family.q if family.kind == "ordkr" else 1.0


def _slice_motion(a: np.ndarray, b: np.ndarray, circle: bool) -> float:
    """Largest per-level eigenvalue move between two parameter samples.

    Sorted spectra are matched level by level; on the circle the two
    sorted lists are additionally aligned by the cyclic shift with the
    least total motion, so a band drifting through phase 0 does not
    masquerade as a jump.
    """
    if not circle:
        return float(np.max(np.abs(a - b)))
    best = math.inf
    for s in range(a.size):
        d = np.abs(np.roll(b, -s) - a)
        d = np.minimum(d, 1.0 - d)
        best = min(best, float(d.max()))
    return best


def spectrum_union(family: OperatorFamily, t_grid_size: int,
                   theta_grid_size: int | None = None,
                   gap_tol: float | None = None,
                   threads: int = 1,
                   full_circle: bool = False,
                   max_refine_depth: int = 12) -> SpectrumBands:
    """Union of pointwise spectra over a t grid (and optionally a theta
    grid over one flux period, for the mother-operator surrogate).

    The t grid covers one spectral period (``full_circle`` forces the
    whole circle) and refines itself: an interval where some eigenvalue
    level moves by more than half the gap tolerance is bisected, so the
    sample cloud is dense along every spectral curve and a gap reported
    by the band rule is a real gap, not a sampling hole.  When a theta
    grid is present, each theta slice staggers its t grid by a sub-step
    so the slices do not alias onto each other.
    """
    if t_grid_size < 64:
        raise ValueError("t grid must have at least 64 points")
    if theta_grid_size is not None and theta_grid_size < 1:
        raise ValueError("theta grid must have at least 1 point")
    q = family.q
    span_t = 1.0 if full_circle else t_period(family)
    if theta_grid_size is None:
        jobs = [(family.theta, 0.0)]
    else:
        jobs = [(family.theta + j / (theta_grid_size * q),
                 j / theta_grid_size)
                for j in range(theta_grid_size)]
    hermitian = family.hermitian
    space = LINE if hermitian else CIRCLE
    if gap_tol is None:
        span = 4.0 if hermitian else 1.0
        gap_tol = default_gap_tol(span, q, t_grid_size)
    refine_tol = 0.45 * gap_tol

    def eigs_of(fam, t: float) -> np.ndarray:
        m = fam.matrix(float(t)).matrix
        if hermitian:
            return np.linalg.eigvalsh(m)
        lam = np.linalg.eigvals(m)
        return np.sort(np.mod(np.angle(lam) / (2.0 * np.pi), 1.0))

    def slice_samples(job):
        theta, stagger = job
        fam = OperatorFamily(family.kind, family.p, family.q, family.kappa,
                             family.lam, float(theta % 1.0))
        ts = (np.arange(t_grid_size) + stagger) / t_grid_size * span_t
        levels = [eigs_of(fam, t) for t in ts]
        out = list(levels)
        for i in range(t_grid_size):
            t1 = ts[(i + 1) % t_grid_size] if i + 1 < t_grid_size \
                else ts[0] + span_t
            stack = [(ts[i], levels[i], t1,
                      levels[(i + 1) % t_grid_size], 0)]
            while stack:
                t0, e0, t2, e2, depth = stack.pop()
                # depth 0 always splits: a band edge lying at the center
                # of an interval leaves equal spectra at both ends and
                # would hide from the motion test alone
                if depth >= max_refine_depth or \
                        (depth >= 1
                         and _slice_motion(e0, e2, not hermitian) <= refine_tol):
                    continue
                tm = 0.5 * (t0 + t2)
                em = eigs_of(fam, tm)
                out.append(em)
                stack.append((t0, e0, tm, em, depth + 1))
                stack.append((tm, em, t2, e2, depth + 1))
        return np.concatenate(out)

    blocks = parallel_map(slice_samples, jobs, threads)
    samples = np.sort(np.concatenate(blocks))
    bands, _ = band_count(samples, gap_tol, space)
    return bands


def band_measure(bands: SpectrumBands) -> float:
    """Total length of the band union (wrapping arcs handled mod 1)."""
    total = 0.0
    for lo, hi in bands.intervals:
        if bands.space == CIRCLE and lo > hi:
            total += (1.0 - lo) + hi
        else:
            total += hi - lo
    return total


# ----------------------------------------------------------------------
# Hausdorff distance between band unions
# ----------------------------------------------------------------------

def _unwrap(bands: SpectrumBands):
    """Intervals as plain [lo, hi] pieces; circle wrap split in two."""
    out = []
    for lo, hi in bands.intervals:
        if bands.space == CIRCLE and lo > hi:
            out.append((lo, 1.0))
            out.append((0.0, hi))
        else:
            out.append((lo, hi))
    return sorted(out)


def _point_dist(x: float, pieces, circle: bool) -> float:
    best = math.inf
    for lo, hi in pieces:
        if lo <= x <= hi:
            return 0.0
        for e in (lo, hi):
            d = abs(x - e)
            if circle:
                d = min(d, 1.0 - d)
            best = min(best, d)
    return best


def _directed(a_pieces, b_pieces, circle: bool) -> float:
    candidates = []
    for lo, hi in a_pieces:
        candidates.extend((lo, hi))
    # midpoints of the complement gaps of B are the other spots where the
    # distance to B can peak; keep the ones covered by A
    bs = sorted(b_pieces)
    mids = []
    for (l1, h1), (l2, h2) in zip(bs, bs[1:]):
        mids.append(0.5 * (h1 + l2))
    if circle and bs:
        wrap_mid = 0.5 * (bs[-1][1] + bs[0][0] + 1.0)
        mids.append(wrap_mid % 1.0)
    for m in mids:
        if any(lo <= m <= hi for lo, hi in a_pieces):
            candidates.append(m)
    return max(_point_dist(x, b_pieces, circle) for x in candidates)


def hausdorff_distance(a: SpectrumBands, b: SpectrumBands) -> float:
    """Two-sided sup-inf distance between band unions.

    Circle spectra use the arc metric min(|x-y|, 1-|x-y|); mixing a line
    spectrum with a circle spectrum is a usage error.
    """
    if a.space != b.space:
        raise ValueError("cannot compare spectra on different spaces")
    circle = a.space == CIRCLE
    pa, pb = _unwrap(a), _unwrap(b)
    if not pa or not pb:
        raise ValueError("empty band set")
    return max(_directed(pa, pb, circle), _directed(pb, pa, circle))


# ----------------------------------------------------------------------
# flux sweeps
# ----------------------------------------------------------------------

def farey_fractions(order: int):
    """All reduced fractions p/q in (0, 1) with q <= order, ascending."""
    fracs = []
    for q in range(1, order + 1):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                fracs.append((p, q))
    return sorted(fracs, key=lambda pq: pq[0] / pq[1])


def butterfly_sweep(alphas, kind: str, kappa: float = 1.0, lam: float = 1.0,
                    t_grid_size: int = 256, theta_grid_size: int | None = None,
                    gap_tol: float | None = None, q_max: int = 55,
                    threads: int = 1, warn=None):
    """Band spectra across a list of flux fractions.

    Returns rows of ``(p, q, SpectrumBands)``; fractions with q beyond
    ``q_max`` are skipped (reported through ``warn`` when given).
    """
    rows = []
    for p, q in alphas:
        if q > q_max:
            if warn is not None:
                warn(f"skipping alpha={p}/{q}: q exceeds limit {q_max}")
            continue
        fam = OperatorFamily(kind, p, q, kappa=kappa, lam=lam)
        bands = spectrum_union(fam, t_grid_size, theta_grid_size,
                               gap_tol=gap_tol, threads=threads)
        rows.append((p, q, bands))
    return rows
