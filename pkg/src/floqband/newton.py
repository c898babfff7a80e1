"""Newton polygon, Puiseux branches, and cluster factorization.

The polygon of a monic polynomial with germ coefficients is the lower
convex hull of the points (coefficient index, vanishing order); its
segment slopes are exactly the negated leading exponents of the root
branches.  Branch expansions follow the classical Newton iteration:
solve the characteristic equation attached to a segment for the leading
coefficients, shift, repeat.  Exponent arithmetic is exact (fractions),
because float exponents corrupt ramification detection.

Cluster factorization splits a monic polynomial, given as an evaluation
callback over (t, z), into factors whose t=0 specializations are powers
of distinct linear terms.  Each factor is recovered from power sums of
its roots, computed by trapezoid quadrature of the logarithmic
derivative on a circle enclosing exactly one root cluster; the circle
radius is one third of the minimal distance between distinct roots at
t=0, which keeps the contours pairwise disjoint and root-free.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import numpy.polynomial.polynomial as npoly

from .poly import ComplexPoly, SeriesPoly, poly_roots, series_poly_discriminant
from .series import DEFAULT_REL_TOL, TruncatedSeries

__all__ = [
    "NewtonPolygonData", "PolygonSegment", "PuiseuxBranch",
    "HenselCluster", "HenselFactorization",
    "newton_polygon", "puiseux_branches", "quadratic_cr_classify",
    "conjugacy_check", "hensel_split",
    "NewtonError", "ZFactorRequired", "DegenerateDiscriminant",
    "ContourBreach", "QuadratureFailure",
]


class NewtonError(Exception):
    """Base class; ``code`` is the machine-readable failure tag."""
    code = "NEWTON_ERROR"


class ZFactorRequired(NewtonError):
    """Constant-term germ is zero: strip the z power before calling."""
    code = "Z_FACTOR_REQUIRED"


class DegenerateDiscriminant(NewtonError):
    """Discriminant germ is numerically zero (double series root)."""
    code = "DEGENERATE"


class ContourBreach(NewtonError):
    """A root path crossed the integration contour (delta too large)."""
    code = "CONTOUR_BREACH"


class QuadratureFailure(NewtonError):
    """Factor reconstruction residual exceeded tolerance."""
    code = "QUADRATURE_FAILURE"


# ----------------------------------------------------------------------
# Newton polygon
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PolygonSegment:
    length: int
    slope: Fraction

    def to_json(self):
        return {"length": self.length,
                "slope": [self.slope.numerator, self.slope.denominator],
                "slope_float": float(self.slope)}


@dataclass(frozen=True)
class NewtonPolygonData:
    points: tuple
    vertices: tuple
    segments: tuple

    def to_json(self):
        def pt(p):
            x, y = p
            return [int(x), [y.numerator, y.denominator]
                    if isinstance(y, Fraction) else int(y)]
        return {"points": [pt(p) for p in self.points],
                "hull": [pt(p) for p in self.vertices],
                "segments": [s.to_json() for s in self.segments]}


def _lower_hull(points):
    """Lower convex hull, left to right; collinear interior points drop."""
    pts = sorted(points)
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def newton_polygon(q: SeriesPoly, rel_tol: float = DEFAULT_REL_TOL
                   ) -> NewtonPolygonData:
    """Polygon of a monic series polynomial.

    Coefficient vanishing orders are judged against the largest
    coefficient magnitude of the whole polynomial, so that germs that
    are pure cancellation noise count as zero.
    """
    if not q.monic:
        raise ValueError("newton_polygon requires a monic polynomial")
    scale = max(float(np.max(np.abs(c.coeffs))) for c in q.coeffs)
    if scale == 0.0:
        raise ZFactorRequired("all coefficients vanish")
    points = []
    for j, c in enumerate(q.coeffs):
        mags = np.abs(c.coeffs)
        above = np.nonzero(mags > rel_tol * scale)[0]
        if above.size:
            points.append((j, int(above[0])))
    if not points or points[0][0] != 0:
        raise ZFactorRequired(
            "constant-term germ is numerically zero; divide out the z power")
    hull = _lower_hull(points)
    segs = tuple(PolygonSegment(int(x1 - x0), Fraction(y1 - y0, x1 - x0))
                 for (x0, y0), (x1, y1) in zip(hull, hull[1:]))
    return NewtonPolygonData(tuple(points), tuple(hull), segs)


# ----------------------------------------------------------------------
# Puiseux branches
# ----------------------------------------------------------------------

@dataclass
class PuiseuxBranch:
    """Root expansion in fractional powers of (t - base point)."""
    ramification: int
    terms: list          # [(Fraction exponent, complex coefficient), ...]
    depth: int
    multiplicity: int = 1
    unresolved: bool = False

    def __call__(self, t) -> complex:
        """Evaluate the truncated expansion at real t >= 0 (principal
        fractional powers)."""
        return sum(c * complex(t) ** float(e) for e, c in self.terms)

    def to_json(self):
        return {
            "ramification": self.ramification,
            "multiplicity": self.multiplicity,
            "unresolved": self.unresolved,
            "terms": [{"exponent": [e.numerator, e.denominator],
                       "coefficient": [c.real, c.imag]}
                      for e, c in self.terms],
        }


def _frac_coeffs(q: SeriesPoly):
    """SeriesPoly coefficients as sparse exponent->value dicts."""
    out = []
    for c in q.coeffs:
        out.append({Fraction(k): complex(v) for k, v in enumerate(c.coeffs)
                    if v != 0})
    return out


def _fp_scale(fp) -> float:
    vals = [abs(v) for d in fp for v in d.values()]
    return max(vals) if vals else 0.0


def _fp_points(fp, floor: float):
    pts = []
    for j, d in enumerate(fp):
        live = [e for e, v in d.items() if abs(v) > floor]
        if live:
            pts.append((j, min(live)))
    return pts


def _cluster_values(values, tol: float):
    """Group near-equal complex values; returns (center, count) pairs."""
    order = sorted(range(len(values)), key=lambda i: (values[i].real,
                                                      values[i].imag))
    groups = []
    for i in order:
        v = values[i]
        for g in groups:
            if abs(v - g[0] / g[1]) <= tol:
                g[0] += v
                g[1] += 1
                break
        else:
            groups.append([v, 1])
    return [(g[0] / g[1], g[1]) for g in groups]


def _puiseux_recurse(fp, exp_cap: Fraction, depth_left: int,
                     rel_tol: float, negative_only: bool):
    """Branches of a z-polynomial with fractional-series coefficients.

    Returns a list of (terms, multiplicity, unresolved, levels) tuples;
    exponents are absolute in t.  Only strictly vanishing roots
    (negative polygon slopes) are followed when ``negative_only`` is
    set, which is the invariant maintained by the shift substitution.
    """
    scale = _fp_scale(fp)
    if scale == 0.0:
        return []
    floor = rel_tol * scale
    # exact zero roots of the current polynomial terminate their branch
    lead = 0
    while lead < len(fp) and not any(abs(v) > floor for v in fp[lead].values()):
        lead += 1
    out = []
    if lead > 0:
        out.append(([], lead, False, 0))
        fp = fp[lead:]
    if len(fp) <= 1:
        return out
    pts = _fp_points(fp, floor)
    hull = _lower_hull(pts)
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slope = (Fraction(y1) - Fraction(y0)) / (x1 - x0)
        if negative_only and slope >= 0:
            continue
        gamma = -slope
        # characteristic equation from the lattice points on this segment
        char = np.zeros(x1 - x0 + 1, dtype=complex)
        for i in range(x0, x1 + 1):
            e = Fraction(y0) + slope * (i - x0)
            v = fp[i].get(e)
            if v is not None:
                char[i - x0] = v
        roots = npoly.polyroots(char)
        croots = _cluster_values(list(roots),
                                 1e-6 * max(1.0, float(np.max(np.abs(roots)))))
        for c, mult in croots:
            if abs(c) <= 1e-12:
                continue  # spurious zero from numerics; zero roots were stripped
            if depth_left <= 1:
                out.append(([(gamma, c)], mult, mult > 1, 1))
                continue
            shifted = _shift_substitute(fp, gamma, c, exp_cap)
            subs = _puiseux_recurse(shifted, exp_cap, depth_left - 1,
                                    rel_tol, True)
            found = 0
            for terms, m2, unres, lev in subs:
                tail = [(gamma + e, v) for e, v in terms]
                out.append(([(gamma, c)] + tail, m2, unres, lev + 1))
                found += m2
            if found < mult:
                # continuation invisible at this truncation order
                out.append(([(gamma, c)], mult - found, False, 1))
    return out


def _shift_substitute(fp, gamma: Fraction, c: complex, exp_cap: Fraction):
    """Coefficients of Q(t, t**gamma * (c + z)) / t**L with L the polygon
    value of the segment, dropping exponents beyond the cap."""
    m = len(fp) - 1
    # r_k(t) = sum_{i>=k} C(i,k) c^(i-k) q_i(t) t^(gamma i), then shift by -L
    shifted = [dict() for _ in range(m + 1)]
    for i, d in enumerate(fp):
        if not d:
            continue
        for k in range(i + 1):
            w = math.comb(i, k) * c ** (i - k)
            if w == 0:
                continue
            tgt = shifted[k]
            off = gamma * i
            for e, v in d.items():
                tgt[e + off] = tgt.get(e + off, 0j) + w * v
    # normalize: subtract the minimal exponent of the constant coefficient
    # block, i.e. the segment value L = min over k of the vanishing order
    scale = _fp_scale(shifted)
    if scale == 0.0:
        return [dict() for _ in range(m + 1)]
    floor = 1e-14 * scale
    mins = [min((e for e, v in d.items() if abs(v) > floor), default=None)
            for d in shifted]
    lmin = min((e for e in mins if e is not None))
    out = []
    for d in shifted:
        out.append({e - lmin: v for e, v in d.items()
                    if abs(v) > floor and e - lmin <= exp_cap})
    return out


def puiseux_branches(q: SeriesPoly, depth: int = 6,
                     rel_tol: float = DEFAULT_REL_TOL) -> list[PuiseuxBranch]:
    """All root branches of a monic series polynomial.

    Each branch carries up to ``depth`` fractional-power terms; branch
    count with multiplicity equals the degree.  A branch whose leading
    coefficient could not be separated within the allowed depth is
    flagged unresolved rather than dropped.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not q.monic:
        raise ValueError("puiseux_branches requires a monic polynomial")
    newton_polygon(q, rel_tol)  # validates the nonzero constant germ
    fp = _frac_coeffs(q)
    cap = Fraction(q.order)
    raw = _puiseux_recurse(fp, cap, depth, rel_tol, False)
    branches = []
    for terms, mult, unres, levels in raw:
        denoms = [e.denominator for e, _ in terms] or [1]
        ram = math.lcm(*denoms)
        branches.append(PuiseuxBranch(ramification=ram, terms=terms,
                                      depth=levels, multiplicity=mult,
                                      unresolved=unres))
    branches.sort(key=lambda b: (float(b.terms[0][0]) if b.terms else math.inf,
                                 b.terms[0][1].real if b.terms else 0.0,
                                 b.terms[0][1].imag if b.terms else 0.0))
    return branches


def quadratic_cr_classify(q: SeriesPoly,
                          rel_tol: float = DEFAULT_REL_TOL) -> str:
    """Parity test for a monic quadratic with germ coefficients.

    The polynomial splits over the germ algebra exactly when the
    discriminant's vanishing order is even (its square root is then a
    single-valued germ); odd order means the two roots are exchanged by
    the double cover and the polynomial is irreducible.
    """
    if q.degree != 2:
        raise ValueError("classifier is for degree-2 polynomials")
    k = series_poly_discriminant(q, rel_tol).ord(rel_tol)
    if math.isinf(k):
        raise DegenerateDiscriminant(
            "discriminant germ vanishes to all orders; the polynomial is a "
            "perfect square at this truncation")
    return "CR" if int(k) % 2 == 0 else "IRREDUCIBLE"


def conjugacy_check(branches: list[PuiseuxBranch], m: int,
                    tol: float = 1e-8) -> bool:
    """Do the branches form one orbit under rotating t**(1/m)?

    Writes every branch as a series in the uniformizer u = t**(1/m) and
    tests whether the given family coincides (as a multiset, within
    ``tol``) with the m rotations u -> exp(2*pi*i*j/m) u of the last
    branch.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if not branches:
        return False
    if len(branches) != m:
        return False
    if m == 1:
        return True

    def as_uniformizer(b: PuiseuxBranch):
        out = {}
        for e, c in b.terms:
            k = e * m
            if k.denominator != 1:
                return None  # exponent not representable over t**(1/m)
            out[int(k)] = c
        return out

    series = [as_uniformizer(b) for b in branches]
    if any(s is None for s in series):
        return False
    ref = series[-1]
    rotations = []
    for j in range(1, m + 1):
        rotations.append({k: c * cmath.exp(2j * cmath.pi * j * k / m)
                          for k, c in ref.items()})

    def close(a, b):
        keys = set(a) | set(b)
        return all(abs(a.get(k, 0j) - b.get(k, 0j)) <= tol for k in keys)

    used = [False] * m
    for s in series:
        for i, rot in enumerate(rotations):
            if not used[i] and close(s, rot):
                used[i] = True
                break
        else:
            return False
    return True


# ----------------------------------------------------------------------
# cluster (Hensel-type) factorization by contour integrals
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HenselCluster:
    center: complex
    multiplicity: int
    radius: float
    delta: float


@dataclass
class HenselFactorization:
    clusters: list
    sample_ts: np.ndarray
    factors: list          # factors[i_t][i_cluster] -> ComplexPoly
    max_residual: float

    def to_json(self):
        return {
            "clusters": [{"center": [c.center.real, c.center.imag],
                          "multiplicity": c.multiplicity,
                          "radius": c.radius, "delta": c.delta}
                         for c in self.clusters],
            "sample_ts": [float(t) for t in self.sample_ts],
            "factors": [[f.to_json() for f in row] for row in self.factors],
            "max_residual": self.max_residual,
        }


def _interp_poly(q_eval, t: float, degree: int) -> np.ndarray:
    """Coefficients of z -> q_eval(t, z) from values at roots of unity."""
    n = degree + 1
    nodes = np.exp(2j * np.pi * np.arange(n) / n)
    vals = np.array([q_eval(t, z) for z in nodes], dtype=complex)
    return np.fft.fft(vals) / n  # fft computes sum v_k w^(-jk), j ascending


def _single_linkage(roots: np.ndarray, threshold: float):
    """Indices grouped so that chains of gaps <= threshold merge."""
    n = roots.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= threshold:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def hensel_split(q_eval, degree: int, delta_max: float = 0.25,
                 n_contour: int = 256, n_tsamples: int = 9
                 ) -> HenselFactorization:
    """Split a monic polynomial family into point-primary factors.

    ``q_eval(t, z)`` must evaluate a polynomial of the given degree in z
    that is monic for every t near 0.  Roots of the t=0 slice are
    clustered; each cluster gets a circular contour of radius one third
    of the minimal center separation and a safe parameter half-width
    found by halving ``delta_max`` until the contour stays root-free.
    Per sample t, the factor attached to a cluster is rebuilt from the
    power sums of the roots enclosed by its contour.
    """
    if n_contour < 64:
        raise ValueError("need at least 64 contour nodes")
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if n_tsamples < 1:
        raise ValueError("n_tsamples must be >= 1")

    coeffs0 = _interp_poly(q_eval, 0.0, degree)
    roots0 = poly_roots(ComplexPoly(coeffs0))
    rscale = 1.0 + float(np.max(np.abs(roots0)))

    # multiplicity-split roots first merge at a scale well above roundoff
    groups = _single_linkage(roots0, 1e-5 * rscale)
    centers = np.array([np.mean(roots0[g]) for g in groups])
    if len(groups) > 1:
        sep = min(abs(a - b) for i, a in enumerate(centers)
                  for b in centers[:i])
        radius = sep / 3.0
        # re-cluster at the contract threshold r/2 and recompute
        groups = _single_linkage(roots0, radius / 2.0)
        centers = np.array([np.mean(roots0[g]) for g in groups])
        sep = min(abs(a - b) for i, a in enumerate(centers)
                  for b in centers[:i]) if len(groups) > 1 else math.inf
        radius = sep / 3.0

    order = np.lexsort((centers.imag, centers.real))
    groups = [groups[i] for i in order]
    centers = centers[order]
    mults = [len(g) for g in groups]

    if len(groups) == 1:
        # trivial factorization: the polynomial is its own primary factor
        cluster = HenselCluster(complex(centers[0]), degree, math.inf,
                                float(delta_max))
        ts = np.linspace(-delta_max / 2, delta_max / 2, n_tsamples)
        factors = [[ComplexPoly(_interp_poly(q_eval, float(t), degree))]
                   for t in ts]
        return HenselFactorization([cluster], ts, factors, 0.0)

    phis = 2.0 * np.pi * np.arange(n_contour) / n_contour
    unit = np.exp(1j * phis)

    # Shrink each cluster's parameter window until its roots provably keep
    # clear of the contour: a discrete |Q|-on-contour probe alone can miss
    # a root darting across between probe points, so we require the roots
    # that start inside to stay within 3/4 of the contour radius and the
    # inside count to stay equal to the multiplicity at every probe point.
    deltas = []
    for mu, mult in zip(centers, mults):
        contour = mu + radius * unit
        scale = max(1.0, float(np.max(np.abs(
            npoly.polyval(contour, coeffs0)))))
        delta = float(delta_max)
        while True:
            ok = True
            for t in np.linspace(-delta, delta, 64):
                ct = _interp_poly(q_eval, float(t), degree)
                rts = npoly.polyroots(ct)
                dist = np.abs(rts - mu)
                inside = dist < radius
                if int(np.sum(inside)) != mult or \
                        np.any(inside & (dist > 0.75 * radius)) or \
                        np.min(np.abs(npoly.polyval(contour, ct))) <= 1e-6 * scale:
                    ok = False
                    break
            if ok:
                break
            delta /= 2.0
            if delta < 1e-9:
                raise ContourBreach(
                    f"no root-free parameter window around cluster {mu}")
        deltas.append(delta)

    clusters = [HenselCluster(complex(mu), m, float(radius), d)
                for mu, m, d in zip(centers, mults, deltas)]
    delta = min(deltas)
    ts = np.linspace(-delta / 2, delta / 2, n_tsamples)

    factors = []
    max_residual = 0.0
    for t in ts:
        ct = _interp_poly(q_eval, float(t), degree)
        dct = npoly.polyder(ct)
        row = []
        for cl in clusters:
            w = cl.center + cl.radius * unit
            logd = npoly.polyval(w, dct) / npoly.polyval(w, ct)
            # (1/2 pi i) * integral of w^s * logd dw, trapezoid on the circle
            base = logd * (w - cl.center) / n_contour
            p0 = np.sum(base)
            if abs(p0 - round(p0.real)) > 0.1 or round(p0.real) != cl.multiplicity:
                raise ContourBreach(
                    f"root count on contour of {cl.center} came out {p0:.3f}, "
                    f"expected {cl.multiplicity}; delta too large")
            psums = [float(cl.multiplicity)]
            for s in range(1, cl.multiplicity + 1):
                psums.append(np.sum(base * w ** s))
            # Newton identities: elementary symmetric from power sums
            elem = [1.0 + 0j]
            for k in range(1, cl.multiplicity + 1):
                acc = 0j
                for i in range(1, k + 1):
                    acc += (-1) ** (i - 1) * elem[k - i] * psums[i]
                elem.append(acc / k)
            fac = np.array([(-1) ** k * elem[k]
                            for k in range(cl.multiplicity, -1, -1)],
                           dtype=complex)
            row.append(ComplexPoly(fac))
        prod = row[0].coeffs
        for f in row[1:]:
            prod = npoly.polymul(prod, f.coeffs)
        residual = float(np.max(np.abs(prod - ct)))
        max_residual = max(max_residual, residual)
        if residual > 1e-6:
            raise QuadratureFailure(
                f"factor product misses the polynomial by {residual:.2e} "
                f"at t={t:.4g}")
        factors.append(row)
    return HenselFactorization(clusters, ts, factors, max_residual)
