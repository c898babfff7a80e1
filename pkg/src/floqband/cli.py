"""Command-line surface: plot-ready datasets and verification reports.

One binary with subcommands; all configuration is by flags so every run
is self-describing.  CSV floats are printed with 17 significant digits
so that re-runs are byte-comparable; the ``verify`` report contains no
timing or environment data for the same reason.  Exit codes: 0 success,
1 failed verification checks, 2 argument/validation errors, 3 numerical
failures (ambiguous crossings, contour breaches, quadrature failures).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import newton as nt
from .floquet import (KINDS, HalfAlphaError, OperatorFamily, char_poly_coeffs,
                      char_poly_samples, gauss_circulant, kick_diagonal)
from .monodromy import (AmbiguousCrossing, discriminant_profile,
                        monodromy_permutation, track_roots)
from .poly import ComplexPoly, SeriesPoly, discriminant, sylvester_resultant
from .series import TruncatedSeries, series_from_function
from .spectra import (band_count, band_measure, butterfly_sweep, eigen_phases,
                      farey_fractions, hausdorff_distance, spectrum_union)

FMT = "%.17g"


def _fmt(x: float) -> str:
    return FMT % float(x)


def _complex_json(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix_json(m: np.ndarray) -> list:
    return [[_complex_json(z) for z in row] for row in m]


def _write(args, text: str):
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _family(args) -> OperatorFamily:
    return OperatorFamily(args.kind, args.p, args.q, kappa=args.kappa,
                          lam=getattr(args, "lam", 1.0),
                          theta=getattr(args, "theta", 0.0))


def _family_flags(sub, kind_required=True):
    sub.add_argument("--kind", choices=KINDS,
                     required=kind_required, default=None if kind_required
                     else "ordkr")
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--q", type=int, required=True)
    sub.add_argument("--kappa", type=float, default=1.0)
    sub.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sub.add_argument("--theta", type=float, default=0.0)


def _out_flags(sub):
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--output", default="-")
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--seed", type=int, default=0)


def _parse_alphas(spec: str):
    if spec.startswith("farey:"):
        return farey_fractions(int(spec.split(":", 1)[1]))
    body = spec.split(":", 1)[1] if ":" in spec else spec
    out = []
    for frac in body.split(","):
        p_str, q_str = frac.strip().split("/")
        out.append((int(p_str), int(q_str)))
    return out


def _bands_csv(rows) -> str:
    lines = ["p,q,kind,lo,hi"]
    for p, q, kind, bands in rows:
        for lo, hi in bands.intervals:
            lines.append(f"{p},{q},{kind},{_fmt(lo)},{_fmt(hi)}")
    return "\n".join(lines) + "\n"


def _demo_series_poly(name: str, order: int = 16) -> SeriesPoly:
    one = TruncatedSeries.constant(1.0, order)
    zero = TruncatedSeries.zero(order)
    if name == "z2-t3":
        return SeriesPoly([TruncatedSeries.monomial(3, -1.0, order), zero, one])
    if name == "z2-sin2":
        s = series_from_function(lambda u: np.sin(2 * np.pi * u),
                                 0.0, order, radius=0.3)
        return SeriesPoly([-1.0 * (s * s), zero, one])
    if name == "z2-cos":
        c = series_from_function(lambda u: np.cos(2 * np.pi * u),
                                 0.0, order, radius=0.3)
        return SeriesPoly([-1.0 * c, zero, one])
    raise ValueError(f"unknown demo polynomial {name!r}")


def _load_series_poly(args) -> SeriesPoly:
    if args.demo:
        return _demo_series_poly(args.demo)
    if not args.poly_json:
        raise ValueError("need --poly-json or --demo")
    if args.poly_json == "-":
        data = json.load(sys.stdin)
    else:
        with open(args.poly_json) as fh:
            data = json.load(fh)
    return SeriesPoly.from_json(data)


DEMO_PRODUCTS = {
    "sqrt-pair": (lambda t, z: (z * z - t) * (z - 1 + t), 3),
    "triple": (lambda t, z: (z - 0.5) ** 3, 3),
    "two-clusters": (lambda t, z: ((z - 1.0) ** 2 - t ** 3) * (z + 2.0 - t), 3),
}


# ----------------------------------------------------------------------
# subcommand handlers
# ----------------------------------------------------------------------

def cmd_gauss_matrix(args) -> int:
    g = gauss_circulant(args.p, args.q, half_phase=args.half_phase)
    _write(args, json.dumps({"p": args.p, "q": args.q,
                             "half_phase": args.half_phase,
                             "matrix": _matrix_json(g)}, indent=1) + "\n")
    return 0


def cmd_operator(args) -> int:
    fam = _family(args)
    sample = fam.matrix(args.t)
    payload = {
        "kind": fam.kind, "p": fam.p, "q": fam.q, "kappa": fam.kappa,
        "lambda": fam.lam, "theta": fam.theta, "t": args.t,
        "matrix": _matrix_json(sample.matrix),
        "unitarity_residual": sample.unitarity_residual(),
        "hermiticity_residual": sample.hermiticity_residual(),
    }
    _write(args, json.dumps(payload, indent=1) + "\n")
    return 0


def cmd_charpoly(args) -> int:
    fam = _family(args)
    ts = np.arange(args.grid) / args.grid
    cps = char_poly_samples(fam, ts)
    if args.format == "csv":
        header = ["t"]
        for j in range(cps.degree + 1):
            header += [f"re_c{j}", f"im_c{j}"]
        lines = [",".join(header)]
        for t, row in zip(cps.ts, cps.coeff_rows):
            cells = [_fmt(t)]
            for c in row:
                cells += [_fmt(c.real), _fmt(c.imag)]
            lines.append(",".join(cells))
        _write(args, "\n".join(lines) + "\n")
    else:
        _write(args, json.dumps({
            "ts": [float(t) for t in cps.ts],
            "coeff_rows": [[_complex_json(c) for c in row]
                           for row in cps.coeff_rows]}, indent=1) + "\n")
    return 0


def _spectrum_payload(args, mother: bool):
    fam = _family(args)
    theta_grid = args.theta_grid if mother else None
    bands = spectrum_union(fam, args.grid, theta_grid,
                           gap_tol=args.gap_tol, threads=args.threads)
    return fam, bands


def cmd_spectrum(args, mother: bool = False) -> int:
    fam, bands = _spectrum_payload(args, mother)
    if args.format == "csv":
        _write(args, _bands_csv([(fam.p, fam.q, fam.kind, bands)]))
    else:
        payload = bands.to_json(with_samples=args.raw)
        payload.update({"p": fam.p, "q": fam.q, "kind": fam.kind,
                        "count": bands.count,
                        "measure": band_measure(bands)})
        _write(args, json.dumps(payload, indent=1) + "\n")
    return 0


def cmd_bands(args) -> int:
    fam, bands = _spectrum_payload(args, mother=args.theta_grid is not None)
    payload = {"p": fam.p, "q": fam.q, "kind": fam.kind,
               "count": bands.count, "measure": band_measure(bands),
               "intervals": [[float(a), float(b)] for a, b in bands.intervals]}
    _write(args, json.dumps(payload, indent=1) + "\n")
    return 0


def cmd_hausdorff(args) -> int:
    fam_a = OperatorFamily(args.kind_a, args.p, args.q, kappa=args.kappa,
                           lam=args.lam, theta=args.theta)
    fam_b = OperatorFamily(args.kind_b, args.p, args.q, kappa=args.kappa,
                           lam=args.lam, theta=args.theta)
    ba = spectrum_union(fam_a, args.grid, threads=args.threads)
    bb = spectrum_union(fam_b, args.grid, threads=args.threads)
    payload = {"p": args.p, "q": args.q, "kind_a": args.kind_a,
               "kind_b": args.kind_b, "kappa": args.kappa,
               "lambda": args.lam,
               "hausdorff_distance": hausdorff_distance(ba, bb)}
    _write(args, json.dumps(payload, indent=1) + "\n")
    return 0


def cmd_butterfly(args) -> int:
    alphas = _parse_alphas(args.alphas)
    warnings = []
    rows = butterfly_sweep(alphas, args.kind, kappa=args.kappa, lam=args.lam,
                           t_grid_size=args.grid,
                           theta_grid_size=args.theta_grid,
                           gap_tol=args.gap_tol, q_max=args.q_max,
                           threads=args.threads, warn=warnings.append)
    for w in warnings:
        print(w, file=sys.stderr)
    if args.format == "csv":
        _write(args, _bands_csv([(p, q, args.kind, b) for p, q, b in rows]))
    else:
        _write(args, json.dumps([
            {"p": p, "q": q, "count": b.count, "measure": band_measure(b),
             "intervals": [[float(x), float(y)] for x, y in b.intervals]}
            for p, q, b in rows], indent=1) + "\n")
    return 0


def cmd_monodromy(args) -> int:
    fam = _family(args)
    q = fam.q

    def p_eval(s):
        return ComplexPoly(char_poly_coeffs(fam.matrix(s / q).matrix,
                                            fam.hermitian))

    tp = track_roots(p_eval, initial_grid=args.grid,
                     projection_seed=args.seed)
    res = monodromy_permutation(tp, p_eval)
    payload = res.to_json()
    payload.update({"kind": fam.kind, "p": fam.p, "q": fam.q,
                    "kappa": fam.kappa, "refinements": tp.refinements,
                    "min_gap": tp.min_gap})
    _write(args, json.dumps(payload, indent=1) + "\n")
    return 0


def cmd_discriminant_profile(args) -> int:
    fam = _family(args)
    q = fam.q

    def p_eval(s):
        return ComplexPoly(char_poly_coeffs(fam.matrix(s / q).matrix,
                                            fam.hermitian))

    prof = discriminant_profile(p_eval, grid=args.grid)
    payload = {"kind": fam.kind, "p": fam.p, "q": fam.q, "kappa": fam.kappa,
               "min_abs_discriminant": prof.min_abs,
               "argmin_s": prof.argmin_s,
               "multiplicity_bound": prof.multiplicity_bound,
               "near_zeros": [[float(s), int(k)] for s, k in prof.near_zeros]}
    _write(args, json.dumps(payload, indent=1) + "\n")
    return 0


def cmd_newton_polygon(args) -> int:
    poly = _load_series_poly(args)
    data = nt.newton_polygon(poly)
    _write(args, json.dumps(data.to_json(), indent=1) + "\n")
    return 0


def cmd_puiseux(args) -> int:
    poly = _load_series_poly(args)
    branches = nt.puiseux_branches(poly, depth=args.depth)
    _write(args, json.dumps(
        {"branches": [b.to_json() for b in branches]}, indent=1) + "\n")
    return 0


def cmd_hensel_split(args) -> int:
    if args.demo:
        q_eval, degree = DEMO_PRODUCTS[args.demo]
    else:
        poly = _load_series_poly(args)
        degree = poly.degree

        def q_eval(t, z, _poly=poly):
            return _poly(t, z)

    fac = nt.hensel_split(q_eval, degree, delta_max=args.delta_max,
                          n_contour=args.contour, n_tsamples=args.tsamples)
    _write(args, json.dumps(fac.to_json(), indent=1) + "\n")
    return 0


# ----------------------------------------------------------------------
# verification suite
# ----------------------------------------------------------------------

def _core_checks(threads: int):
    checks = []

    def add(name, ok, detail):
        checks.append((name, bool(ok), detail))

    g = gauss_circulant(1, 2)
    oracle = np.array([[0, 1], [1, 0]], dtype=complex)
    add("gauss-q2-oracle", np.max(np.abs(g - oracle)) < 1e-14,
        f"max|G-oracle|={_fmt(np.max(np.abs(g - oracle)))}")
    worst = 0.0
    for p, q in [(1, 3), (2, 5), (3, 7)]:
        gq = gauss_circulant(p, q)
        worst = max(worst,
                    float(np.max(np.abs(gq @ gq.conj().T - np.eye(q)))),
                    float(np.max(np.abs(np.abs(np.fft.fft(gq[0])) - 1.0))))
    add("gauss-unitary-circulant", worst < 1e-12, f"worst={_fmt(worst)}")

    rng = np.random.default_rng(2024)
    worst = 0.0
    for kind in ("ordkr", "uh", "kh", "skr"):
        for p, q in [(1, 2), (2, 5), (5, 8)]:
            fam = OperatorFamily(kind, p, q, kappa=1.0, lam=1.0, theta=0.1)
            for t in rng.random(3):
                worst = max(worst, fam.matrix(float(t)).unitarity_residual())
    add("unitary-families", worst < 1e-10, f"worst={_fmt(worst)}")

    phases = eigen_phases(OperatorFamily("ordkr", 2, 5, kappa=0.0).matrix(0.3))
    circ = np.minimum(phases, 1.0 - phases)
    add("kappa-zero-point-spectrum", np.max(circ) < 1e-12,
        f"max-dist-to-0={_fmt(np.max(circ))}")

    fam = OperatorFamily("ordkr", 2, 5, kappa=1.0)
    worst = 0.0
    for t in np.arange(40) / 40:
        c1 = char_poly_coeffs(fam.matrix(float(t)).matrix)
        c2 = char_poly_coeffs(fam.matrix(float(t + 0.2)).matrix)
        worst = max(worst, float(np.max(np.abs(c1 - c2))))
    add("coefficient-periodicity", worst < 1e-9, f"defect={_fmt(worst)}")

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        p1, p0 = rng.normal(size=2) + 1j * rng.normal(size=2)
        d = discriminant([p0, p1, 1.0])
        ref = p1 * p1 - 4.0 * p0
        worst = max(worst, abs(d - ref) / max(abs(ref), 1e-12))
    add("quadratic-discriminant", worst < 1e-12, f"rel-err={_fmt(worst)}")

    rng = np.random.default_rng(11)
    ok = True
    for _ in range(50):
        shared = rng.normal() + 1j * rng.normal()
        pa = np.polynomial.polynomial.polyfromroots(
            [shared, *(rng.normal(size=2) + 1j * rng.normal(size=2))])
        pb = np.polynomial.polynomial.polyfromroots(
            [shared, *(rng.normal(size=2) + 2 + 1j * rng.normal(size=2))])
        scale = np.max(np.abs(pa)) * np.max(np.abs(pb))
        ok = ok and abs(sylvester_resultant(pa, pb)) < 1e-8 * scale
    add("resultant-common-root", ok, "50 planted shared roots")

    bands = spectrum_union(OperatorFamily("harper", 1, 3, lam=1.0),
                           256, 32, gap_tol=1e-3, threads=threads)
    add("harper-parity-q3", bands.count == 3, f"bands={bands.count}")
    bands = spectrum_union(OperatorFamily("ordkr", 2, 5, kappa=0.3),
                           256, gap_tol=1e-3, threads=threads)
    add("ordkr-parity-q5", bands.count == 5, f"bands={bands.count}")

    poly = _demo_series_poly("z2-t3")
    pg = nt.newton_polygon(poly)
    seg = pg.segments[0]
    add("newton-polygon-z2-t3",
        len(pg.segments) == 1 and seg.length == 2
        and seg.slope == -nt.Fraction(3, 2),
        f"slope={seg.slope}")
    branches = nt.puiseux_branches(poly, depth=4)
    lead = sorted(complex(b.terms[0][1]).real for b in branches)
    add("puiseux-z2-t3",
        len(branches) == 2
        and all(b.ramification == 2 for b in branches)
        and abs(lead[0] + 1) < 1e-8 and abs(lead[1] - 1) < 1e-8,
        f"leads={_fmt(lead[0])},{_fmt(lead[1])}")

    q_eval, degree = DEMO_PRODUCTS["sqrt-pair"]
    fac = nt.hensel_split(q_eval, degree)
    r_ok = abs(fac.clusters[0].radius - 1.0 / 3.0) < 1e-10
    add("hensel-sqrt-pair", r_ok and fac.max_residual < 1e-8,
        f"radius={_fmt(fac.clusters[0].radius)} resid={_fmt(fac.max_residual)}")

    tp = track_roots(lambda s: ComplexPoly([-np.exp(2j * np.pi * s), 0, 1]),
                     initial_grid=64)
    res = monodromy_permutation(tp)
    add("monodromy-transposition",
        res.permutation == (1, 0) and not res.is_pure,
        f"perm={res.permutation}")

    fam = OperatorFamily("ordkr", 2, 5, kappa=1.0)

    def p_eval(s):
        return ComplexPoly(char_poly_coeffs(fam.matrix(s / 5.0).matrix))

    tp = track_roots(p_eval, initial_grid=128)
    res = monodromy_permutation(tp, p_eval)
    add("monodromy-ordkr-identity",
        res.is_pure and res.closure_residual < 1e-6,
        f"perm={res.permutation} closure={_fmt(res.closure_residual)}")

    a, _ = band_count([0.1, 0.11, 0.5, 0.51], 0.1)
    b, _ = band_count([0.3, 0.31], 0.1)
    c, _ = band_count([0.45, 0.46, 0.8], 0.1)
    dab = hausdorff_distance(a, b)
    dba = hausdorff_distance(b, a)
    tri = hausdorff_distance(a, c) <= dab + hausdorff_distance(b, c) + 1e-12
    add("hausdorff-metric", dab == dba and tri,
        f"sym={_fmt(abs(dab - dba))}")

    return checks


def cmd_verify(args) -> int:
    if args.suite != "core":
        raise ValueError(f"unknown suite {args.suite!r}")
    checks = _core_checks(args.threads)
    lines = []
    n_fail = 0
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        n_fail += 0 if ok else 1
        lines.append(f"{status} {name}: {detail}")
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    _write(args, "\n".join(lines) + "\n")
    return 0 if n_fail == 0 else 1


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="floqband",
        description="Band spectra, monodromy, and polynomial tools for "
                    "rational-flux Floquet operator families.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gauss-matrix", help="emit the Gauss circulant")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--half-phase", action="store_true")
    _out_flags(s)
    s.set_defaults(func=cmd_gauss_matrix)

    s = sub.add_parser("operator", help="emit one matrix sample")
    s.add_argument("action", nargs="?", default="sample",
                   choices=("sample",))
    _family_flags(s)
    s.add_argument("--t", type=float, default=0.0)
    _out_flags(s)
    s.set_defaults(func=cmd_operator)

    s = sub.add_parser("charpoly",
                       help="characteristic polynomial coefficients on a grid")
    _family_flags(s)
    s.add_argument("--grid", type=int, default=200)
    _out_flags(s)
    s.set_defaults(func=cmd_charpoly)

    for name, mother in (("spectrum", False), ("mother-spectrum", True)):
        s = sub.add_parser(name, help="band spectrum over the parameter grid")
        _family_flags(s)
        s.add_argument("--grid", type=int, default=512)
        if mother:
            s.add_argument("--theta-grid", type=int, default=64)
        s.add_argument("--gap-tol", type=float, default=None)
        s.add_argument("--raw", action="store_true")
        _out_flags(s)
        s.set_defaults(func=lambda a, m=mother: cmd_spectrum(a, m))

    s = sub.add_parser("bands", help="band intervals and count")
    _family_flags(s)
    s.add_argument("--grid", type=int, default=512)
    s.add_argument("--theta-grid", type=int, default=None)
    s.add_argument("--gap-tol", type=float, default=None)
    _out_flags(s)
    s.set_defaults(func=cmd_bands)

    s = sub.add_parser("hausdorff",
                       help="Hausdorff distance between two family spectra")
    s.add_argument("--kind-a", choices=KINDS, required=True)
    s.add_argument("--kind-b", choices=KINDS, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--kappa", type=float, default=1.0)
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--grid", type=int, default=512)
    _out_flags(s)
    s.set_defaults(func=cmd_hausdorff)

    s = sub.add_parser("butterfly", help="band spectra across flux fractions")
    s.add_argument("--alphas", required=True,
                   help="farey:N, convergents:p0/q0,..., or list:p/q,...")
    s.add_argument("--kind", choices=KINDS, default="harper")
    s.add_argument("--kappa", type=float, default=1.0)
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--grid", type=int, default=256)
    s.add_argument("--theta-grid", type=int, default=None)
    s.add_argument("--gap-tol", type=float, default=None)
    s.add_argument("--q-max", type=int, default=55)
    _out_flags(s)
    s.set_defaults(func=cmd_butterfly)

    s = sub.add_parser("monodromy",
                       help="eigenvalue monodromy permutation of the family")
    _family_flags(s, kind_required=False)
    s.add_argument("--grid", type=int, default=512)
    _out_flags(s)
    s.set_defaults(func=cmd_monodromy)

    s = sub.add_parser("discriminant-profile",
                       help="discriminant magnitude along one period")
    _family_flags(s, kind_required=False)
    s.add_argument("--grid", type=int, default=512)
    _out_flags(s)
    s.set_defaults(func=cmd_discriminant_profile)

    for name, fn in (("newton-polygon", cmd_newton_polygon),
                     ("puiseux", cmd_puiseux)):
        s = sub.add_parser(name, help=f"{name} of a series polynomial")
        s.add_argument("--poly-json", default=None,
                       help="JSON file ('-' for stdin) with "
                            "{monic, coeffs: [{base_point, coeffs}]}")
        s.add_argument("--demo", choices=("z2-t3", "z2-sin2", "z2-cos"),
                       default=None)
        if name == "puiseux":
            s.add_argument("--depth", type=int, default=6)
        _out_flags(s)
        s.set_defaults(func=fn)

    s = sub.add_parser("hensel-split",
                       help="point-primary cluster factorization")
    s.add_argument("--poly-json", default=None)
    s.add_argument("--demo", choices=tuple(DEMO_PRODUCTS), default=None)
    s.add_argument("--delta-max", type=float, default=0.25)
    s.add_argument("--contour", type=int, default=256)
    s.add_argument("--tsamples", type=int, default=9)
    _out_flags(s)
    s.set_defaults(func=cmd_hensel_split)

    s = sub.add_parser("verify", help="run the deterministic check suite")
    s.add_argument("--suite", default="core")
    _out_flags(s)
    s.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (nt.ContourBreach, nt.QuadratureFailure, AmbiguousCrossing) as exc:
        diag = {"error": exc.code, "message": str(exc)}
        print(json.dumps(diag), file=sys.stderr)
        return 3
    except (ValueError, HalfAlphaError, OSError) as exc:
        diag = {"error": getattr(exc, "code", "VALIDATION"),
                "message": str(exc)}
        print(json.dumps(diag), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
