import numpy as np
import numpy.polynomial.polynomial as npoly
import pytest

from floqband.poly import (ComplexPoly, SeriesPoly, discriminant,
                           euclid_gcd_bezout, is_simple, poly_derivative,
                           poly_roots, series_poly_discriminant,
                           sylvester_matrix, sylvester_resultant)
from floqband.series import TruncatedSeries, series_from_function

N = 16


def series_quadratic(p0, p1):
    one = TruncatedSeries.constant(1.0, p0.order)
    return SeriesPoly([p0, p1, one])


class TestDerivative:
    def test_quadratic(self):
        d = poly_derivative([3.0, 2.5, 1.0])  # z^2 + 2.5 z + 3
        assert np.allclose(d.coeffs, [2.5, 2.0])

    def test_linear(self):
        assert np.allclose(poly_derivative([0.0, 1.0]).coeffs, [1.0])

    def test_constant_gives_zero(self):
        d = poly_derivative([7.0])
        assert d.degree == 0 and d.coeffs[0] == 0


class TestResultant:
    def test_common_root(self):
        assert abs(sylvester_resultant([-1, 1], [-1, 1])) < 1e-14

    def test_hand_two_by_two(self):
        # P = z-1, Q = z+1: det [[1,-1],[1,1]] = 2
        assert abs(sylvester_resultant([-1, 1], [1, 1]) - 2) < 1e-14

    def test_quadratic_vs_derivative(self):
        # P = z^2 - 1: R(P, P') = -4 so D(P) = 4
        r = sylvester_resultant([-1, 0, 1], [0, 2])
        assert abs(r + 4) < 1e-12
        assert abs(discriminant([-1, 0, 1]) - 4) < 1e-12

    def test_matrix_layout(self):
        # banded layout: deg Q rows of P over deg P rows of Q
        s = sylvester_matrix([1, 2, 3], [4, 5])  # P deg 2, Q deg 1
        expected = np.array([[3, 2, 1], [5, 4, 0], [0, 5, 4]], dtype=complex)
        assert np.allclose(s, expected)

    def test_zero_leading_coefficient_rejected(self):
        with pytest.raises(ValueError):
            sylvester_resultant([1.0, 0.0], [1.0, 1.0])

    def test_root_product_identity(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            ra = rng.normal(size=3) + 1j * rng.normal(size=3)
            rb = rng.normal(size=2) + 2.5 + 1j * rng.normal(size=2)
            p = npoly.polyfromroots(ra)
            q = npoly.polyfromroots(rb)
            expected = np.prod([a - b for a in ra for b in rb])
            got = sylvester_resultant(p, q)
            assert abs(got - expected) < 1e-8 * max(1.0, abs(expected))

    def test_near_zero_iff_shared_root(self):
        rng = np.random.default_rng(22)
        for _ in range(25):
            shared = rng.normal() + 1j * rng.normal()
            pa = npoly.polyfromroots([shared,
                                      *(rng.normal(size=3) + 1j * rng.normal(size=3))])
            pb = npoly.polyfromroots([shared,
                                      *(3.0 + rng.normal(size=3) + 1j * rng.normal(size=3))])
            scale = np.max(np.abs(pa)) * np.max(np.abs(pb))
            assert abs(sylvester_resultant(pa, pb)) < 1e-8 * scale
        for _ in range(25):
            pa = npoly.polyfromroots(np.exp(2j * np.pi * rng.random(4)))
            pb = npoly.polyfromroots(3.0 * np.exp(2j * np.pi * rng.random(4)))
            scale = np.max(np.abs(pa)) * np.max(np.abs(pb))
            assert abs(sylvester_resultant(pa, pb)) > 1e-4 * scale


class TestDiscriminant:
    def test_quadratic_closed_form(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            p1, p0 = rng.normal(size=2) + 1j * rng.normal(size=2)
            d = discriminant([p0, p1, 1.0])
            ref = p1 * p1 - 4.0 * p0
            assert abs(d - ref) <= 1e-12 * max(1.0, abs(ref))

    def test_repeated_root(self):
        assert abs(discriminant(ComplexPoly.from_roots([1.0, 1.0]))) < 1e-12

    def test_root_difference_product(self):
        rng = np.random.default_rng(9)
        for deg in (2, 3, 5):
            roots = rng.normal(size=deg) + 1j * rng.normal(size=deg)
            p = ComplexPoly.from_roots(roots)
            expected = -np.prod([roots[i] - roots[j]
                                 for i in range(deg) for j in range(deg)
                                 if i != j])
            got = discriminant(p)
            assert abs(got - expected) < 1e-6 * max(1.0, abs(expected))

    def test_non_monic_rejected(self):
        with pytest.raises(ValueError):
            discriminant([1.0, 0.0, 2.0])

    def test_degree_below_two_rejected(self):
        with pytest.raises(ValueError):
            discriminant([0.0, 1.0])


class TestGcd:
    def test_explicit_factor(self):
        g, _, _ = euclid_gcd_bezout([-1, 0, 1], [-1, 1])
        assert g.degree == 1
        assert np.allclose(g.coeffs, [-1, 1], atol=1e-12)

    def test_coprime_gives_constant(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            p = np.concatenate([rng.normal(size=2)
                                + 1j * rng.normal(size=2), [1.0]])
            q = np.concatenate([rng.normal(size=2) + 3.0
                                + 1j * rng.normal(size=2), [1.0]])
            g, p1, q1 = euclid_gcd_bezout(p, q)
            assert g.degree == 0
            resid = npoly.polyadd(npoly.polymul(p1.coeffs, p),
                                  npoly.polymul(q1.coeffs, q))
            resid = npoly.polysub(resid, g.coeffs)
            assert np.max(np.abs(resid)) < 1e-8

    def test_multiplicity_extraction(self):
        p = ComplexPoly.from_roots([2.0, 2.0, -1.0])
        g, _, _ = euclid_gcd_bezout(p, poly_derivative(p))
        assert g.degree == 1
        assert abs(-g.coeffs[0] / g.coeffs[1] - 2.0) < 1e-7

    def test_bezout_identity_bound(self):
        rng = np.random.default_rng(4)
        eps = 1e-9
        for _ in range(20):
            p = np.concatenate([rng.normal(size=4), [1.0]])
            q = np.concatenate([rng.normal(size=3), [1.0]])
            g, p1, q1 = euclid_gcd_bezout(p, q, eps=eps)
            resid = npoly.polysub(
                npoly.polyadd(npoly.polymul(p1.coeffs, p),
                              npoly.polymul(q1.coeffs, q)), g.coeffs)
            bound = 10 * eps * (np.max(np.abs(p)) + np.max(np.abs(q)))
            assert np.max(np.abs(resid)) <= max(bound, 1e-10)

    def test_gcd_divides_inputs(self):
        rng = np.random.default_rng(14)
        for _ in range(10):
            common = rng.normal(size=2) + 1j * rng.normal(size=2)
            pa = npoly.polyfromroots(np.concatenate([common,
                                                     rng.normal(size=2)]))
            pb = npoly.polyfromroots(np.concatenate([common,
                                                     rng.normal(size=2) + 4]))
            g, _, _ = euclid_gcd_bezout(pa, pb)
            assert g.degree == 2
            for target in (pa, pb):
                _, rem = npoly.polydiv(target, g.coeffs)
                assert np.max(np.abs(rem)) < 1e-6


class TestRoots:
    def test_simple_pair(self):
        r = np.sort_complex(poly_roots([-1, 0, 1]))
        assert np.allclose(r, [-1, 1])

    def test_roots_of_unity(self):
        r = poly_roots([-1, 0, 0, 1])
        expected = np.exp(2j * np.pi * np.arange(3) / 3)
        for e in expected:
            assert np.min(np.abs(r - e)) < 1e-10

    def test_planted_degree_eight(self):
        rng = np.random.default_rng(6)
        planted = rng.normal(size=8) + 1j * rng.normal(size=8)
        r = poly_roots(ComplexPoly.from_roots(planted))
        for e in planted:
            assert np.min(np.abs(r - e)) < 1e-8

    def test_reconstruction(self):
        rng = np.random.default_rng(8)
        coeffs = np.concatenate([rng.normal(size=8)
                                 + 1j * rng.normal(size=8), [1.0]])
        r = poly_roots(coeffs)
        back = npoly.polyfromroots(r)
        assert np.max(np.abs(back - coeffs)) < 1e-8 * np.max(np.abs(coeffs))

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            poly_roots([3.0])


class TestSeriesDiscriminant:
    def test_sin_squared(self):
        sin = series_from_function(lambda t: np.sin(2 * np.pi * t), 0.0, N,
                                   radius=0.3)
        q = series_quadratic(-1.0 * (sin * sin), TruncatedSeries.zero(N))
        d = series_poly_discriminant(q)
        ref = 4.0 * (sin * sin)
        assert np.max(np.abs(d.coeffs - ref.coeffs)) < 1e-10 * \
            np.max(np.abs(ref.coeffs))
        assert d.ord() == 2

    def test_random_quadratic_matches_closed_form(self):
        rng = np.random.default_rng(12)
        p0 = TruncatedSeries(rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1))
        p1 = TruncatedSeries(rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1))
        d = series_poly_discriminant(series_quadratic(p0, p1))
        ref = p1 * p1 - 4.0 * p0
        assert np.max(np.abs(d.coeffs - ref.coeffs)) < 1e-10 * \
            np.max(np.abs(ref.coeffs))

    def test_perfect_square_is_zero(self):
        t = TruncatedSeries.monomial(1, 1.0, N)
        q = series_quadratic(t * t, -2.0 * t)
        assert series_poly_discriminant(q).is_zero()

    def test_degree_six_against_root_product(self):
        # degree 6 exercises the fraction-free elimination path
        rng = np.random.default_rng(15)
        roots = []
        for i in range(6):
            c = rng.normal(size=N + 1) * 0.3 + 1j * rng.normal(size=N + 1) * 0.3
            c[0] = i + 1.0
            roots.append(TruncatedSeries(c))
        coeffs = [TruncatedSeries.constant(1.0, N)]
        for r in roots:
            new = [-1.0 * (r * coeffs[0])]
            for k in range(1, len(coeffs)):
                new.append(coeffs[k - 1] - r * coeffs[k])
            new.append(coeffs[-1])
            coeffs = new
        q = SeriesPoly(coeffs)
        d = series_poly_discriminant(q)
        prod = TruncatedSeries.constant(1.0, N)
        for i in range(6):
            for j in range(6):
                if i != j:
                    prod = prod * (roots[i] - roots[j])
        ref = -1.0 * prod
        rel = np.max(np.abs(d.coeffs - ref.coeffs)) / np.max(np.abs(ref.coeffs))
        assert rel < 1e-8


class TestIsSimple:
    def test_series_sin_squared_simple(self):
        sin = series_from_function(lambda t: np.sin(2 * np.pi * t), 0.0, N,
                                   radius=0.3)
        q = series_quadratic(-1.0 * (sin * sin), TruncatedSeries.zero(N))
        assert is_simple(q)

    def test_series_cos_simple(self):
        cos = series_from_function(lambda t: np.cos(2 * np.pi * t), 0.0, N,
                                   radius=0.3)
        q = series_quadratic(-1.0 * cos, TruncatedSeries.zero(N))
        assert is_simple(q)

    def test_repeated_complex_root_not_simple(self):
        assert not is_simple(ComplexPoly.from_roots([1.0, 1.0]))

    def test_series_perfect_square_not_simple(self):
        t = TruncatedSeries.monomial(1, 1.0, N)
        assert not is_simple(series_quadratic(t * t, -2.0 * t))


class TestSeriesPolyValidation:
    def test_mixed_base_points_rejected(self):
        with pytest.raises(ValueError):
            SeriesPoly([TruncatedSeries([1, 2], 0.0),
                        TruncatedSeries([1, 2], 0.3)])

    def test_monic_detection(self):
        one = TruncatedSeries.constant(1.0, 4)
        z = TruncatedSeries.zero(4)
        assert SeriesPoly([z, one]).monic
        assert not SeriesPoly([one, TruncatedSeries.constant(2.0, 4)]).monic

    def test_json_round_trip(self):
        one = TruncatedSeries.constant(1.0, 3)
        q = SeriesPoly([TruncatedSeries([1, 2j, 0, 0]), one])
        back = SeriesPoly.from_json(q.to_json())
        assert back.monic == q.monic
        assert np.allclose(back.coeffs[0].coeffs, q.coeffs[0].coeffs)
