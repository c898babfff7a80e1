import math

import numpy as np
import numpy.polynomial.polynomial as npoly
import pytest

from floqband.floquet import (CharPolySamples, HalfAlphaError, OperatorFamily,
                              char_poly_coeffs, char_poly_samples,
                              gauss_circulant, harper_matrix, kh_matrix,
                              kick_diagonal, ordkr_matrix,
                              reduced_poly_samples, skr_matrix, twisted_shift,
                              uh_matrix)


def unit_residual(m):
    return np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))


class TestGaussCirculant:
    def test_first_row_matches_direct_sum(self):
        p, q = 2, 5
        a = p / q
        direct = np.array([sum(np.exp(-2j * np.pi * k * k * a)
                               * np.exp(2j * np.pi * j * k * a)
                               for k in range(q)) for j in range(q)]) / q
        g = gauss_circulant(p, q)
        assert np.max(np.abs(g[0] - direct)) < 1e-14

    def test_q2_hand_oracle(self):
        g = gauss_circulant(1, 2)
        assert np.max(np.abs(g - np.array([[0, 1], [1, 0]]))) < 1e-14

    def test_rows_right_rotate(self):
        g = gauss_circulant(2, 5)
        for r in range(5):
            for c in range(5):
                assert abs(g[r, c] - g[0, (c - r) % 5]) < 1e-15

    def test_unitary_and_unimodular_dft(self):
        for p, q in [(1, 3), (2, 5), (3, 7)]:
            g = gauss_circulant(p, q)
            assert unit_residual(g) < 1e-12
            eig = np.fft.fft(g[0])
            assert np.max(np.abs(np.abs(eig) - 1.0)) < 1e-12

    def test_half_phase_unitary_all_parities(self):
        for p, q in [(1, 2), (1, 3), (3, 5), (1, 4), (5, 8), (8, 13)]:
            g = gauss_circulant(p, q, half_phase=True)
            assert unit_residual(g) < 1e-12

    def test_non_coprime_rejected(self):
        with pytest.raises(ValueError):
            gauss_circulant(2, 4)


class TestKickDiagonal:
    def test_zero_kick_is_identity(self):
        d = kick_diagonal(2, 5, 0.0, 0.37)
        assert np.max(np.abs(d - np.eye(5))) < 1e-15

    def test_first_entry_at_origin(self):
        d = kick_diagonal(2, 5, 0.7, 0.0)
        assert abs(d[0, 0] - np.exp(-2j * 0.7)) < 1e-15

    def test_unimodular_entries(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            d = kick_diagonal(3, 7, 10 * rng.random(), rng.random())
            assert np.max(np.abs(np.abs(np.diag(d)) - 1.0)) < 1e-15


class TestOrdkr:
    def test_zero_kick_is_identity(self):
        m = ordkr_matrix(2, 5, 0.0, 0.3).matrix
        assert np.max(np.abs(m - np.eye(5))) < 1e-13

    def test_unitarity(self):
        s = ordkr_matrix(2, 5, 1.0, 0.3)
        assert s.unitarity_residual() < 1e-12

    def test_det_modulus_one(self):
        m = ordkr_matrix(3, 7, 2.0, 0.11).matrix
        assert abs(abs(np.linalg.det(m)) - 1.0) < 1e-10

    def test_eigenphase_period(self):
        for p, q in [(2, 5), (1, 3)]:
            for t in (0.12, 0.4):
                a = np.sort(np.angle(np.linalg.eigvals(
                    ordkr_matrix(p, q, 1.0, t).matrix)))
                b = np.sort(np.angle(np.linalg.eigvals(
                    ordkr_matrix(p, q, 1.0, t + 1.0 / q).matrix)))
                assert np.max(np.abs(a - b)) < 1e-9


class TestHarper:
    def test_q2_hand_matrix(self):
        m = harper_matrix(1, 2, 1.0, 0.0, 0.0).matrix
        assert np.max(np.abs(m - np.array([[2, 2], [2, -2]]))) < 1e-14
        w = np.linalg.eigvalsh(m)
        assert np.max(np.abs(np.sort(w) - [-2 * np.sqrt(2), 2 * np.sqrt(2)])) \
            < 1e-12

    def test_hermitian(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            s = harper_matrix(2, 5, rng.random(), rng.random(), rng.random())
            assert s.hermiticity_residual() < 1e-15

    def test_zero_coupling_hopping_spectrum(self):
        # lambda = 0 leaves the twisted shift: eigenvalues 2cos(2pi(k+t)/q)
        q = 5
        for t in (0.0, 0.3):
            w = np.sort(np.linalg.eigvalsh(
                harper_matrix(1, q, 0.0, 0.0, t).matrix))
            expected = np.sort(2 * np.cos(2 * np.pi * (np.arange(q) + t) / q))
            assert np.max(np.abs(w - expected)) < 1e-12

    def test_union_over_t_is_full_band(self):
        q = 5
        vals = []
        for t in np.arange(64) / 64:
            vals.extend(np.linalg.eigvalsh(
                harper_matrix(1, q, 0.0, 0.0, float(t)).matrix))
        vals = np.asarray(vals)
        assert vals.min() < -1.99 and vals.max() > 1.99

    def test_q1_scalar(self):
        m = harper_matrix(1, 1, 0.7, 0.2, 0.1).matrix
        expected = 2 * 0.7 * np.cos(2 * np.pi * 0.2) + 2 * np.cos(2 * np.pi * 0.1)
        assert m.shape == (1, 1)
        assert abs(m[0, 0] - expected) < 1e-14


class TestUnitaryHarper:
    def test_zero_kick_identity(self):
        m = uh_matrix(2, 5, 0.0, 1.0, 0.1, 0.2).matrix
        assert np.max(np.abs(m - np.eye(5))) < 1e-14

    def test_spectral_mapping(self):
        h = harper_matrix(2, 5, 1.0, 0.1, 0.2).matrix
        u = uh_matrix(2, 5, 0.7, 1.0, 0.1, 0.2).matrix
        expected = np.sort(np.mod(-0.7 * np.linalg.eigvalsh(h), 2 * np.pi))
        got = np.sort(np.mod(np.angle(np.linalg.eigvals(u)), 2 * np.pi))
        assert np.max(np.abs(got - expected)) < 1e-10

    def test_unitarity(self):
        assert uh_matrix(3, 7, 2.0, 1.5, 0.3, 0.6).unitarity_residual() < 1e-12


class TestKickedHarper:
    def test_zero_kick_identity(self):
        m = kh_matrix(2, 5, 0.0, 1.0, 0.1, 0.2).matrix
        assert np.max(np.abs(m - np.eye(5))) < 1e-14

    def test_unitarity(self):
        assert kh_matrix(2, 5, 1.0, 1.0, 0.1, 0.2).unitarity_residual() < 1e-10

    def test_second_factor_constant_in_t(self):
        r = np.arange(5)
        diag = np.exp(-2j * 1.0 * 1.0
                      * np.cos(2 * np.pi * (r * 2 / 5 + 0.1)))
        for t in (0.0, 0.4):
            s = twisted_shift(5, t)
            w, v = np.linalg.eigh(s + s.conj().T)
            kick = (v * np.exp(-1j * 1.0 * w)) @ v.conj().T
            expected = kick * diag[None, :]
            got = kh_matrix(2, 5, 1.0, 1.0, 0.1, t).matrix
            assert np.max(np.abs(got - expected)) < 1e-12

    def test_quadratic_closeness_to_uh(self):
        args = (2, 5, 1.0, 0.1, 0.2)
        for kappa in (0.1, 0.05):
            e1 = np.max(np.abs(kh_matrix(args[0], args[1], kappa, 1.0, 0.1, 0.2).matrix
                               - uh_matrix(args[0], args[1], kappa, 1.0, 0.1, 0.2).matrix))
            e2 = np.max(np.abs(kh_matrix(args[0], args[1], kappa / 2, 1.0, 0.1, 0.2).matrix
                               - uh_matrix(args[0], args[1], kappa / 2, 1.0, 0.1, 0.2).matrix))
            assert 3.5 <= e1 / e2 <= 4.5


class TestSingleKickedRotor:
    def test_zero_kick_quadratic_phases(self):
        m = skr_matrix(1, 2, 0.0, 0.3).matrix
        assert abs(m[0, 0] - 1.0) < 1e-14
        assert abs(m[1, 1] - np.exp(-1j * np.pi / 2)) < 1e-14
        assert abs(m[0, 1]) + abs(m[1, 0]) < 1e-14

    def test_unitarity(self):
        assert skr_matrix(2, 5, 1.0, 0.2).unitarity_residual() < 1e-10

    def test_odd_product_raises_half_alpha(self):
        with pytest.raises(HalfAlphaError):
            skr_matrix(1, 3, 1.0, 0.0)
        # the doubled fiber accepts the same flux
        assert skr_matrix(1, 6, 1.0, 0.0).unitarity_residual() < 1e-10


class TestFamilyUnitaritySweep:
    def test_many_parameters(self):
        rng = np.random.default_rng(77)
        for kind in ("ordkr", "uh", "kh"):
            for p, q in [(1, 2), (2, 5), (8, 13), (2, 21)]:
                fam = OperatorFamily(kind, p, q, kappa=10.0, lam=1.0,
                                     theta=0.05)
                for t in rng.random(3):
                    assert fam.matrix(float(t)).unitarity_residual() < 1e-10

    def test_invalid_family_rejected(self):
        with pytest.raises(ValueError):
            OperatorFamily("ordkr", 2, 4)
        with pytest.raises(ValueError):
            OperatorFamily("nope", 1, 2)


class TestCharPoly:
    def test_zero_kick_power_of_linear(self):
        fam = OperatorFamily("ordkr", 2, 5, kappa=0.0)
        cps = char_poly_samples(fam, np.linspace(0, 0.9, 7))
        expected = npoly.polyfromroots(np.ones(5))
        for row in cps.coeff_rows:
            assert np.max(np.abs(row - expected)) < 1e-12

    def test_monic_leading_coefficient(self):
        fam = OperatorFamily("ordkr", 2, 5, kappa=1.0)
        cps = char_poly_samples(fam, np.linspace(0, 0.9, 5))
        assert np.all(cps.coeff_rows[:, -1] == 1.0)

    def test_coefficient_periodicity(self):
        for p, q in [(2, 5), (1, 3)]:
            fam = OperatorFamily("ordkr", p, q, kappa=1.0)
            worst = 0.0
            for t in np.arange(50) / 50:
                c1 = char_poly_coeffs(fam.matrix(float(t)).matrix)
                c2 = char_poly_coeffs(fam.matrix(float(t + 1.0 / q)).matrix)
                worst = max(worst, float(np.max(np.abs(c1 - c2))))
            assert worst < 1e-9

    def test_determinant_probe(self):
        fam = OperatorFamily("ordkr", 2, 5, kappa=1.0)
        cps = char_poly_samples(fam, np.linspace(0, 0.9, 5))
        rng = np.random.default_rng(31)
        for i, t in enumerate(cps.ts):
            m = fam.matrix(float(t)).matrix
            for z in rng.normal(size=5) + 1j * rng.normal(size=5):
                det = np.linalg.det(z * np.eye(5) - m)
                val = npoly.polyval(z, cps.coeff_rows[i])
                assert abs(det - val) < 1e-9 * max(1.0, abs(det))

    def test_constant_coefficient_is_det_of_negated_matrix(self):
        fam = OperatorFamily("ordkr", 2, 5, kappa=1.3)
        m = fam.matrix(0.21).matrix
        c = char_poly_coeffs(m)
        assert abs(c[0] - np.linalg.det(-m)) < 1e-10

    def test_unsorted_grid_rejected(self):
        fam = OperatorFamily("ordkr", 2, 5)
        with pytest.raises(ValueError):
            char_poly_samples(fam, [0.5, 0.2])


class TestReducedPoly:
    def test_reparametrization(self):
        fam = OperatorFamily("ordkr", 2, 5, kappa=1.0)
        ts = np.linspace(0, 1 / 5, 30, endpoint=False)
        cps = char_poly_samples(fam, ts)
        red = reduced_poly_samples(cps)
        assert np.allclose(red.ts, ts * 5)
        assert np.allclose(red.coeff_rows, cps.coeff_rows)
        # s = 0 and s = 0.5 match the direct evaluations
        assert np.max(np.abs(red.coeff_rows[0]
                             - char_poly_coeffs(fam.matrix(0.0).matrix))) < 1e-12

    def test_round_trip(self):
        fam = OperatorFamily("ordkr", 2, 5, kappa=1.0)
        ts = np.linspace(0, 1 / 5, 20, endpoint=False)
        red = reduced_poly_samples(char_poly_samples(fam, ts))
        for s, row in zip(red.ts, red.coeff_rows):
            direct = char_poly_coeffs(fam.matrix(float(s / 5)).matrix)
            assert np.max(np.abs(row - direct)) < 1e-12

    def test_out_of_period_grid_rejected(self):
        fam = OperatorFamily("ordkr", 2, 5, kappa=1.0)
        cps = char_poly_samples(fam, np.linspace(0, 0.9, 10))
        with pytest.raises(ValueError):
            reduced_poly_samples(cps)
