import math

import numpy as np
import pytest

from fgnseq.errors import SingularToeplitzError
from fgnseq.fracnoise import fgn_autocov
from fgnseq.toeplitz import (
    MeanShiftPair,
    ToeplitzCov,
    dense_solve,
    eig_lower_bound,
    eig_upper_bound,
    kl_fgn_shift_bound,
    kl_gaussian_shift,
    toeplitz_solve,
)

from oracles import dense_lu_solve


def random_spd_toeplitz(n: int, seed: int) -> ToeplitzCov:
    # Gaussian-decay autocovariance is positive definite by Bochner
    k = np.arange(n)
    return ToeplitzCov(np.exp(-(k**2) / 50.0) + 1e-3 * (k == 0))


class TestToeplitzSolve:
    def test_identity(self):
        cov = ToeplitzCov(np.concatenate([[1.0], np.zeros(7)]))
        b = np.arange(8.0)
        np.testing.assert_allclose(toeplitz_solve(cov, b), b, atol=1e-14)

    def test_white_noise_covariance_is_identity(self):
        cov = ToeplitzCov.fgn(0.5, 16)
        b = np.sin(np.arange(16.0))
        np.testing.assert_allclose(toeplitz_solve(cov, b), b, atol=1e-12)

    def test_against_dense_lu_oracle(self):
        cov = random_spd_toeplitz(64, 0)
        rng = np.random.default_rng(0)
        b = rng.standard_normal(64)
        x = toeplitz_solve(cov, b)
        ref = dense_lu_solve(cov.first_row, b)
        assert np.abs(x - ref).max() < 1e-8

    @pytest.mark.parametrize("H", [0.1, 0.3, 0.5, 0.7, 0.9])
    @pytest.mark.parametrize("n", [16, 128])
    def test_levinson_matches_dense_cholesky(self, H, n):
        cov = ToeplitzCov.fgn(H, n)
        rng = np.random.default_rng(n + int(H * 100))
        b = rng.standard_normal(n)
        x = toeplitz_solve(cov, b)
        ref = dense_solve(cov, b)
        assert np.abs(x - ref).max() / np.abs(ref).max() < 1e-8

    def test_residual_contract(self):
        cov = ToeplitzCov.fgn(0.8, 256)
        b = np.random.default_rng(5).standard_normal(256)
        x = toeplitz_solve(cov, b)
        assert np.linalg.norm(cov.matvec(x) - b) <= 1e-8 * np.linalg.norm(b)

    def test_near_singular_raises(self):
        cov = ToeplitzCov(np.array([1.0, 1.0 - 1e-13]))
        with pytest.raises(SingularToeplitzError):
            toeplitz_solve(cov, np.array([1.0, 0.0]))

    def test_zero_rhs(self):
        cov = ToeplitzCov.fgn(0.7, 8)
        np.testing.assert_array_equal(toeplitz_solve(cov, np.zeros(8)), np.zeros(8))

    def test_dimension_check(self):
        cov = ToeplitzCov.fgn(0.7, 8)
        with pytest.raises(ValueError):
            toeplitz_solve(cov, np.zeros(9))


class TestToeplitzCov:
    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            ToeplitzCov(np.array([1.0, 2.0, 0.0]))
        with pytest.raises(ValueError):
            ToeplitzCov(np.array([-1.0, 0.0]))


class TestEigBounds:
    def test_white_noise_closed_forms(self):
        assert eig_lower_bound(0.5, 64) == pytest.approx(1.0 - 1.0 / math.pi, abs=1e-6)
        assert eig_upper_bound(0.5, 64) == pytest.approx(1.0 + 1.0 / math.pi, abs=1e-6)

    @pytest.mark.parametrize("H", [0.3, 0.75])
    @pytest.mark.parametrize("n", [16, 256])
    def test_bounds_bracket_dense_spectrum(self, H, n):
        from scipy.linalg import toeplitz as dense_toeplitz

        ev = np.linalg.eigvalsh(dense_toeplitz(fgn_autocov(H, np.arange(n))))
        assert eig_lower_bound(H, n) <= ev.min()
        assert eig_upper_bound(H, n) >= ev.max()

    def test_short_memory_infimum_sits_near_origin(self):
        # for H < 1/2 the density vanishes at 0, so the lower bound shrinks
        # as the band [1/n, pi] extends toward the origin
        assert eig_lower_bound(0.3, 1024) < eig_lower_bound(0.3, 16)

    def test_n_validation(self):
        with pytest.raises(ValueError):
            eig_lower_bound(0.5, 1)


class TestKlShift:
    def test_zero_for_equal_means(self):
        cov = ToeplitzCov.fgn(0.6, 12)
        v = np.ones(12)
        assert kl_gaussian_shift(cov, MeanShiftPair(v, v)) == 0.0

    def test_identity_covariance_unit_shift(self):
        cov = ToeplitzCov(np.concatenate([[1.0], np.zeros(9)]))
        e1 = np.zeros(10)
        e1[0] = 1.0
        assert kl_gaussian_shift(cov, MeanShiftPair(e1, np.zeros(10))) == pytest.approx(0.5)

    def test_against_dense_inverse_oracle(self):
        n = 128
        cov = ToeplitzCov.fgn(0.7, n)
        rng = np.random.default_rng(2)
        v, w = rng.standard_normal(n), rng.standard_normal(n)
        d = v - w
        ref = 0.5 * d @ np.linalg.solve(cov.dense(), d)
        assert kl_gaussian_shift(cov, MeanShiftPair(v, w)) == pytest.approx(ref, rel=1e-8)

    def test_symmetry_and_quadratic_scaling(self):
        cov = ToeplitzCov.fgn(0.4, 32)
        rng = np.random.default_rng(3)
        v, w = rng.standard_normal(32), rng.standard_normal(32)
        kl = kl_gaussian_shift(cov, MeanShiftPair(v, w))
        assert kl_gaussian_shift(cov, MeanShiftPair(w, v)) == pytest.approx(kl, rel=1e-12)
        scaled = kl_gaussian_shift(cov, MeanShiftPair(w + 3.0 * (v - w), w))
        assert scaled == pytest.approx(9.0 * kl, rel=1e-10)

    def test_mean_shift_pair_validation(self):
        with pytest.raises(ValueError):
            MeanShiftPair(np.zeros(3), np.zeros(4))


class TestKlFgnShiftBound:
    def test_equal_means(self):
        pair = MeanShiftPair(np.ones(8), np.ones(8))
        assert kl_fgn_shift_bound(0.7, 8, pair) == (0.0, 0.0)

    def test_white_noise_unit_coordinate(self):
        e1 = np.zeros(16)
        e1[0] = 1.0
        exact, shape = kl_fgn_shift_bound(0.5, 16, MeanShiftPair(e1, np.zeros(16)))
        assert exact == pytest.approx(0.5, abs=1e-12)
        assert shape == 1.0

    def test_ratio_stays_bounded_over_n(self):
        # fixed-norm differences; the exact KL over the bound shape must stay
        # bounded by a constant, with no growth trend in n
        H = 0.7
        ratios = []
        for n in (64, 128, 256, 512, 1024):
            rng = np.random.default_rng(n)
            d = rng.standard_normal(n)
            d *= 1.0 / np.linalg.norm(d)
            exact, shape = kl_fgn_shift_bound(H, n, MeanShiftPair(d, np.zeros(n)))
            ratios.append(exact / shape)
        assert max(ratios) < 10.0
        assert ratios[-1] <= max(ratios[:2]) * 1.05
