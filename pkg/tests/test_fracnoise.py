import math

import numpy as np
import pytest

from fgnseq.fracnoise import (
    FbmKernel,
    FgnModel,
    derived_rng,
    fbm_cov,
    fbm_from_fgn,
    fgn_autocov,
    fgn_spectral_density,
    seed_sequence,
    simulate_fgn,
)

from oracles import fgn_spectral_cosine_sum


class TestAutocov:
    def test_white_noise_case(self):
        assert fgn_autocov(0.5, 0) == 1.0
        for k in (1, 2, 3, 10):
            assert fgn_autocov(0.5, k) == 0.0

    def test_closed_form_values(self):
        assert fgn_autocov(0.75, 1) == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-14)
        # negative lag-one correlation for H < 1/2
        expected = 0.5 * (2.0**0.6 - 2.0)
        assert fgn_autocov(0.3, 1) == pytest.approx(expected, rel=1e-14)
        assert fgn_autocov(0.3, 1) < 0.0

    def test_even_in_k(self):
        k = np.arange(-6, 7)
        vals = fgn_autocov(0.7, k)
        np.testing.assert_allclose(vals, vals[::-1], rtol=0, atol=0)

    def test_unit_variance(self):
        for H in (0.1, 0.45, 0.9):
            assert fgn_autocov(H, 0) == 1.0


class TestFbmCov:
    def test_brownian_case_is_min(self):
        s = np.linspace(0.0, 1.0, 9)
        grid = fbm_cov(0.5, s[:, None], s[None, :])
        np.testing.assert_allclose(grid, np.minimum(s[:, None], s[None, :]), atol=1e-15)

    def test_zero_time_pins_to_zero(self):
        for H in (0.2, 0.5, 0.8):
            assert fbm_cov(H, 0.0, 0.7) == 0.0

    def test_closed_form(self):
        expected = 0.5 * (0.75**1.4 + 0.25**1.4 - 0.5**1.4)
        assert fbm_cov(0.7, 0.25, 0.75) == pytest.approx(expected, rel=1e-14)

    def test_symmetric_and_diagonal(self):
        assert fbm_cov(0.3, 0.2, 0.9) == fbm_cov(0.3, 0.9, 0.2)
        assert fbm_cov(0.3, 0.4, 0.4) == pytest.approx(0.4**0.6, rel=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            fbm_cov(0.5, -0.1, 0.5)


class TestSpectralDensity:
    def test_flat_for_white_noise(self):
        lam = np.linspace(1e-6, math.pi, 101)
        lam[0] = 1e-6
        assert np.abs(fgn_spectral_density(0.5, lam) - 1.0).max() < 1e-9

    def test_low_frequency_power_law(self):
        # f_H(l) * l^{2H-1} -> c_H as l -> 0
        H = 0.75
        c_h = math.sin(math.pi * H) * math.gamma(2 * H + 1)
        for lam in (1e-5, 1e-6):
            assert fgn_spectral_density(H, lam) * lam ** (2 * H - 1) == pytest.approx(
                c_h, rel=1e-6
            )

    def test_against_cosine_sum_oracle(self):
        ref = fgn_spectral_cosine_sum(0.3, math.pi / 2)
        assert fgn_spectral_density(0.3, math.pi / 2) == pytest.approx(ref, abs=1e-6)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            fgn_spectral_density(0.7, 0.0)
        with pytest.raises(ValueError):
            fgn_spectral_density(0.7, 1e-9)
        with pytest.raises(ValueError):
            fgn_spectral_density(0.7, math.pi + 1e-6)


class TestSimulate:
    def test_seed_determinism_bit_identical(self):
        a = simulate_fgn(0.7, 300, 12345)
        b = simulate_fgn(0.7, 300, 12345)
        assert np.array_equal(a, b)
        c = simulate_fgn(0.7, 300, 12346)
        assert not np.array_equal(a, c)

    def test_white_noise_lag_one(self):
        # one long path; sample lag-1 autocovariance within 3 standard errors
        n = 10**6
        x = simulate_fgn(0.5, n, 99)
        lag1 = float(x[:-1] @ x[1:]) / n
        assert abs(lag1) < 3.0 / math.sqrt(n)
        assert x.std() == pytest.approx(1.0, abs=0.01)

    def test_pair_covariance_matches_autocov(self):
        reps = 20000
        draws = np.array(
            [simulate_fgn(0.75, 2, seed_sequence(7, r)) for r in range(reps)]
        )
        cov = float(np.cov(draws.T)[0, 1])
        # MC standard error of a covariance estimate is ~ sqrt((1+g^2)/reps)
        assert cov == pytest.approx(math.sqrt(2.0) - 1.0, abs=0.03)

    def test_normalized_mean_variance(self):
        # Var(sum Y_i) = n^{2H}, so sum/n^H has unit variance
        H, n, reps = 0.3, 1024, 1500
        sums = np.array(
            [simulate_fgn(H, n, seed_sequence(11, r)).sum() for r in range(reps)]
        )
        assert (sums / n**H).var() == pytest.approx(1.0, abs=0.12)

    def test_single_observation(self):
        x = simulate_fgn(0.9, 1, 0)
        assert x.shape == (1,)

    def test_cholesky_fallback_matches_law(self):
        # force the fallback path and check second moments still match
        from fgnseq.fracnoise import _simulate_fgn_cholesky

        reps = 8000
        draws = np.array(
            [
                _simulate_fgn_cholesky(0.75, 2, derived_rng(5, r))
                for r in range(reps)
            ]
        )
        assert float(np.cov(draws.T)[0, 1]) == pytest.approx(math.sqrt(2) - 1, abs=0.05)

    def test_accepts_generator_and_seedsequence(self):
        x = simulate_fgn(0.6, 8, derived_rng(3, 1))
        y = simulate_fgn(0.6, 8, seed_sequence(3, 1))
        assert np.array_equal(x, y)


class TestPartialSums:
    def test_zeros_and_identity(self):
        np.testing.assert_array_equal(fbm_from_fgn(np.zeros(5)), np.zeros(5))
        np.testing.assert_array_equal(fbm_from_fgn([2.5]), [2.5])
        with pytest.raises(ValueError):
            fbm_from_fgn([])

    def test_terminal_variance_scaling(self):
        H, n, reps = 0.7, 512, 1200
        ends = np.array(
            [fbm_from_fgn(simulate_fgn(H, n, seed_sequence(13, r)))[-1] for r in range(reps)]
        )
        assert ends.var() / n ** (2 * H) == pytest.approx(1.0, abs=0.12)

    def test_self_similarity_of_partial_sums(self):
        # Var(S_{n/2}) / Var(S_n) -> (1/2)^{2H}
        H, n, reps = 0.6, 512, 1500
        s_half = np.empty(reps)
        s_full = np.empty(reps)
        for r in range(reps):
            path = fbm_from_fgn(simulate_fgn(H, n, seed_sequence(17, r)))
            s_half[r] = path[n // 2 - 1]
            s_full[r] = path[-1]
        ratio = s_half.var() / s_full.var()
        assert ratio == pytest.approx(0.5 ** (2 * H), rel=0.15)


class TestModels:
    @pytest.mark.parametrize("H", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_fgn_model_is_positive_definite(self, H):
        from scipy.linalg import toeplitz

        model = FgnModel(H=H, n=512)
        chol = np.linalg.cholesky(toeplitz(model.autocov_row()))
        assert np.diag(chol).min() > 0.0

    def test_fgn_model_validation(self):
        with pytest.raises(ValueError):
            FgnModel(H=1.5, n=4)
        with pytest.raises(ValueError):
            FgnModel(H=0.5, n=0)

    def test_fbm_kernel(self):
        kern = FbmKernel(H=0.7)
        assert kern.cov(0.5, 0.5) == pytest.approx(0.5**1.4)
        g = np.linspace(0.1, 1.0, 5)
        m = kern.matrix(g)
        assert np.allclose(m, m.T)
        assert np.linalg.eigvalsh(m).min() > 0.0


class TestSeedSplitting:
    def test_distinct_keys_give_distinct_streams(self):
        a = derived_rng(42, 0).standard_normal(4)
        b = derived_rng(42, 1).standard_normal(4)
        assert not np.array_equal(a, b)

    def test_same_key_reproduces(self):
        a = derived_rng(42, 3, 1).standard_normal(4)
        b = derived_rng(42, 3, 1).standard_normal(4)
        np.testing.assert_array_equal(a, b)
