import math

import numpy as np
import pytest

from fgnseq.errors import BracketingError
from fgnseq.specfun import (
    BesselOrder,
    ZeroTable,
    bessel_j,
    bessel_j_prime,
    bessel_zeros,
    gamma_fn,
    kadec_band_halfwidth,
)
from fgnseq.specfun import _hankel_j, _series_j

from oracles import bessel_j_prime_fd, bessel_j_series, bessel_zero_bisect, stirling_gamma

# frozen oracle values (30-term shifted Stirling series / 50-digit ascending
# series; see oracles.py for the generating code)
GAMMA_2P4 = 1.2421693445043054
J_QUARTER_AT_1 = 0.7522313333407901
OMEGA1_H075 = 2.7808877239949803
JPRIME_03_AT_5 = 0.22716648483134258

H_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


class TestGamma:
    def test_classical_values(self):
        assert gamma_fn(1.0) == 1.0
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)

    def test_against_stirling_oracle_frozen(self):
        assert gamma_fn(2.4) == pytest.approx(GAMMA_2P4, rel=1e-13)

    @pytest.mark.parametrize("x", [0.05, 0.31, 1.0, 2.4, 7.7, 19.0, 33.3, 50.0])
    def test_relative_error_on_working_range(self, x):
        assert gamma_fn(x) == pytest.approx(stirling_gamma(x), rel=1e-13)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain_error(self, x):
        with pytest.raises(ValueError):
            gamma_fn(x)


class TestBesselJ:
    def test_half_order_closed_form(self):
        # J_{1/2}(x) = sqrt(2/(pi x)) sin(x)
        assert abs(bessel_j(0.5, math.pi)) < 1e-11
        assert bessel_j(0.5, math.pi / 2) == pytest.approx(2.0 / math.pi, abs=1e-12)
        lam = np.linspace(0.05, 60.0, 301)
        exact = np.sqrt(2.0 / (math.pi * lam)) * np.sin(lam)
        assert np.abs(bessel_j(0.5, lam) - exact).max() < 1e-11

    def test_quarter_order_frozen_oracle_value(self):
        assert bessel_j(0.25, 1.0) == pytest.approx(J_QUARTER_AT_1, abs=1e-13)

    def test_oracle_agreement_working_orders(self):
        # orders -H, 1-H, 2-H over the H grid, lambda in (0, 40]
        lams = np.concatenate([np.linspace(0.05, 40.0, 12), [0.9, 17.4, 17.6]])
        worst = 0.0
        for H in H_GRID:
            for nu in (-H, 1.0 - H, 2.0 - H):
                for lam in lams:
                    ref = bessel_j_series(nu, float(lam))
                    worst = max(worst, abs(bessel_j(nu, float(lam)) - ref))
        assert worst < 1e-10

    def test_branches_agree_on_overlap_window(self):
        lam = np.linspace(15.0, 20.0, 41)
        for nu in (-0.9, -0.3, 0.5, 1.2, 1.9):
            assert np.abs(_series_j(nu, lam) - _hankel_j(nu, lam)).max() < 1e-10

    def test_large_argument(self):
        # phase accuracy survives very large arguments (series oracle cannot
        # reach here; use mpmath's own evaluation as the reference)
        import mpmath as mp

        with mp.workdps(40):
            for lam in (1e3, 1e5, 2.5e5):
                ref = float(mp.besselj(mp.mpf("0.7"), mp.mpf(lam)))
                assert bessel_j(0.7, lam) == pytest.approx(ref, abs=1e-11)

    def test_at_zero(self):
        assert bessel_j(0.3, 0.0) == 0.0
        assert bessel_j(0.0, 0.0) == 1.0
        assert bessel_j(-0.3, 0.0) == math.inf

    def test_domain_error_negative(self):
        with pytest.raises(ValueError):
            bessel_j(0.5, -1.0)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            BesselOrder(2.0)
        with pytest.raises(ValueError):
            bessel_j(-1.0, 1.0)
        assert BesselOrder(1.999).nu == 1.999


class TestBesselJPrime:
    def test_half_order_at_zeros(self):
        # |J'_{1/2}(k pi)| = sqrt(2/pi) (k pi)^{-1/2}
        for k in (1, 2, 5, 11):
            expected = math.sqrt(2.0 / math.pi) / math.sqrt(k * math.pi)
            assert abs(bessel_j_prime(0.5, k * math.pi)) == pytest.approx(expected, abs=1e-11)

    def test_is_the_derivative(self):
        h = 1e-6
        for nu, lam in ((0.5, 2.7), (0.3, 9.1), (0.8, 21.0)):
            fd = (bessel_j(nu, lam + h) - bessel_j(nu, lam - h)) / (2 * h)
            assert bessel_j_prime(nu, lam) == pytest.approx(fd, abs=1e-6)

    def test_against_series_oracle_fd(self):
        assert bessel_j_prime(0.3, 5.0) == pytest.approx(JPRIME_03_AT_5, abs=1e-8)

    def test_requires_inner_order(self):
        with pytest.raises(ValueError):
            bessel_j_prime(1.5, 1.0)  # nu+1 would leave (-1, 2)
        with pytest.raises(ValueError):
            bessel_j_prime(0.5, 0.0)


class TestBesselZeros:
    def test_harmonic_case(self):
        zt = bessel_zeros(0.5, 3)
        assert np.abs(zt.omegas - np.array([1.0, 2.0, 3.0]) * math.pi).max() < 1e-12

    def test_first_zero_h075_frozen_oracle(self):
        # oracle: bisection of the 50-digit series on the Kadec band
        zt = bessel_zeros(0.75, 1)
        assert zt.omegas[0] == pytest.approx(OMEGA1_H075, abs=1e-9)
        band = kadec_band_halfwidth(0.75)
        assert (1 - band) * math.pi <= zt.omegas[0] <= (1 + band) * math.pi

    def test_oracle_bisection_match_more_orders(self):
        for H in (0.3, 0.62):
            zt = bessel_zeros(H, 2)
            band = kadec_band_halfwidth(H)
            for k in (1, 2):
                ref = bessel_zero_bisect(1.0 - H, (k - band) * math.pi, (k + band) * math.pi)
                assert zt.omegas[k - 1] == pytest.approx(ref, abs=1e-9)

    def test_asymptotic_form(self):
        zt = bessel_zeros(0.3, 50)
        target = (50 + 0.25 * (1 - 2 * 0.3)) * math.pi
        assert abs(zt.omegas[-1] - target) < 1e-3

    @pytest.mark.parametrize("H", H_GRID)
    def test_kadec_bound_strict(self, H):
        zt = bessel_zeros(H, 50)
        dev = np.abs(zt.omegas / math.pi - np.arange(1, 51))
        assert dev.max() < 0.25
        assert dev.max() <= kadec_band_halfwidth(H) + 1e-9

    def test_roots_are_roots_and_exhaustive(self):
        H = 0.3
        zt = bessel_zeros(H, 10)
        nu = 1.0 - H
        assert np.abs(bessel_j(nu, zt.omegas)).max() < 1e-11
        # no sign change of J between consecutive zeros
        for a, b in zip(zt.omegas[:-1], zt.omegas[1:]):
            grid = np.linspace(a + 1e-6, b - 1e-6, 200)
            signs = np.sign(bessel_j(nu, grid))
            assert np.all(signs == signs[0])

    def test_signed_index_convention(self):
        zt = bessel_zeros(0.7, 4)
        assert zt.omega(0) == 0.0
        assert zt.omega(-3) == -zt.omega(3)
        np.testing.assert_allclose(zt.omega(np.array([-2, 0, 2])), [-zt.omegas[1], 0.0, zt.omegas[1]])
        with pytest.raises(IndexError):
            zt.omega(5)

    def test_validation_rejects_bad_tables(self):
        with pytest.raises(ValueError):
            ZeroTable(H=0.5, K=2, omegas=np.array([2.0, 1.0]))
        with pytest.raises(ValueError):
            ZeroTable(H=0.5, K=1, omegas=np.array([2.0 * math.pi]))  # k=1 far off band

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            bessel_zeros(1.0, 5)
        with pytest.raises(ValueError):
            bessel_zeros(0.5, 0)


class TestNormalizationIntegral:
    @pytest.mark.parametrize("H", [0.3, 0.7])
    def test_j_squared_over_lambda_integral(self, H):
        # int_0^inf J_{1-H}^2 / lambda = 1/(2-2H); trapezoid to 200 plus the
        # (1/pi) lambda^{-2} tail estimate
        nu = 1.0 - H
        a, lam_max = 0.01, 200.0
        head = 4.0 ** (H - 1) * a ** (2 - 2 * H) / ((2 - 2 * H) * math.gamma(2 - H) ** 2)
        grid = np.unique(
            np.concatenate([np.geomspace(a, lam_max, 40001), np.linspace(a, lam_max, 120001)])
        )
        vals = bessel_j(nu, grid) ** 2 / grid
        total = head + np.trapezoid(vals, grid) + 1.0 / (math.pi * lam_max)
        assert total == pytest.approx(1.0 / (2.0 - 2.0 * H), abs=2e-3)


class TestEnvelope:
    @pytest.mark.parametrize("H", [0.2, 0.5, 0.8])
    def test_two_regime_envelope(self, H):
        lam = np.geomspace(1e-3, 300.0, 30000)
        ratio = np.abs(bessel_j(1.0 - H, lam)) / np.minimum(lam ** (1.0 - H), lam**-0.5)
        assert ratio.max() < 1.5


class TestBracketingFailure:
    def test_sign_change_failure_aborts(self, monkeypatch):
        import fgnseq.specfun as sf

        # a broken evaluator that never changes sign must abort, not guess
        monkeypatch.setattr(sf, "bessel_j", lambda nu, lam: np.ones_like(np.asarray(lam, dtype=float)))
        with pytest.raises(BracketingError):
            sf.bessel_zeros(0.4, 3)
