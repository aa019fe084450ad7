import numpy as np
import pytest

from predictsched import fractional_gaussian_noise, hurst_exponent


class TestFgnGenerator:
    def test_unit_variance_and_lag1_correlation(self):
        h = 0.72
        x = fractional_gaussian_noise(65536, h, rng=7)
        assert x.var() == pytest.approx(1.0, abs=0.05)
        lag1 = np.corrcoef(x[:-1], x[1:])[0, 1]
        theory = 2 ** (2 * h - 1) - 1
        assert lag1 == pytest.approx(theory, abs=0.03)

    def test_deterministic_for_seed(self):
        a = fractional_gaussian_noise(512, 0.6, rng=3)
        b = fractional_gaussian_noise(512, 0.6, rng=3)
        assert np.array_equal(a, b)

    def test_invalid_hurst_rejected(self):
        with pytest.raises(ValueError):
            fractional_gaussian_noise(128, 1.2)


class TestHurstEstimator:
    def test_white_noise_near_half(self):
        x = np.random.default_rng(11).standard_normal(4096)
        assert hurst_exponent(x).h == pytest.approx(0.5, abs=0.10)

    def test_fgn_recovers_known_h(self):
        x = fractional_gaussian_noise(4096, 0.72, rng=5)
        assert hurst_exponent(x).h == pytest.approx(0.72, abs=0.10)

    def test_scale_invariance(self):
        x = fractional_gaussian_noise(2048, 0.65, rng=9)
        base = hurst_exponent(x).h
        for factor in (0.01, 3.0, 1e6):
            assert hurst_exponent(x * factor).h == pytest.approx(base, abs=1e-12)

    def test_shuffle_destroys_memory(self):
        x = fractional_gaussian_noise(4096, 0.85, rng=13)
        assert hurst_exponent(x).h > 0.7
        shuffled = np.random.default_rng(14).permutation(x)
        assert hurst_exponent(shuffled).h == pytest.approx(0.5, abs=0.10)

    def test_constant_series_rejected(self):
        with pytest.raises(ValueError, match="zero variance"):
            hurst_exponent(np.ones(128))

    def test_short_series_rejected(self):
        with pytest.raises(ValueError, match="too short"):
            hurst_exponent(np.arange(16))

    def test_rs_points_exposed_for_fit_table(self):
        x = fractional_gaussian_noise(1024, 0.6, rng=2)
        result = hurst_exponent(x)
        # ladder 8, 16, ..., 512
        assert [round(np.exp(p[0])) for p in result.rs_points] == [
            8, 16, 32, 64, 128, 256, 512,
        ]
        assert result.fit_residual >= 0
