import math

import numpy as np
import pytest

import awd
from awd.errors import ConfigurationError
from awd.source import spatial_kernel


class TestWavelet:
    def test_ricker_peak_is_one_at_delay(self):
        w = awd.Wavelet(kind="ricker", f0=10.0, t0=0.3)
        assert awd.wavelet_value(w, 0.3) == 1.0

    def test_ricker_zero_crossing(self):
        # root of 1 - 2 pi^2 f0^2 tau^2 = 0 at tau = 1/(pi f0 sqrt(2))
        f0 = 10.0
        tau_star = 1.0 / (math.pi * f0 * math.sqrt(2.0))
        assert tau_star == pytest.approx(0.0225, abs=2e-4)
        w = awd.Wavelet(kind="ricker", f0=f0, t0=0.5)
        assert abs(awd.wavelet_value(w, 0.5 + tau_star)) < 1e-12
        assert abs(awd.wavelet_value(w, 0.5 - tau_star)) < 1e-12

    def test_gaussian_pulse_width(self):
        w = awd.Wavelet(kind="gaussian-pulse", tau_w=0.2, t0=1.0)
        assert awd.wavelet_value(w, 1.2) == pytest.approx(math.exp(-0.5))
        assert awd.wavelet_value(w, 1.0) == 1.0

    def test_invalid_parameters(self):
        with pytest.raises(ConfigurationError):
            awd.Wavelet(kind="ricker", f0=0.0)
        with pytest.raises(ConfigurationError):
            awd.Wavelet(kind="gaussian-pulse", tau_w=-1.0)
        with pytest.raises(ConfigurationError):
            awd.Wavelet(kind="ricker", f0=5.0, t0=-0.1)
        with pytest.raises(ConfigurationError):
            awd.Wavelet(kind="sine", f0=5.0)


class TestForceField:
    def test_zero_wavelet_gives_zero_field(self, grid64):
        f0 = 10.0
        tau_star = 1.0 / (math.pi * f0 * math.sqrt(2.0))
        src = awd.SourceSpec(epicenter=(0.0, 0.0), sigma=2.0,
                             wavelet=awd.Wavelet(kind="ricker", f0=f0, t0=0.5))
        w = awd.wavelet_value(src.wavelet, 0.5 + tau_star)
        field = awd.force_field(src, grid64, 0.5 + tau_star)
        assert abs(w) < 1e-12
        assert np.abs(field.values).max() < 1e-12
        # far past the support the envelope underflows to exactly zero
        assert awd.wavelet_value(src.wavelet, 1e6) == 0.0
        far = awd.force_field(src, grid64, 1e6)
        assert np.all(far.values == 0.0)

    def test_value_at_epicenter_node(self):
        # 65-point axis puts a node exactly at the origin
        g = awd.make_grid(2, [65, 65], [64.0, 64.0])
        src = awd.SourceSpec(epicenter=(0.0, 0.0), amplitude=2.5, sigma=2.0,
                             wavelet=awd.Wavelet(kind="ricker", f0=5.0, t0=0.1))
        field = awd.force_field(src, g, 0.1)
        assert field.values[32, 32] == 2.5

    def test_kernel_sum_matches_gaussian_integral(self, grid64):
        # total mass of the sampled kernel vs the continuous 2 pi sigma^2 / h^2
        for sigma in (3.0, 4.0):
            src = awd.SourceSpec(epicenter=(0.0, 0.0), sigma=sigma)
            total = spatial_kernel(src, grid64).sum()
            expected = 2.0 * math.pi * sigma**2
            assert total == pytest.approx(expected, rel=0.01)

    def test_amplitude_linearity_exact(self, grid64):
        wav = awd.Wavelet(kind="ricker", f0=8.0, t0=0.05)
        one = awd.force_field(
            awd.SourceSpec(epicenter=(3.0, -2.0), amplitude=1.25, sigma=2.0,
                           wavelet=wav), grid64, 0.07)
        two = awd.force_field(
            awd.SourceSpec(epicenter=(3.0, -2.0), amplitude=2.5, sigma=2.0,
                           wavelet=wav), grid64, 0.07)
        assert np.array_equal(two.values, 2.0 * one.values)

    def test_truncation_is_bounded(self, grid64):
        src = awd.SourceSpec(epicenter=(0.0, 0.0), amplitude=1.0, sigma=2.0)
        kernel = spatial_kernel(src, grid64)
        coords = grid64.coordinate_arrays()
        r2 = (coords[0] ** 2) + (coords[1] ** 2)
        untruncated = np.exp(-r2 / (2.0 * src.sigma**2))
        assert np.abs(kernel - untruncated).max() <= 1e-12

    def test_axis_permutation_symmetry(self, grid64):
        src = awd.SourceSpec(epicenter=(4.0, -7.0), sigma=3.0)
        swapped = awd.SourceSpec(epicenter=(-7.0, 4.0), sigma=3.0)
        a = spatial_kernel(src, grid64)
        b = spatial_kernel(swapped, grid64)
        assert np.array_equal(a, b.T)

    def test_margin_validation(self, grid64):
        # domain half-extent 31.5; epicenter must keep 2 sigma of margin
        src = awd.SourceSpec(epicenter=(28.0, 0.0), sigma=2.0)
        with pytest.raises(ConfigurationError):
            src.validate(grid64)
        awd.SourceSpec(epicenter=(27.0, 0.0), sigma=2.0).validate(grid64)

    def test_sigma_below_spacing_rejected(self):
        g = awd.make_grid(2, [32, 32], [62.0, 62.0])  # spacing 2 m
        with pytest.raises(ConfigurationError):
            awd.SourceSpec(epicenter=(0.0, 0.0), sigma=1.0).validate(g)

    def test_dimension_mismatch(self, grid64):
        with pytest.raises(ConfigurationError):
            awd.SourceSpec(epicenter=(0.0, 0.0, 0.0), sigma=2.0).validate(grid64)
