import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tkeo_eeg.core import CANONICAL_BANDS, FrequencyBand, TimeSeries
from tkeo_eeg.errors import DesignError, ParameterError, TooShortError
from tkeo_eeg.gabor import (apply_filter, build_filterbank, center_frequencies,
                            select_max_energy_subband)

from conftest import psi, tone

ALPHA, BETA = CANONICAL_BANDS[2], CANONICAL_BANDS[3]
FS = 250.0


def dtft(h, f, fs):
    """Direct sum over the centered kernel; independent of the module's helper."""
    half = (len(h) - 1) // 2
    return sum(h[i] * np.exp(-2j * np.pi * f * (i - half) / fs) for i in range(len(h)))


def interior(x, f):
    half = (len(f) - 1) // 2
    return x[half:-half]


class TestConstruction:
    def test_alpha_four(self):
        fb = build_filterbank(ALPHA, 4, FS)
        assert fb.centers_hz.tolist() == [8.0, 9.0, 10.0, 11.0]
        assert fb.step_hz == 1.0
        assert all(f.sigma_f_hz == 0.5 for f in fb)

    def test_single_filter_at_f_low(self):
        fb = build_filterbank(BETA, 1, FS)
        assert fb.centers_hz.tolist() == [13.0]

    def test_beta_25(self):
        fb = build_filterbank(BETA, 25, FS)
        assert fb.step_hz == pytest.approx(0.68)
        assert fb.centers_hz[0] == 13.0
        assert fb.centers_hz[-1] == pytest.approx(29.32)

    def test_kernel_length_formula(self):
        fb = build_filterbank(ALPHA, 4, FS)
        sigma_t = 1 / (2 * np.pi * 0.5)
        assert len(fb.filters[0]) == 2 * math.ceil(4 * sigma_t * FS) + 1

    def test_kernels_symmetric_and_unit_gain(self):
        for f in build_filterbank(BETA, 6, FS):
            np.testing.assert_array_equal(f.kernel, f.kernel[::-1])
            assert abs(dtft(f.kernel, f.center_hz, FS)) == pytest.approx(1.0, abs=1e-3)
            assert abs(f.response(f.center_hz)[0]) == pytest.approx(1.0, abs=1e-9)

    def test_nyquist(self):
        with pytest.raises(DesignError):
            build_filterbank(FrequencyBand("g", 30, 50), 4, 100.0)

    def test_bad_count(self):
        with pytest.raises(ParameterError):
            build_filterbank(ALPHA, 0, FS)

    def test_kernel_cap(self):
        fb = build_filterbank(CANONICAL_BANDS[0], 25, FS, max_kernel_len=1000)
        assert all(len(f) <= 1000 for f in fb)
        assert fb.filters[0].sigma_f_hz > fb.step_hz / 2
        assert fb.centers_hz.tolist() == build_filterbank(CANONICAL_BANDS[0], 25, FS).centers_hz.tolist()
        short = build_filterbank(ALPHA, 4, FS, max_kernel_len=10_000)
        assert len(short.filters[0]) == len(build_filterbank(ALPHA, 4, FS).filters[0])

    @settings(max_examples=50, deadline=None)
    @given(lo=st.floats(0.5, 60), width=st.floats(0.5, 50), n=st.integers(1, 60))
    def test_center_grid(self, lo, width, n):
        band = FrequencyBand("b", lo, lo + width)
        c = center_frequencies(band, n)
        step = (band.f_high_hz - band.f_low_hz) / n
        for k, ck in enumerate(c):
            assert ck == band.f_low_hz + k * step
        assert np.all(np.diff(c) > 0)


class TestApply:
    def test_center_tone_unit_amplitude_zero_phase(self):
        fb = build_filterbank(ALPHA, 4, FS)
        f = fb.filters[2]
        x = tone(10.0, FS, 5000, phase=0.7)
        y = apply_filter(f, x)
        assert len(y) == len(x) and y.sample_rate_hz == FS
        yi, xi = interior(y.samples, f), interior(x.samples, f)
        amp = np.sqrt(2 * np.mean(yi ** 2))
        assert amp == pytest.approx(1.0, rel=0.01)
        # phase via projection on the input
        corr = np.dot(yi, xi) / np.sqrt(np.dot(yi, yi) * np.dot(xi, xi))
        assert np.degrees(np.arccos(min(corr, 1.0))) < 1.0

    def test_far_tone_rejected(self):
        f = build_filterbank(ALPHA, 4, FS).filters[1]
        x = tone(f.center_hz + 5 * f.sigma_f_hz, FS, 5000)
        y = apply_filter(f, x)
        rms = lambda v: np.sqrt(np.mean(v ** 2))
        assert rms(interior(y.samples, f)) < 0.05 * rms(x.samples)
        assert abs(dtft(f.kernel, f.center_hz + 5 * f.sigma_f_hz, FS)) < 0.05

    def test_zero_in_zero_out(self):
        f = build_filterbank(ALPHA, 4, FS).filters[0]
        assert np.all(apply_filter(f, TimeSeries(np.zeros(2000), FS)).samples == 0)

    def test_too_short(self):
        f = build_filterbank(ALPHA, 4, FS).filters[0]
        with pytest.raises(TooShortError):
            apply_filter(f, TimeSeries(np.zeros(len(f) - 1), FS))

    def test_matches_direct_convolution(self, rng):
        f = build_filterbank(BETA, 4, FS).filters[1]
        x = rng.normal(size=3000)
        ref = np.convolve(x, f.kernel, mode="same")
        np.testing.assert_allclose(apply_filter(f, TimeSeries(x, FS)).samples, ref, atol=1e-10)

    def test_monotone_gain(self):
        f = build_filterbank(BETA, 8, FS).filters[3]
        offsets = np.linspace(0, 4 * f.sigma_f_hz, 9)
        gains = []
        for d in offsets:
            y = apply_filter(f, tone(f.center_hz + d, FS, 6000))
            gains.append(np.sqrt(np.mean(interior(y.samples, f) ** 2)))
        assert all(a >= b for a, b in zip(gains, gains[1:]))


class TestSelection:
    def _brute(self, fb, x):
        return [np.mean(psi(np.convolve(x.samples, f.kernel, mode="same"))) for f in fb]

    def test_alpha_tone(self):
        fb = build_filterbank(ALPHA, 4, FS)
        x = tone(10.0, FS, 2500)
        idx, nb, energy = select_max_energy_subband(fb, x)
        brute = self._brute(fb, x)
        assert idx == int(np.argmax(brute)) == 2
        assert energy == pytest.approx(brute[idx], rel=1e-9)
        np.testing.assert_allclose(nb.samples, apply_filter(fb.filters[2], x).samples)

    def test_white_noise_brute_force(self, rng):
        fb = build_filterbank(BETA, 10, FS)
        x = TimeSeries(rng.normal(size=4000), FS)
        idx, _, energy = select_max_energy_subband(fb, x)
        brute = self._brute(fb, x)
        assert energy == pytest.approx(max(brute), rel=1e-9)
        assert idx == int(np.argmax(brute))

    def test_zero_signal_tie(self):
        fb = build_filterbank(ALPHA, 4, FS)
        idx, nb, energy = select_max_energy_subband(fb, TimeSeries(np.zeros(1000), FS))
        assert (idx, energy) == (0, 0.0)

    def test_deterministic(self, rng):
        fb = build_filterbank(BETA, 12, FS)
        x = TimeSeries(rng.normal(size=2000), FS)
        assert select_max_energy_subband(fb, x)[0] == select_max_energy_subband(fb, x)[0]
