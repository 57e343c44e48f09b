import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tkeo_eeg.core import (BROADBAND, FrequencyBand, Recording, TimeSeries, WindowSpec,
                           canonical_band_set, clamp_band, segment_recording, segment_windows)
from tkeo_eeg.errors import EmptyResultError, LayoutError, ParameterError


class TestTimeSeries:
    def test_rejects_bad_rate(self):
        with pytest.raises(ParameterError):
            TimeSeries([1.0, 2.0], 0)

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ParameterError, match="index 1"):
            TimeSeries([0.0, bad, 1.0], 100.0)

    def test_samples_are_read_only(self):
        ts = TimeSeries([1.0, 2.0, 3.0], 10.0)
        with pytest.raises(ValueError):
            ts.samples[0] = 5.0

    def test_copies_caller_array(self):
        a = np.array([1.0, 2.0, 3.0])
        ts = TimeSeries(a, 10.0)
        a[0] = 99.0
        assert ts.samples[0] == 1.0


class TestRecording:
    def test_mismatched_lengths(self):
        with pytest.raises(LayoutError):
            Recording((("a", TimeSeries(np.zeros(4), 10)), ("b", TimeSeries(np.zeros(5), 10))))

    def test_mismatched_rates(self):
        with pytest.raises(LayoutError):
            Recording((("a", TimeSeries(np.zeros(4), 10)), ("b", TimeSeries(np.zeros(4), 20))))

    @pytest.mark.parametrize("names", [["a", "a"], ["a", ""]])
    def test_bad_names(self, names):
        with pytest.raises(LayoutError):
            Recording.from_array(np.zeros((2, 4)), 10, names)

    def test_from_array_roundtrip(self):
        data = np.arange(8.0).reshape(2, 4)
        rec = Recording.from_array(data, 10, ["C3", "C4"])
        assert rec.names == ["C3", "C4"]
        np.testing.assert_array_equal(rec.as_array(), data)
        np.testing.assert_array_equal(rec["C4"].samples, data[1])


class TestBands:
    def test_canonical_values(self):
        bs = canonical_band_set()
        assert bs.names == ["delta", "theta", "alpha", "beta", "gamma"]
        assert (bs["alpha"].f_low_hz, bs["alpha"].f_high_hz) == (8.0, 12.0)
        assert (bs["gamma"].f_low_hz, bs["gamma"].f_high_hz) == (30.0, 50.0)
        assert (bs["delta"].f_low_hz, bs["delta"].f_high_hz) == (0.5, 3.0)
        assert (bs["theta"].f_low_hz, bs["theta"].f_high_hz) == (4.0, 7.0)
        assert (bs["beta"].f_low_hz, bs["beta"].f_high_hz) == (13.0, 30.0)
        assert bs.broadband.name == "broadband"
        assert (bs.broadband.f_low_hz, bs.broadband.f_high_hz) == (0.5, 100.0)

    def test_gaps_kept(self):
        bs = canonical_band_set()
        assert bs["theta"].f_high_hz == 7.0 and bs["alpha"].f_low_hz == 8.0

    @pytest.mark.parametrize("lo,hi", [(0, 1), (5, 5), (6, 4), (-1, 3)])
    def test_invalid_band(self, lo, hi):
        with pytest.raises(ParameterError):
            FrequencyBand("x", lo, hi)

    def test_clamp_above_nyquist(self):
        with pytest.warns(UserWarning, match="clamped"):
            b = clamp_band(BROADBAND, 200.0)
        assert b.f_high_hz == pytest.approx(90.0)
        assert clamp_band(BROADBAND, 250.0) is BROADBAND


class TestSegmentWindows:
    def _series(self, n, fs=1.0):
        return TimeSeries(np.arange(n, dtype=float), fs)

    def test_no_overlap_drops_tail(self):
        wins = segment_windows(self._series(10), WindowSpec(4, 0.0))
        assert [w.samples.tolist() for w in wins] == [[0, 1, 2, 3], [4, 5, 6, 7]]

    def test_half_overlap(self):
        wins = segment_windows(self._series(10), WindowSpec(4, 0.5))
        assert [w.samples[0] for w in wins] == [0, 2, 4, 6]

    def test_too_short(self):
        with pytest.raises(EmptyResultError):
            segment_windows(self._series(3), WindowSpec(4, 0.0))

    def test_malformed_spec_is_distinct_error(self):
        with pytest.raises(ParameterError):
            WindowSpec(4, 1.0)
        with pytest.raises(ParameterError):
            segment_windows(self._series(10), WindowSpec(2, 0.0))  # < 3 samples
        with pytest.raises(ParameterError):
            segment_windows(self._series(10), WindowSpec(3, 0.9))  # hop rounds to 0

    def test_window_samples_floor(self):
        assert WindowSpec(4.0).window_samples(250) == 1000
        assert WindowSpec(0.0999).window_samples(100) == 9

    def test_preserves_rate(self):
        wins = segment_windows(self._series(20, fs=5.0), WindowSpec(1.0))
        assert all(w.sample_rate_hz == 5.0 for w in wins)

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(3, 300), win=st.integers(3, 60),
           overlap=st.floats(0.0, 0.95), fs=st.sampled_from([1.0, 10.0, 250.0]))
    def test_count_and_bitwise_slices(self, n, win, overlap, fs):
        spec = WindowSpec(win / fs, overlap)
        w = spec.window_samples(fs)
        hop = spec.hop_samples(fs)
        if hop < 1 or w < 3 or n < w:
            return
        data = np.random.default_rng(n).normal(size=n)
        wins = segment_windows(TimeSeries(data, fs), spec)
        assert len(wins) == (n - w) // hop + 1
        for i, ws in enumerate(wins):
            assert len(ws) == w
            assert ws.samples.tobytes() == data[i * hop:i * hop + w].tobytes()

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(3, 200), win=st.integers(3, 50))
    def test_concatenation_is_prefix(self, n, win):
        if n < win:
            return
        data = np.random.default_rng(win).normal(size=n)
        wins = segment_windows(TimeSeries(data, 1.0), WindowSpec(float(win)))
        cat = np.concatenate([w.samples for w in wins])
        np.testing.assert_array_equal(cat, data[:cat.size])

    def test_segment_recording_lockstep(self):
        rec = Recording.from_array(np.vstack([np.arange(10.0), -np.arange(10.0)]), 1.0, ["a", "b"])
        wins = segment_recording(rec, WindowSpec(4))
        assert len(wins) == 2
        np.testing.assert_array_equal(wins[1]["b"].samples, -np.arange(4.0, 8.0))
