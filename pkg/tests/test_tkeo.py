import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from tkeo_eeg.core import TimeSeries
from tkeo_eeg.errors import EmptyResultError, TooShortError
from tkeo_eeg.tkeo import EnergySeries, mean_tkeo, teager_kaiser, tkeo

from conftest import psi

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_three_samples():
    e = tkeo(TimeSeries([1.0, 2.0, 3.0], 1.0))
    assert e.values.tolist() == [1.0]
    assert e.valid_offset == 1


def test_constant_is_zero():
    e = tkeo(TimeSeries(np.full(10, 5.0), 1.0))
    assert len(e) == 8
    assert np.all(e.values == 0.0)


def test_tone_closed_form():
    # Psi[A cos(Wn + phi)] = A^2 sin^2 W; here A = 2, W = pi/5
    n = np.arange(200)
    e = tkeo(TimeSeries(2 * np.cos(np.pi * n / 5 + 0.3), 1.0))
    np.testing.assert_allclose(e.values, 1.381966011250105, rtol=1e-9)


def test_negative_values_kept():
    e = teager_kaiser(np.array([1.0, 0.0, 1.0, 0.0, 1.0, 0.0]))
    assert e.tolist() == [-1.0, 1.0, -1.0, 1.0]


def test_too_short():
    with pytest.raises(TooShortError):
        tkeo(TimeSeries([1.0, 2.0], 1.0))


def test_matches_loop_reference(rng):
    x = rng.normal(size=50)
    np.testing.assert_allclose(teager_kaiser(x), psi(x), rtol=0, atol=1e-12)


class TestMean:
    def test_ones(self):
        assert mean_tkeo(EnergySeries(np.ones(3), 1.0)) == 1.0

    def test_pair(self):
        assert mean_tkeo(EnergySeries(np.array([0.0, 2.0]), 1.0)) == 1.0

    def test_quarter_pi_tone(self):
        n = np.arange(400)
        assert mean_tkeo(tkeo(TimeSeries(np.cos(np.pi * n / 4), 1.0))) == pytest.approx(0.5, rel=1e-9)

    def test_empty(self):
        with pytest.raises(EmptyResultError):
            mean_tkeo(EnergySeries(np.zeros(0), 1.0))


@settings(max_examples=80, deadline=None)
@given(x=arrays(np.float64, st.integers(3, 80), elements=finite), c=st.floats(-50, 50))
def test_scaling_and_sign(x, c):
    if 0 < abs(c) < 1e-100:
        c = 0.0  # keep c**2 out of the subnormal range
    base = teager_kaiser(x)
    scale = max(1.0, np.max(np.abs(x)) ** 2)
    np.testing.assert_allclose(teager_kaiser(c * x), c * c * base, rtol=1e-12,
                               atol=1e-12 * c * c * scale)
    np.testing.assert_array_equal(teager_kaiser(-x), base)


@settings(max_examples=60, deadline=None)
@given(amp=st.floats(0.1, 10), omega=st.floats(0.05 * np.pi, 0.95 * np.pi),
       phi=st.floats(0, 2 * np.pi))
def test_tone_law_phase_invariant(amp, omega, phi):
    n = np.arange(256)
    e = teager_kaiser(amp * np.cos(omega * n + phi))
    np.testing.assert_allclose(e, amp ** 2 * np.sin(omega) ** 2, rtol=1e-9)
