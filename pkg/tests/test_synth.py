import numpy as np
import pytest

from tkeo_eeg.core import CANONICAL_BANDS, FrequencyBand, WindowSpec
from tkeo_eeg.errors import ParameterError
from tkeo_eeg.spectral import welch_psd
from tkeo_eeg.synth import AmFmSpec, gen_am_fm, gen_labeled_dataset

THETA, ALPHA, BETA = CANONICAL_BANDS[1:4]


def test_pure_tone_truth():
    x, env, f = gen_am_fm(AmFmSpec(carrier_hz=10.0, duration_s=2.0), 250.0)
    assert len(x) == 500
    assert np.all(env.samples == 1.0)
    assert np.all(f.samples == 10.0)
    np.testing.assert_allclose(x.samples, np.cos(2 * np.pi * 10 * np.arange(500) / 250))


def test_am_envelope_bounds():
    _, env, _ = gen_am_fm(AmFmSpec(carrier_hz=10.0, am_depth=0.5, am_hz=1.0, amplitude=2.0,
                                   duration_s=4.0), 250.0)
    assert env.samples.min() == pytest.approx(1.0)
    assert env.samples.max() == pytest.approx(3.0)


def test_fm_law_exact():
    spec = AmFmSpec(carrier_hz=20.0, fm_deviation_hz=2.0, fm_hz=1.0, duration_s=2.0)
    _, _, f = gen_am_fm(spec, 200.0)
    n = np.arange(400)
    np.testing.assert_array_equal(f.samples, 20.0 + 2.0 * np.cos(2 * np.pi * 1.0 * (n / 200.0)))


def test_fm_phase_derivative_matches_truth():
    # numerical derivative of the unwrapped analytic phase, interior samples
    from scipy.signal import hilbert
    spec = AmFmSpec(carrier_hz=30.0, fm_deviation_hz=3.0, fm_hz=1.5, duration_s=8.0)
    x, _, f = gen_am_fm(spec, 250.0)
    ph = np.unwrap(np.angle(hilbert(x.samples)))
    est = np.gradient(ph) * 250.0 / (2 * np.pi)
    np.testing.assert_allclose(est[200:-200], f.samples[200:-200], atol=0.05)


def test_peak_bound_without_noise():
    spec = AmFmSpec(carrier_hz=12.0, am_depth=0.7, am_hz=2.0, fm_deviation_hz=1.0, fm_hz=1.0,
                    amplitude=1.5, duration_s=3.0)
    x, _, _ = gen_am_fm(spec, 250.0)
    assert np.max(np.abs(x.samples)) <= 1.5 * 1.7 + 1e-12


def test_deterministic_with_noise():
    spec = AmFmSpec(carrier_hz=10.0, noise_std=0.3)
    a, _, _ = gen_am_fm(spec, 250.0, seed=7)
    b, _, _ = gen_am_fm(spec, 250.0, seed=7)
    c, _, _ = gen_am_fm(spec, 250.0, seed=8)
    assert a.samples.tobytes() == b.samples.tobytes()
    assert a.samples.tobytes() != c.samples.tobytes()


@pytest.mark.parametrize("kwargs", [
    dict(carrier_hz=130.0),                              # above Nyquist at 250 Hz
    dict(carrier_hz=100.0, fm_deviation_hz=30.0, fm_hz=1.0),
    dict(carrier_hz=10.0, am_hz=3.0),                    # > carrier / 5
    dict(carrier_hz=10.0, fm_hz=2.5, fm_deviation_hz=1.0),
    dict(carrier_hz=10.0, fm_deviation_hz=1.0),          # deviation without rate
    dict(carrier_hz=10.0, am_depth=1.0),
    dict(carrier_hz=10.0, noise_std=-1.0),
])
def test_invalid_specs(kwargs):
    with pytest.raises(ParameterError):
        gen_am_fm(AmFmSpec(**kwargs), 250.0)


class TestLabeledDataset:
    def test_counts(self):
        recs, labels = gen_labeled_dataset(10, [THETA, ALPHA, BETA], 250.0, WindowSpec(4.0), 0)
        assert len(recs) == 30
        assert sorted(labels) == [0] * 10 + [1] * 10 + [2] * 10
        assert all(r.n_samples == 1000 for r in recs)

    def test_carrier_in_band_by_psd_peak(self):
        recs, _ = gen_labeled_dataset(1, [ALPHA], 250.0, WindowSpec(4.0), 3)
        psd = welch_psd(recs[0].channels[0][1])
        peak = psd.freqs_hz[np.argmax(psd.power)]
        assert 8.0 <= peak <= 12.0

    def test_deterministic(self):
        a = gen_labeled_dataset(3, [THETA, BETA], 250.0, WindowSpec(2.0), 11, n_channels=2)
        b = gen_labeled_dataset(3, [THETA, BETA], 250.0, WindowSpec(2.0), 11, n_channels=2)
        assert a[1] == b[1]
        for ra, rb in zip(a[0], b[0]):
            assert ra.as_array().tobytes() == rb.as_array().tobytes()

    def test_overlapping_bands(self):
        with pytest.raises(ParameterError):
            gen_labeled_dataset(2, [FrequencyBand("a", 4, 9), ALPHA], 250.0, WindowSpec(4.0))

    def test_touching_bands_allowed(self):
        gen_labeled_dataset(1, [CANONICAL_BANDS[3], CANONICAL_BANDS[4]], 250.0, WindowSpec(1.0))
