"""Butterworth and notch IIR filters in second-order sections, plus Welch PSD."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sp_signal

from .core import FrequencyBand, TimeSeries
from .errors import DesignError, EmptyResultError, ParameterError, TooShortError

__all__ = [
    "IirFilter",
    "PsdEstimate",
    "design_butter_bandpass",
    "design_highpass",
    "design_notch",
    "apply_iir",
    "welch_psd",
]


@dataclass(frozen=True)
class IirFilter:
    """Cascade of biquads; each row of ``sos`` is ``(b0, b1, b2, 1, a1, a2)``."""

    sos: np.ndarray
    description: str
    fs_hz: float | None = None

    def __post_init__(self):
        sos = np.array(self.sos, dtype=np.float64)
        if sos.ndim != 2 or sos.shape[1] != 6:
            raise ParameterError(f"sos must have shape (n, 6), got {sos.shape}")
        if not np.allclose(sos[:, 3], 1.0):
            raise ParameterError("sections must be normalized so that a0 == 1")
        sos.flags.writeable = False
        object.__setattr__(self, "sos", sos)
        radii = self.pole_radii()
        if radii.size and np.max(radii) >= 1.0:
            raise DesignError(f"{self.description}: unstable section, pole radius {np.max(radii)}")

    @property
    def sections(self) -> list[tuple[float, float, float, float, float]]:
        """``(b0, b1, b2, a1, a2)`` per section."""
        return [(r[0], r[1], r[2], r[4], r[5]) for r in self.sos]

    def pole_radii(self) -> np.ndarray:
        radii = [np.abs(np.roots([1.0, a1, a2])) for a1, a2 in self.sos[:, 4:6]]
        return np.concatenate(radii) if radii else np.zeros(0)

    def response(self, f_hz, fs: float | None = None) -> np.ndarray:
        fs = fs or self.fs_hz
        if fs is None:
            raise ParameterError("sample rate needed to evaluate the response")
        _, h = sp_signal.sosfreqz(np.array(self.sos), worN=np.atleast_1d(f_hz), fs=fs)
        return h


@dataclass(frozen=True)
class PsdEstimate:
    freqs_hz: np.ndarray
    power: np.ndarray
    resolution_hz: float

    def features(self) -> np.ndarray:
        """Power with the DC bin dropped."""
        return self.power[1:]

    def feature_freqs(self) -> np.ndarray:
        return self.freqs_hz[1:]


def _check_nyquist(freqs, fs: float, what: str) -> None:
    nyq = fs / 2.0
    for f in np.atleast_1d(freqs):
        if not (0 < f < nyq):
            raise DesignError(f"{what}: {f} Hz must lie strictly between 0 and Nyquist ({nyq} Hz)")


def design_butter_bandpass(band: FrequencyBand, fs: float, order: int = 10) -> IirFilter:
    """Butterworth bandpass with ``order`` poles in total (``order // 2`` biquads)."""
    if order < 2 or order % 2:
        raise ParameterError(f"bandpass order must be even and >= 2, got {order}")
    _check_nyquist([band.f_low_hz, band.f_high_hz], fs, f"bandpass {band.name!r}")
    sos = sp_signal.butter(order // 2, [band.f_low_hz, band.f_high_hz], btype="bandpass",
                           output="sos", fs=fs)
    return IirFilter(sos, f"butterworth bandpass {band.f_low_hz}-{band.f_high_hz} Hz, "
                          f"order {order}", fs)


def design_highpass(cutoff_hz: float, fs: float, order: int = 4) -> IirFilter:
    if order < 1:
        raise ParameterError(f"highpass order must be >= 1, got {order}")
    _check_nyquist(cutoff_hz, fs, "highpass cutoff")
    sos = sp_signal.butter(order, cutoff_hz, btype="highpass", output="sos", fs=fs)
    return IirFilter(sos, f"butterworth highpass {cutoff_hz} Hz, order {order}", fs)


def design_notch(freq_hz: float, fs: float, q: float = 30.0) -> IirFilter:
    if not q > 0:
        raise ParameterError(f"notch quality factor must be positive, got {q}")
    _check_nyquist(freq_hz, fs, "notch frequency")
    b, a = sp_signal.iirnotch(freq_hz, q, fs=fs)
    sos = np.concatenate([b / a[0], a / a[0]])[None, :]
    return IirFilter(sos, f"notch {freq_hz} Hz, Q {q}", fs)


def apply_iir(f: IirFilter, x: TimeSeries) -> TimeSeries:
    """Causal single pass, zero initial state."""
    if len(x) == 0:
        raise EmptyResultError("cannot filter an empty series")
    return TimeSeries(sp_signal.sosfilt(np.array(f.sos), np.array(x.samples)), x.sample_rate_hz)


def welch_psd(x: TimeSeries, seg_len: int | None = None, overlap: float = 0.5) -> PsdEstimate:
    """One-sided Welch density with Hann segments.

    The default segment of ``round(fs)`` samples gives 1 Hz bins, so the
    DC-free feature view holds ``floor(fs / 2)`` values.
    """
    fs = x.sample_rate_hz
    if seg_len is None:
        seg_len = int(round(fs))
    if seg_len < 2:
        raise ParameterError(f"seg_len must be >= 2, got {seg_len}")
    if not (0.0 <= overlap < 1.0):
        raise ParameterError(f"overlap must be in [0, 1), got {overlap}")
    if len(x) < seg_len:
        raise TooShortError(f"signal of {len(x)} samples is shorter than one "
                            f"{seg_len}-sample Welch segment")
    freqs, power = sp_signal.welch(np.array(x.samples), fs=fs, window="hann", nperseg=seg_len,
                                   noverlap=int(seg_len * overlap), detrend=False,
                                   return_onesided=True, scaling="density", average="mean")
    power = np.maximum(power, 0.0)
    return PsdEstimate(freqs, power, fs / seg_len)
