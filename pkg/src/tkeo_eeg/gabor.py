"""Uniform Gabor filterbanks and maximum-energy subband selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .core import FrequencyBand, TimeSeries
from .errors import DesignError, ParameterError, TooShortError
from .tkeo import teager_kaiser

__all__ = [
    "GaborFilter",
    "GaborFilterbank",
    "center_frequencies",
    "gabor_kernel",
    "build_filterbank",
    "apply_filter",
    "select_max_energy_subband",
]

# kernel support in units of the Gaussian time std
_SUPPORT_SIGMAS = 4.0


@dataclass(frozen=True)
class GaborFilter:
    center_hz: float
    sigma_f_hz: float
    kernel: np.ndarray
    fs_hz: float

    def __len__(self) -> int:
        return self.kernel.shape[0]

    @property
    def sigma_t_s(self) -> float:
        return 1.0 / (2.0 * math.pi * self.sigma_f_hz)

    def response(self, f_hz) -> np.ndarray:
        """Complex frequency response (DTFT of the centered kernel) at ``f_hz``."""
        f = np.atleast_1d(np.asarray(f_hz, dtype=np.float64))
        half = (len(self) - 1) // 2
        n = np.arange(-half, half + 1)
        w = 2 * np.pi * f[:, None] / self.fs_hz
        return np.exp(-1j * w * n[None, :]) @ self.kernel


@dataclass(frozen=True)
class GaborFilterbank:
    band: FrequencyBand
    filters: tuple[GaborFilter, ...]

    @property
    def n_filters(self) -> int:
        return len(self.filters)

    @property
    def centers_hz(self) -> np.ndarray:
        return np.array([f.center_hz for f in self.filters])

    @property
    def step_hz(self) -> float:
        return self.band.width_hz / self.n_filters

    def __iter__(self):
        return iter(self.filters)

    def __len__(self) -> int:
        return len(self.filters)


def center_frequencies(band: FrequencyBand, n_filters: int) -> np.ndarray:
    """``f_low + k * (f_high - f_low) / N`` for ``k = 0 .. N-1``."""
    if n_filters < 1:
        raise ParameterError(f"n_filters must be >= 1, got {n_filters}")
    step = (band.f_high_hz - band.f_low_hz) / n_filters
    return band.f_low_hz + np.arange(n_filters) * step


def gabor_kernel(center_hz: float, sigma_t_s: float, fs: float, half_len: int) -> np.ndarray:
    """Gaussian-windowed cosine, scaled to unit gain at ``center_hz``."""
    n = np.arange(-half_len, half_len + 1)
    t = n / fs
    h = np.exp(-0.5 * (t / sigma_t_s) ** 2) * np.cos(2 * np.pi * center_hz * t)
    # h is even, so its DTFT at the center is real: sum h[n] cos(w n)
    gain = float(np.dot(h, np.cos(2 * np.pi * center_hz * n / fs)))
    if not gain > 0:
        raise DesignError(f"Gabor kernel at {center_hz} Hz has no gain at its center")
    h = h / gain
    h.flags.writeable = False
    return h


def build_filterbank(band: FrequencyBand, n_filters: int, fs: float,
                     max_kernel_len: int | None = None) -> GaborFilterbank:
    """Uniform Gabor filterbank over ``band``.

    Every filter has frequency-domain std ``sigma_f = step / 2`` and a kernel
    of ``2 * ceil(4 * sigma_t * fs) + 1`` taps, ``sigma_t = 1 / (2 pi sigma_f)``.

    ``max_kernel_len`` caps the tap count. When the design above is longer,
    the Gaussian is narrowed in time (and so widened in frequency) until the
    kernel fits; this is what lets fine banks run on short windows.
    """
    if n_filters < 1:
        raise ParameterError(f"n_filters must be >= 1, got {n_filters}")
    if not fs > 0:
        raise ParameterError(f"fs must be positive, got {fs}")
    if band.f_high_hz >= fs / 2.0:
        raise DesignError(
            f"band {band.name!r} upper edge {band.f_high_hz} Hz is not below "
            f"Nyquist ({fs / 2.0} Hz)")
    if max_kernel_len is not None and max_kernel_len < 3:
        raise ParameterError(f"max_kernel_len must be >= 3, got {max_kernel_len}")

    centers = center_frequencies(band, n_filters)
    step = band.width_hz / n_filters
    sigma_f = step / 2.0
    sigma_t = 1.0 / (2.0 * math.pi * sigma_f)
    half = int(math.ceil(_SUPPORT_SIGMAS * sigma_t * fs))
    if max_kernel_len is not None:
        cap = (max_kernel_len - 1) // 2
        if half > cap:
            half = cap
            sigma_t = cap / (_SUPPORT_SIGMAS * fs)
            sigma_f = 1.0 / (2.0 * math.pi * sigma_t)
    filters = tuple(
        GaborFilter(float(fc), sigma_f, gabor_kernel(float(fc), sigma_t, fs, half), float(fs))
        for fc in centers)
    return GaborFilterbank(band, filters)


def _check_length(f: GaborFilter, n: int) -> None:
    if n < len(f):
        raise TooShortError(
            f"signal of {n} samples is shorter than the {len(f)}-tap kernel "
            f"at {f.center_hz:g} Hz")


def apply_filter(f: GaborFilter, x: TimeSeries) -> TimeSeries:
    """Zero-phase filtering by centered convolution (zero-padded edges, same length)."""
    _check_length(f, len(x))
    return TimeSeries(fftconvolve(x.samples, f.kernel, mode="same"), x.sample_rate_hz)


def select_max_energy_subband(fb: GaborFilterbank, x: TimeSeries
                              ) -> tuple[int, TimeSeries, float]:
    """Filter ``x`` through every subband and keep the one with the largest mean TKEO.

    Returns ``(index, narrowband_signal, mean_energy)``; ties go to the lowest index.
    """
    best_idx, best_out, best_energy = -1, None, -np.inf
    for k, f in enumerate(fb.filters):
        out = apply_filter(f, x)
        energy = float(np.mean(teager_kaiser(out.samples)))
        if energy > best_energy:
            best_idx, best_out, best_energy = k, out, energy
    return best_idx, best_out, best_energy
