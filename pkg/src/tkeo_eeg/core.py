"""Signal containers, frequency bands and window segmentation."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import EmptyResultError, LayoutError, ParameterError

__all__ = [
    "TimeSeries",
    "Recording",
    "FrequencyBand",
    "BandSet",
    "WindowSpec",
    "CANONICAL_BANDS",
    "BROADBAND",
    "canonical_band_set",
    "clamp_band",
    "segment_windows",
    "segment_recording",
]


def _frozen_array(values, *, copy: bool = True) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=copy)
    if arr.ndim != 1:
        raise ParameterError(f"samples must be one-dimensional, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real signal.

    ``samples`` is stored as a read-only float64 array. Non-finite values
    are rejected at construction.
    """

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        if not (self.sample_rate_hz > 0) or not math.isfinite(self.sample_rate_hz):
            raise ParameterError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        arr = self.samples
        if not (isinstance(arr, np.ndarray) and arr.dtype == np.float64 and arr.ndim == 1
                and not arr.flags.writeable):
            arr = _frozen_array(arr)
        if arr.size and not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ParameterError(f"non-finite sample at index {bad}")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def with_samples(self, samples) -> "TimeSeries":
        return TimeSeries(samples, self.sample_rate_hz)

    def scaled(self, c: float) -> "TimeSeries":
        return TimeSeries(self.samples * c, self.sample_rate_hz)


@dataclass(frozen=True)
class Recording:
    """Named channels sharing one sample rate and length."""

    channels: tuple[tuple[str, TimeSeries], ...]

    def __post_init__(self):
        chans = tuple((str(name), ts) for name, ts in self.channels)
        if not chans:
            raise LayoutError("a recording needs at least one channel")
        names = [n for n, _ in chans]
        if any(not n for n in names):
            raise LayoutError("channel names must be non-empty")
        if len(set(names)) != len(names):
            raise LayoutError(f"duplicate channel names in {names}")
        fs0, n0 = chans[0][1].sample_rate_hz, len(chans[0][1])
        for name, ts in chans[1:]:
            if ts.sample_rate_hz != fs0:
                raise LayoutError(
                    f"channel {name!r} has sample rate {ts.sample_rate_hz}, expected {fs0}")
            if len(ts) != n0:
                raise LayoutError(f"channel {name!r} has {len(ts)} samples, expected {n0}")
        object.__setattr__(self, "channels", chans)

    @classmethod
    def from_array(cls, data, sample_rate_hz: float, names: Sequence[str]) -> "Recording":
        """Build from a ``(n_channels, n_samples)`` array."""
        data = np.asarray(data, dtype=np.float64)
        if data.ndim == 1:
            data = data[None, :]
        if data.shape[0] != len(names):
            raise LayoutError(f"{data.shape[0]} rows but {len(names)} channel names")
        return cls(tuple((n, TimeSeries(row, sample_rate_hz)) for n, row in zip(names, data)))

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.channels]

    @property
    def sample_rate_hz(self) -> float:
        return self.channels[0][1].sample_rate_hz

    @property
    def n_samples(self) -> int:
        return len(self.channels[0][1])

    def __iter__(self) -> Iterator[tuple[str, TimeSeries]]:
        return iter(self.channels)

    def __len__(self) -> int:
        return len(self.channels)

    def __getitem__(self, name: str) -> TimeSeries:
        for n, ts in self.channels:
            if n == name:
                return ts
        raise KeyError(name)

    def as_array(self) -> np.ndarray:
        return np.vstack([ts.samples for _, ts in self.channels])

    def map(self, fn) -> "Recording":
        """Apply ``fn(TimeSeries) -> TimeSeries`` to every channel."""
        return Recording(tuple((n, fn(ts)) for n, ts in self.channels))


@dataclass(frozen=True)
class FrequencyBand:
    name: str
    f_low_hz: float
    f_high_hz: float

    def __post_init__(self):
        if not (0 < self.f_low_hz < self.f_high_hz):
            raise ParameterError(
                f"band {self.name!r} needs 0 < f_low < f_high, got "
                f"[{self.f_low_hz}, {self.f_high_hz}]")

    @property
    def width_hz(self) -> float:
        return self.f_high_hz - self.f_low_hz

    def contains(self, f_hz: float) -> bool:
        return self.f_low_hz <= f_hz <= self.f_high_hz

    def overlaps(self, other: "FrequencyBand") -> bool:
        return self.f_low_hz < other.f_high_hz and other.f_low_hz < self.f_high_hz


CANONICAL_BANDS = (
    FrequencyBand("delta", 0.5, 3.0),
    FrequencyBand("theta", 4.0, 7.0),
    FrequencyBand("alpha", 8.0, 12.0),
    FrequencyBand("beta", 13.0, 30.0),
    FrequencyBand("gamma", 30.0, 50.0),
)
BROADBAND = FrequencyBand("broadband", 0.5, 100.0)


@dataclass(frozen=True)
class BandSet:
    """The five canonical EEG bands plus the broadband range."""

    bands: tuple[FrequencyBand, ...]
    broadband: FrequencyBand = BROADBAND

    def __iter__(self) -> Iterator[FrequencyBand]:
        return iter(self.bands)

    def __len__(self) -> int:
        return len(self.bands)

    def __getitem__(self, name: str) -> FrequencyBand:
        if name == self.broadband.name:
            return self.broadband
        for b in self.bands:
            if b.name == name:
                return b
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.bands]


def canonical_band_set() -> BandSet:
    return BandSet(CANONICAL_BANDS, BROADBAND)


def clamp_band(band: FrequencyBand, fs: float) -> FrequencyBand:
    """Pull an upper edge at or above Nyquist down to ``0.45 * fs``.

    Emits a ``UserWarning`` when clamping happens.
    """
    nyq = fs / 2.0
    if band.f_high_hz < nyq:
        return band
    new_high = 0.45 * fs
    warnings.warn(
        f"band {band.name!r} upper edge {band.f_high_hz} Hz is not below Nyquist "
        f"({nyq} Hz); clamped to {new_high} Hz", UserWarning, stacklevel=2)
    return FrequencyBand(band.name, band.f_low_hz, new_high)


@dataclass(frozen=True)
class WindowSpec:
    window_seconds: float
    overlap_fraction: float = 0.0

    def __post_init__(self):
        if not (self.window_seconds > 0):
            raise ParameterError(f"window_seconds must be positive, got {self.window_seconds}")
        if not (0.0 <= self.overlap_fraction < 1.0):
            raise ParameterError(f"overlap_fraction must be in [0, 1), got {self.overlap_fraction}")

    def window_samples(self, fs: float) -> int:
        # small epsilon so e.g. 4.0 s * 250 Hz is not floored to 999
        return int(math.floor(self.window_seconds * fs + 1e-9))

    def hop_samples(self, fs: float) -> int:
        return int(round(self.window_samples(fs) * (1.0 - self.overlap_fraction)))

    def validate(self, fs: float) -> tuple[int, int]:
        """Return ``(window, hop)`` in samples or raise ``ParameterError``."""
        win = self.window_samples(fs)
        if win < 3:
            raise ParameterError(f"window of {win} samples at {fs} Hz; at least 3 needed")
        hop = self.hop_samples(fs)
        if hop < 1:
            raise ParameterError(
                f"overlap {self.overlap_fraction} leaves no advance for a {win}-sample window")
        return win, hop


def segment_windows(series: TimeSeries, spec: WindowSpec) -> list[TimeSeries]:
    """Cut ``series`` into fixed-length windows; the trailing partial window is dropped.

    Windows are views on the source samples, so their values are bitwise
    identical to the corresponding input slice.
    """
    win, hop = spec.validate(series.sample_rate_hz)
    n = len(series)
    if n < win:
        raise EmptyResultError(
            f"series of {n} samples is shorter than one {win}-sample window")
    starts = range(0, n - win + 1, hop)
    return [TimeSeries(series.samples[s:s + win], series.sample_rate_hz) for s in starts]


def segment_recording(rec: Recording, spec: WindowSpec) -> list[Recording]:
    """Window every channel of ``rec`` in lockstep."""
    per_channel = [segment_windows(ts, spec) for _, ts in rec]
    names = rec.names
    return [Recording(tuple(zip(names, wins))) for wins in zip(*per_channel)]
