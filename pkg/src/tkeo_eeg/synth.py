"""Synthetic AM-FM signals with analytic envelope and instantaneous frequency."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FrequencyBand, Recording, TimeSeries, WindowSpec
from .errors import ParameterError

__all__ = ["AmFmSpec", "gen_am_fm", "gen_labeled_dataset"]


@dataclass(frozen=True)
class AmFmSpec:
    carrier_hz: float
    am_depth: float = 0.0
    am_hz: float = 0.0
    fm_deviation_hz: float = 0.0
    fm_hz: float = 0.0
    amplitude: float = 1.0
    duration_s: float = 4.0
    noise_std: float = 0.0
    phase_rad: float = 0.0

    def validate(self, fs: float) -> None:
        if not (fs > 0):
            raise ParameterError(f"sample rate must be positive, got {fs}")
        if not (self.carrier_hz > 0):
            raise ParameterError("carrier_hz must be positive")
        if not (0.0 <= self.am_depth < 1.0):
            raise ParameterError(f"am_depth must be in [0, 1), got {self.am_depth}")
        for name in ("am_hz", "fm_deviation_hz", "fm_hz", "noise_std"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative")
        if not (self.amplitude > 0):
            raise ParameterError("amplitude must be positive")
        if not (self.duration_s > 0):
            raise ParameterError("duration_s must be positive")
        if self.carrier_hz + self.fm_deviation_hz >= fs / 2.0:
            raise ParameterError(
                f"carrier + deviation = {self.carrier_hz + self.fm_deviation_hz} Hz "
                f"reaches Nyquist ({fs / 2.0} Hz)")
        cap = self.carrier_hz / 5.0
        if self.am_hz > cap or self.fm_hz > cap:
            raise ParameterError(
                f"modulation rates must not exceed carrier/5 = {cap} Hz "
                f"(am_hz={self.am_hz}, fm_hz={self.fm_hz})")
        if self.fm_hz == 0 and self.fm_deviation_hz > 0:
            raise ParameterError("fm_deviation_hz > 0 requires fm_hz > 0")


def gen_am_fm(spec: AmFmSpec, fs: float, seed: int = 0
              ) -> tuple[TimeSeries, TimeSeries, TimeSeries]:
    """Generate ``(signal, envelope, inst_freq_hz)``.

    ``envelope`` and ``inst_freq_hz`` are the noise-free ground truth for
    every sample.
    """
    spec.validate(fs)
    n_samples = int(math.floor(spec.duration_s * fs + 1e-9))
    n = np.arange(n_samples, dtype=np.float64)
    t = n / fs
    envelope = spec.amplitude * (1.0 + spec.am_depth * np.cos(2 * np.pi * spec.am_hz * t))
    phase = 2 * np.pi * spec.carrier_hz * t + spec.phase_rad
    inst_freq = np.full(n_samples, float(spec.carrier_hz))
    if spec.fm_hz > 0:
        beta = spec.fm_deviation_hz / spec.fm_hz
        phase = phase + beta * np.sin(2 * np.pi * spec.fm_hz * t)
        inst_freq = inst_freq + spec.fm_deviation_hz * np.cos(2 * np.pi * spec.fm_hz * t)
    x = envelope * np.cos(phase)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, 1.0, n_samples)
    if spec.noise_std > 0:
        x = x + spec.noise_std * noise
    return TimeSeries(x, fs), TimeSeries(envelope, fs), TimeSeries(inst_freq, fs)


def gen_labeled_dataset(n_per_class: int, class_bands: Sequence[FrequencyBand], fs: float,
                        window: WindowSpec, seed: int = 0, n_channels: int = 1,
                        noise_std: float = 0.1, am_depth: float = 0.2
                        ) -> tuple[list[Recording], list[int]]:
    """One-window recordings whose carriers fall inside per-class bands.

    Class ``i`` draws each carrier uniformly from ``class_bands[i]``, with
    AM at a tenth of the carrier, random phase, and Gaussian noise. Every
    channel of a recording shares the carrier but gets its own phase and
    noise draw. Labels are returned class-major.
    """
    if n_per_class < 1:
        raise ParameterError("n_per_class must be at least 1")
    if n_channels < 1:
        raise ParameterError("n_channels must be at least 1")
    bands = list(class_bands)
    for i, a in enumerate(bands):
        for b in bands[i + 1:]:
            if a.overlaps(b):
                raise ParameterError(f"class bands {a.name!r} and {b.name!r} overlap")
    duration = window.window_samples(fs) / fs
    names = [f"ch{c}" for c in range(n_channels)]
    rng = np.random.default_rng(seed)
    recordings: list[Recording] = []
    labels: list[int] = []
    for label, band in enumerate(bands):
        for _ in range(n_per_class):
            carrier = float(rng.uniform(band.f_low_hz, band.f_high_hz))
            rows = []
            for _c in range(n_channels):
                spec = AmFmSpec(carrier_hz=carrier, am_depth=am_depth, am_hz=carrier / 10.0,
                                amplitude=1.0, duration_s=duration, noise_std=noise_std,
                                phase_rad=float(rng.uniform(0, 2 * np.pi)))
                x, _, _ = gen_am_fm(spec, fs, seed=int(rng.integers(2**31)))
                rows.append(x.samples)
            recordings.append(Recording.from_array(np.vstack(rows), fs, names))
            labels.append(label)
    return recordings, labels
