"""Pipeline configuration, dataset presets and the flat JSON config file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .core import BandSet, WindowSpec, canonical_band_set
from .errors import ParameterError

__all__ = ["FEATURE_MODES", "BAND_MODES", "PRESETS", "PipelineConfig", "load_config_file"]

FEATURE_MODES = ("tkeo", "energy", "psd", "combined")
BAND_MODES = ("raw", "fused")

# window (s), overlap, filters per band, notch, highpass
PRESETS: dict[str, dict[str, Any]] = {
    "bci-iv-2a": dict(window_seconds=4.0, overlap=0.0, n_filters=25, notch_hz=50.0,
                      highpass_hz=0.5),
    "seed": dict(window_seconds=20.0, overlap=0.5, n_filters=25, notch_hz=None,
                 highpass_hz=0.5),
    "tuep": dict(window_seconds=10.0, overlap=0.0, n_filters=12, notch_hz=60.0,
                 highpass_hz=0.5),
}


@dataclass(frozen=True)
class PipelineConfig:
    window_seconds: float = 4.0
    overlap: float = 0.0
    n_filters: int = 25
    notch_hz: float | None = None
    highpass_hz: float | None = None
    feature_mode: str = "tkeo"
    band_mode: str = "fused"
    fs_override: float | None = None
    seed: int = 0
    notch_q: float = 30.0
    highpass_order: int = 4
    bandpass_order: int = 10
    desa_variant: str = "standard"
    fit_kernels: bool = True
    bands: BandSet = field(default_factory=canonical_band_set, compare=False)

    def __post_init__(self):
        if int(self.n_filters) != self.n_filters or self.n_filters < 1:
            raise ParameterError(f"n_filters must be a positive integer, got {self.n_filters}")
        object.__setattr__(self, "n_filters", int(self.n_filters))
        if self.feature_mode not in FEATURE_MODES:
            raise ParameterError(f"feature_mode must be one of {FEATURE_MODES}")
        if self.band_mode not in BAND_MODES:
            raise ParameterError(f"band_mode must be one of {BAND_MODES}")
        if self.desa_variant not in ("standard", "literal"):
            raise ParameterError("desa_variant must be 'standard' or 'literal'")
        if self.bandpass_order % 2 or self.bandpass_order < 2:
            raise ParameterError("bandpass_order must be even")
        if self.fs_override is not None and not self.fs_override > 0:
            raise ParameterError("fs_override must be positive")
        self.window  # validates window_seconds / overlap

    @property
    def window(self) -> WindowSpec:
        return WindowSpec(self.window_seconds, self.overlap)

    def validate_for(self, fs: float) -> None:
        """Check the parts that depend on the sample rate."""
        self.window.validate(fs)
        nyq = fs / 2.0
        for name in ("notch_hz", "highpass_hz"):
            v = getattr(self, name)
            if v is not None and not (0 < v < nyq):
                raise ParameterError(f"{name}={v} must lie in (0, {nyq}) at {fs} Hz")

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "bands"}

    def updated(self, **overrides) -> "PipelineConfig":
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **overrides)

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "PipelineConfig":
        try:
            base = PRESETS[name]
        except KeyError:
            raise ParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        return cls(**{**base, **overrides})


_CONFIG_KEYS = {f.name for f in fields(PipelineConfig)} - {"bands"}


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a flat JSON object of ``PipelineConfig`` fields (dashes or underscores)."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParameterError(f"config {path} must hold a JSON object")
    out = {}
    for key, value in raw.items():
        k = key.replace("-", "_")
        if k == "overlap_fraction":
            k = "overlap"
        if k not in _CONFIG_KEYS:
            raise ParameterError(f"config {path}: unknown key {key!r}")
        if isinstance(value, (dict, list)):
            raise ParameterError(f"config {path}: key {key!r} must be a scalar")
        out[k] = value
    return out
