"""Per-window descriptors: the TKEO set, Welch PSD and signal energy."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .config import BAND_MODES, FEATURE_MODES, PipelineConfig
from .core import FrequencyBand, Recording, TimeSeries, clamp_band
from .desa import desa1
from .errors import DegenerateInputError, LayoutError, ParameterError
from .gabor import build_filterbank, select_max_energy_subband
from .spectral import apply_iir, design_butter_bandpass, welch_psd

__all__ = [
    "TKEO_DESCRIPTORS",
    "TKEO_RAW_DESCRIPTORS",
    "BandDescriptors",
    "FeatureVector",
    "FeatureMatrix",
    "tkeo_band_descriptors",
    "relative_energies",
    "BaselineDescriptors",
    "baseline_descriptors",
    "window_descriptors",
    "feature_names",
    "assemble",
]

TKEO_DESCRIPTORS = ("m_tkeo", "m_re", "m_iam", "v_ifm")
TKEO_RAW_DESCRIPTORS = ("m_tkeo", "m_iam", "v_ifm")
RAW = "raw"
_RE_FLOOR = 1e-30


@dataclass(frozen=True)
class BandDescriptors:
    m_tkeo: float
    m_iam: float
    v_ifm: float
    selected_center_hz: float
    selected_index: int
    invalid_fraction: float
    m_re: float | None = None

    @property
    def degenerate(self) -> bool:
        return self.invalid_fraction >= 1.0


@dataclass(frozen=True)
class FeatureVector:
    names: tuple[str, ...]
    values: np.ndarray
    layout_id: str

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise LayoutError(f"{len(self.names)} names for {len(self.values)} values")
        if len(set(self.names)) != len(self.names):
            raise LayoutError("feature names must be unique")

    def __len__(self) -> int:
        return len(self.names)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values.tolist()))


@dataclass
class FeatureMatrix:
    """Rows of feature vectors that share one layout."""

    names: tuple[str, ...]
    values: np.ndarray
    layout_id: str
    recording_ids: list[str] = field(default_factory=list)
    window_indices: list[int] = field(default_factory=list)
    labels: list | None = None
    groups: list | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise LayoutError(
                f"values of shape {self.values.shape} do not match {len(self.names)} names")
        n = self.values.shape[0]
        for attr in ("recording_ids", "window_indices"):
            if getattr(self, attr) and len(getattr(self, attr)) != n:
                raise LayoutError(f"{attr} has the wrong length")
        for attr in ("labels", "groups"):
            if getattr(self, attr) is not None and len(getattr(self, attr)) != n:
                raise LayoutError(f"{attr} has the wrong length")

    @classmethod
    def from_vectors(cls, rows: Sequence[FeatureVector], **meta) -> "FeatureMatrix":
        if not rows:
            raise LayoutError("no feature vectors to stack")
        layout = rows[0].layout_id
        if any(r.layout_id != layout for r in rows):
            raise LayoutError("feature vectors use different layouts")
        return cls(rows[0].names, np.vstack([r.values for r in rows]), layout, **meta)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def rows(self, idx) -> "FeatureMatrix":
        idx = [int(i) for i in np.atleast_1d(idx)]

        def pick(seq):
            return None if seq is None else [seq[i] for i in idx]

        return FeatureMatrix(self.names, self.values[idx], self.layout_id,
                             pick(self.recording_ids) if self.recording_ids else [],
                             pick(self.window_indices) if self.window_indices else [],
                             pick(self.labels), pick(self.groups))


def layout_id(names: Sequence[str]) -> str:
    return hashlib.sha1("\n".join(names).encode()).hexdigest()[:12]


@lru_cache(maxsize=256)
def _filterbank(band: FrequencyBand, n_filters: int, fs: float, max_kernel_len: int | None):
    return build_filterbank(band, n_filters, fs, max_kernel_len)


@lru_cache(maxsize=64)
def _bandpass(band: FrequencyBand, fs: float, order: int):
    return design_butter_bandpass(band, fs, order)


def tkeo_band_descriptors(window: TimeSeries, band: FrequencyBand, n_filters: int,
                          fs: float | None = None, *, fit_kernel: bool = True,
                          desa_variant: str = "standard") -> BandDescriptors:
    """Subband selection, DESA-1 and the per-band statistics (``m_re`` left unset).

    With ``fit_kernel`` the Gabor kernels are capped at the window length so
    fine banks remain usable on short windows.
    """
    fs = window.sample_rate_hz if fs is None else fs
    if fs != window.sample_rate_hz:
        raise ParameterError(f"fs {fs} does not match the window's {window.sample_rate_hz} Hz")
    band = clamp_band(band, fs)
    fb = _filterbank(band, int(n_filters), float(fs), len(window) if fit_kernel else None)
    idx, narrow, m_tkeo = select_max_energy_subband(fb, window)
    center = fb.filters[idx].center_hz
    try:
        demod = desa1(narrow, variant=desa_variant)
    except DegenerateInputError:
        return BandDescriptors(m_tkeo, 0.0, 0.0, center, idx, 1.0)
    valid = demod.valid
    env = demod.envelope.samples[valid]
    omega = demod.inst_freq_rad.samples[valid]
    return BandDescriptors(m_tkeo=m_tkeo, m_iam=float(np.mean(env)),
                           v_ifm=float(np.var(omega)), selected_center_hz=center,
                           selected_index=idx, invalid_fraction=demod.invalid_fraction)


def relative_energies(per_band: Mapping[str, float],
                      bands: Sequence[str] = ("delta", "theta", "alpha", "beta", "gamma")
                      ) -> dict[str, float]:
    """Share of each band in the summed energy; negatives floored to zero.

    If the floored sum is below 1e-30 every band gets ``1 / len(bands)``.
    """
    missing = [b for b in bands if b not in per_band]
    extra = [b for b in per_band if b not in bands]
    if missing or extra:
        raise LayoutError(f"relative energies need exactly {list(bands)}; "
                          f"missing {missing}, unexpected {extra}")
    floored = {b: max(float(per_band[b]), 0.0) for b in bands}
    total = sum(floored.values())
    if total < _RE_FLOOR:
        return {b: 1.0 / len(bands) for b in bands}
    return {b: v / total for b, v in floored.items()}


@dataclass(frozen=True)
class BaselineDescriptors:
    psd: np.ndarray
    psd_freqs_hz: np.ndarray
    m_se: float
    m_rse: float | None = None


def baseline_descriptors(window: TimeSeries, band: FrequencyBand | None, fs: float | None = None,
                         *, order: int = 10) -> BaselineDescriptors:
    """Welch PSD and mean squared amplitude of the window.

    ``band=None`` means the raw window; otherwise it is first isolated with a
    causal Butterworth bandpass of ``order`` poles. ``m_rse`` is filled in by
    :func:`window_descriptors`, which sees all five bands.
    """
    fs = window.sample_rate_hz if fs is None else fs
    x = window
    if band is not None:
        x = apply_iir(_bandpass(clamp_band(band, fs), float(fs), order), window)
    psd = welch_psd(x)
    return BaselineDescriptors(psd.features(), psd.feature_freqs(),
                               float(np.mean(x.samples ** 2)))


def _needs(feature_mode: str) -> tuple[bool, bool, bool]:
    """(tkeo, psd, energy) parts used by a feature mode."""
    return {
        "tkeo": (True, False, False),
        "psd": (False, True, False),
        "energy": (False, False, True),
        "combined": (True, True, True),
    }[feature_mode]


def _check_modes(feature_mode: str, band_mode: str) -> None:
    if feature_mode not in FEATURE_MODES:
        raise ParameterError(f"feature_mode must be one of {FEATURE_MODES}, got {feature_mode!r}")
    if band_mode not in BAND_MODES:
        raise ParameterError(f"band_mode must be one of {BAND_MODES}, got {band_mode!r}")


def _psd_names(fs: float) -> list[str]:
    seg = int(round(fs))
    freqs = np.fft.rfftfreq(seg, d=1.0 / fs)[1:]
    return [f"psd_{f:g}hz" for f in freqs]


def feature_names(channels: Sequence[str], config: PipelineConfig, fs: float) -> list[str]:
    """Column names for a window; a pure function of channels, modes and bands."""
    _check_modes(config.feature_mode, config.band_mode)
    use_tkeo, use_psd, use_energy = _needs(config.feature_mode)
    fused = config.band_mode == "fused"
    band_labels = [b.name for b in config.bands] if fused else [RAW]
    psd_names = _psd_names(fs) if use_psd else []
    names = []
    for ch in channels:
        for b in band_labels:
            descs: list[str] = []
            if use_tkeo:
                descs += list(TKEO_DESCRIPTORS if fused else TKEO_RAW_DESCRIPTORS)
            descs += psd_names
            if use_energy:
                descs += ["m_se", "m_rse"] if fused else ["m_se"]
            names += [f"{ch}__{b}__{d}" for d in descs]
    return names


def window_descriptors(window: TimeSeries, config: PipelineConfig
                       ) -> dict[str, tuple[BandDescriptors | None, BaselineDescriptors | None]]:
    """All descriptors of one single-channel window, keyed by band (or ``"raw"``)."""
    use_tkeo, use_psd, use_energy = _needs(config.feature_mode)
    use_base = use_psd or use_energy
    if config.band_mode == "raw":
        tk = (tkeo_band_descriptors(window, config.bands.broadband, config.n_filters,
                                    fit_kernel=config.fit_kernels,
                                    desa_variant=config.desa_variant) if use_tkeo else None)
        base = (baseline_descriptors(window, None, order=config.bandpass_order)
                if use_base else None)
        return {RAW: (tk, base)}

    out: dict[str, list] = {}
    for band in config.bands:
        tk = (tkeo_band_descriptors(window, band, config.n_filters,
                                    fit_kernel=config.fit_kernels,
                                    desa_variant=config.desa_variant) if use_tkeo else None)
        base = (baseline_descriptors(window, band, order=config.bandpass_order)
                if use_base else None)
        out[band.name] = [tk, base]
    names = [b.name for b in config.bands]
    if use_tkeo:
        re = relative_energies({b: out[b][0].m_tkeo for b in names}, names)
        for b in names:
            out[b][0] = replace(out[b][0], m_re=re[b])
    if use_base:
        rse = relative_energies({b: out[b][1].m_se for b in names}, names)
        for b in names:
            out[b][1] = replace(out[b][1], m_rse=rse[b])
    return {b: (tk, base) for b, (tk, base) in out.items()}


def assemble(window: Recording, config: PipelineConfig) -> FeatureVector:
    """Feature vector of one multichannel window, laid out channel, band, descriptor."""
    _check_modes(config.feature_mode, config.band_mode)
    fs = window.sample_rate_hz
    names = feature_names(window.names, config, fs)
    use_tkeo, use_psd, use_energy = _needs(config.feature_mode)
    fused = config.band_mode == "fused"
    values: list[float] = []
    for _, ts in window:
        for tk, base in window_descriptors(ts, config).values():
            if use_tkeo:
                values += [tk.m_tkeo, tk.m_re, tk.m_iam, tk.v_ifm] if fused else \
                          [tk.m_tkeo, tk.m_iam, tk.v_ifm]
            if use_psd:
                values += base.psd.tolist()
            if use_energy:
                values += [base.m_se, base.m_rse] if fused else [base.m_se]
    return FeatureVector(tuple(names), np.asarray(values, dtype=np.float64), layout_id(names))
