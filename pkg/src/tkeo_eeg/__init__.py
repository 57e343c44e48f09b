"""Teager-Kaiser energy features for EEG.

Gabor subband selection, DESA-1 demodulation, PSD and signal-energy
baselines, and a small cross-validation kit.
"""

__version__ = "0.1.0"

from .core import (BROADBAND, CANONICAL_BANDS, BandSet, FrequencyBand, Recording, TimeSeries,
                   WindowSpec, canonical_band_set, segment_windows)
from .config import PipelineConfig
from .desa import Demodulation, desa1, inst_freq_hz
from .features import FeatureMatrix, FeatureVector, assemble, relative_energies
from .gabor import apply_filter, build_filterbank, select_max_energy_subband
from .pipeline import extract_matrix
from .synth import AmFmSpec, gen_am_fm, gen_labeled_dataset
from .tkeo import mean_tkeo, tkeo

__all__ = [
    "BROADBAND", "CANONICAL_BANDS", "BandSet", "FrequencyBand", "Recording", "TimeSeries",
    "WindowSpec", "canonical_band_set", "segment_windows", "PipelineConfig", "Demodulation",
    "desa1", "inst_freq_hz", "FeatureMatrix", "FeatureVector", "assemble", "relative_energies",
    "apply_filter", "build_filterbank", "select_max_energy_subband", "extract_matrix",
    "AmFmSpec", "gen_am_fm", "gen_labeled_dataset", "mean_tkeo", "tkeo",
]
