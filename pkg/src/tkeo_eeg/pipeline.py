"""Recording-level orchestration: preprocessing, windowing, feature assembly."""

from __future__ import annotations

import logging
from typing import Sequence

from .config import PipelineConfig
from .core import Recording, TimeSeries, segment_recording
from .errors import LayoutError, ParameterError
from .features import FeatureMatrix, assemble
from .spectral import apply_iir, design_highpass, design_notch

__all__ = ["preprocess", "extract_recording", "extract_matrix"]

log = logging.getLogger(__name__)


def _with_rate(rec: Recording, fs: float) -> Recording:
    if fs == rec.sample_rate_hz:
        return rec
    return rec.map(lambda ts: TimeSeries(ts.samples, fs))


def preprocess(rec: Recording, config: PipelineConfig) -> Recording:
    """Optional notch, then optional highpass, over the whole recording."""
    fs = rec.sample_rate_hz
    config.validate_for(fs)
    if config.notch_hz is not None:
        notch = design_notch(config.notch_hz, fs, config.notch_q)
        rec = rec.map(lambda ts: apply_iir(notch, ts))
    if config.highpass_hz is not None:
        hp = design_highpass(config.highpass_hz, fs, config.highpass_order)
        rec = rec.map(lambda ts: apply_iir(hp, ts))
    return rec


def extract_recording(rec: Recording, config: PipelineConfig):
    """Feature vectors for every window of one recording, in window order."""
    if config.fs_override is not None:
        rec = _with_rate(rec, config.fs_override)
    rec = preprocess(rec, config)
    return [assemble(w, config) for w in segment_recording(rec, config.window)]


def extract_matrix(recordings: Sequence[Recording], config: PipelineConfig,
                   recording_ids: Sequence[str] | None = None,
                   labels: Sequence | None = None,
                   groups: Sequence | None = None) -> FeatureMatrix:
    """Stack all windows of all recordings; rows follow input order, then window index.

    Per-recording ``labels``/``groups`` are repeated onto each of its windows.
    """
    n = len(recordings)
    if recording_ids is None:
        recording_ids = [f"rec{i:04d}" for i in range(n)]
    for name, seq in (("recording_ids", recording_ids), ("labels", labels), ("groups", groups)):
        if seq is not None and len(seq) != n:
            raise LayoutError(f"{name} has {len(seq)} entries for {n} recordings")
    rates = {r.sample_rate_hz for r in recordings}
    if config.fs_override is None and len(rates) > 1:
        raise ParameterError(f"recordings use different sample rates {sorted(rates)}")
    channel_sets = {tuple(r.names) for r in recordings}
    if len(channel_sets) > 1:
        raise LayoutError(f"recordings disagree on channel names: {sorted(channel_sets)}")

    vectors, rid, widx, lab, grp = [], [], [], [], []
    for i, rec in enumerate(recordings):
        rows = extract_recording(rec, config)
        log.debug("%s: %d windows", recording_ids[i], len(rows))
        for w, v in enumerate(rows):
            vectors.append(v)
            rid.append(recording_ids[i])
            widx.append(w)
            if labels is not None:
                lab.append(labels[i])
            if groups is not None:
                grp.append(groups[i])
    return FeatureMatrix.from_vectors(
        vectors, recording_ids=rid, window_indices=widx,
        labels=lab if labels is not None else None,
        groups=grp if groups is not None else None)
