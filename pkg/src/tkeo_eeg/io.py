"""Recording ingestion (CSV, float32 binary + JSON sidecar) and CSV/manifest output."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import Recording
from .errors import IngestError, LayoutError
from .features import FeatureMatrix, layout_id

__all__ = [
    "VALUE_ENCODING",
    "SidecarHeader",
    "read_csv_recording",
    "read_binary_recording",
    "write_binary_recording",
    "ingest",
    "fmt",
    "atomic_output",
    "write_feature_csv",
    "read_feature_csv",
    "file_sha256",
    "write_manifest",
]

VALUE_ENCODING = "float32-little-endian-interleaved"
TIME_COLUMN = "time"
META_COLUMNS = ("recording_id", "window_index", "label", "group")


def fmt(v: float) -> str:
    """Decimal with 9 significant digits."""
    return format(float(v), ".9g")


@dataclass(frozen=True)
class SidecarHeader:
    sample_rate_hz: float
    channel_names: tuple[str, ...]
    sample_count: int
    value_encoding: str = VALUE_ENCODING

    def to_json(self) -> str:
        return json.dumps({"sample_rate_hz": self.sample_rate_hz,
                           "channel_names": list(self.channel_names),
                           "sample_count": self.sample_count,
                           "value_encoding": self.value_encoding}, indent=2)

    @classmethod
    def from_file(cls, path: Path) -> "SidecarHeader":
        try:
            raw = json.loads(Path(path).read_text())
            hdr = cls(float(raw["sample_rate_hz"]), tuple(raw["channel_names"]),
                      int(raw["sample_count"]), raw.get("value_encoding", VALUE_ENCODING))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise IngestError(f"{path}: unreadable sidecar header ({exc})") from exc
        if hdr.value_encoding != VALUE_ENCODING:
            raise IngestError(f"{path}: unsupported value_encoding {hdr.value_encoding!r}")
        return hdr


def _parse_float(text: str, path, row: int, col: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise IngestError(f"{path}: row {row}, column {col!r}: not a number ({text!r})")
    if not math.isfinite(v):
        raise IngestError(f"{path}: row {row}, column {col!r}: non-finite value {text!r}")
    return v


def read_csv_recording(path, sample_rate_hz: float | None = None) -> Recording:
    """Read a header-plus-columns CSV.

    A leading ``time`` column (seconds) is checked for uniform spacing and,
    if ``sample_rate_hz`` is not given, used to infer it. Row numbers in
    error messages count the header as row 1.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IngestError(f"{path}: {exc}") from exc
    if not rows:
        raise IngestError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    has_time = bool(header) and header[0].lower() == TIME_COLUMN
    names = header[1:] if has_time else header
    if not names:
        raise IngestError(f"{path}: no channel columns")
    data = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise IngestError(f"{path}: row {i + 2} has {len(row)} fields, header has "
                              f"{len(header)} (ragged row)")
        for j, cell in enumerate(row):
            data[i, j] = _parse_float(cell, path, i + 2, header[j])
    if data.shape[0] == 0:
        raise IngestError(f"{path}: no data rows")

    fs = sample_rate_hz
    if has_time:
        t = data[:, 0]
        data = data[:, 1:]
        if t.size >= 2:
            dt = np.diff(t)
            step = float(np.mean(dt))
            if not step > 0 or np.max(np.abs(dt - step)) > 1e-6 * abs(step):
                raise IngestError(f"{path}: time column is not uniformly spaced")
            inferred = 1.0 / step
            if fs is None:
                fs = inferred
            elif abs(inferred - fs) > 1e-6 * fs:
                raise IngestError(f"{path}: time column implies {inferred:g} Hz, "
                                  f"but {fs:g} Hz was given")
    if fs is None:
        raise IngestError(f"{path}: no time column, so a sample rate must be supplied")
    try:
        return Recording.from_array(data.T, fs, names)
    except LayoutError as exc:
        raise IngestError(f"{path}: {exc}") from exc


def _sidecar_path(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def read_binary_recording(path, header_path=None) -> Recording:
    """Read interleaved little-endian float32 frames described by a JSON sidecar.

    The sidecar defaults to ``<path>.json``.
    """
    path = Path(path)
    header = SidecarHeader.from_file(Path(header_path) if header_path else _sidecar_path(path))
    try:
        payload = path.read_bytes()
    except OSError as exc:
        raise IngestError(f"{path}: {exc}") from exc
    n_ch = len(header.channel_names)
    expected = 4 * n_ch * header.sample_count
    if len(payload) != expected:
        raise IngestError(f"{path}: payload holds {len(payload)} bytes, header promises "
                          f"{n_ch} channels x {header.sample_count} samples x 4 = {expected}")
    frames = np.frombuffer(payload, dtype="<f4").reshape(header.sample_count, n_ch)
    bad = ~np.isfinite(frames)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise IngestError(f"{path}: non-finite value at frame {r}, "
                          f"channel {header.channel_names[c]!r}")
    try:
        return Recording.from_array(frames.T.astype(np.float64), header.sample_rate_hz,
                                    header.channel_names)
    except LayoutError as exc:
        raise IngestError(f"{path}: {exc}") from exc


def write_binary_recording(rec: Recording, path) -> Path:
    """Write ``rec`` as float32 frames plus its sidecar; returns the sidecar path."""
    path = Path(path)
    frames = rec.as_array().T.astype("<f4")
    path.write_bytes(frames.tobytes())
    header = SidecarHeader(rec.sample_rate_hz, tuple(rec.names), rec.n_samples)
    side = _sidecar_path(path)
    side.write_text(header.to_json())
    return side


def ingest(path, fmt_: str = "auto", sample_rate_hz: float | None = None) -> Recording:
    """Load a recording; ``auto`` picks CSV for ``.csv`` files and binary otherwise."""
    path = Path(path)
    if not path.exists():
        raise IngestError(f"{path}: no such file")
    if fmt_ == "auto":
        fmt_ = "csv" if path.suffix.lower() == ".csv" else "binary"
    if fmt_ == "csv":
        return read_csv_recording(path, sample_rate_hz)
    if fmt_ == "binary":
        return read_binary_recording(path)
    raise IngestError(f"unknown input format {fmt_!r}")


@contextmanager
def atomic_output(path):
    """Yield a temp path next to ``path``; rename into place only on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    os.close(fd)
    try:
        yield Path(tmp)
        os.chmod(tmp, 0o644)  # mkstemp creates owner-only files
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_feature_csv(m: FeatureMatrix, path) -> None:
    meta = ["recording_id", "window_index"]
    if m.labels is not None:
        meta.append("label")
    if m.groups is not None:
        meta.append("group")
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(meta + list(m.names))
        for i in range(m.n_rows):
            row = [m.recording_ids[i], m.window_indices[i]]
            if m.labels is not None:
                row.append(m.labels[i])
            if m.groups is not None:
                row.append(m.groups[i])
            w.writerow(row + [fmt(v) for v in m.values[i]])


def read_feature_csv(path) -> FeatureMatrix:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IngestError(f"{path}: {exc}") from exc
    if len(rows) < 2:
        raise IngestError(f"{path}: no feature rows")
    header = rows[0]
    meta = [h for h in header if h in META_COLUMNS]
    n_meta = len(meta)
    if header[:n_meta] != meta or "recording_id" not in meta:
        raise IngestError(f"{path}: expected leading columns {META_COLUMNS[:2]} (+label, group)")
    names = tuple(header[n_meta:])
    values = np.empty((len(rows) - 1, len(names)))
    cols = {k: [] for k in meta}
    for i, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise IngestError(f"{path}: row {i + 2} is ragged")
        for k, cell in zip(meta, row):
            cols[k].append(cell)
        for j, cell in enumerate(row[n_meta:]):
            values[i, j] = _parse_float(cell, path, i + 2, names[j])
    labels = cols.get("label")
    if labels is not None:
        labels = [_maybe_int(v) for v in labels]
    return FeatureMatrix(names, values, layout_id(names), cols["recording_id"],
                         [int(v) for v in cols.get("window_index", range(len(rows) - 1))],
                         labels, cols.get("group"))


def _maybe_int(v: str):
    try:
        return int(v)
    except ValueError:
        return v


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, *, command: str, config: dict, inputs: Sequence, output) -> Path:
    """Write ``<output>.manifest.json`` with config echo and content hashes.

    No timestamps, so identical runs produce identical manifests.
    """
    manifest = {
        "command": command,
        "config": config,
        "inputs": [{"path": str(p), "sha256": file_sha256(p)} for p in inputs],
        "output": {"path": str(output), "sha256": file_sha256(output)},
    }
    with atomic_output(path) as tmp:
        tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return Path(path)
