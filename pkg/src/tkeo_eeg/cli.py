"""Command-line entry point: ``extract``, ``synth``, ``eval`` and ``psd``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .config import BAND_MODES, FEATURE_MODES, PRESETS, PipelineConfig, load_config_file
from .core import WindowSpec, canonical_band_set
from .errors import IngestError, LayoutError, ParameterError, TkeoEegError
from .evaluation import cross_validate, stratified_kfold
from .io import (atomic_output, fmt, ingest, read_feature_csv, write_feature_csv,
                 write_manifest)
from .pipeline import extract_matrix
from .spectral import welch_psd
from .synth import AmFmSpec, gen_am_fm, gen_labeled_dataset

log = logging.getLogger("tkeo_eeg")

_CONFIG_FLAGS = ("window_seconds", "overlap", "n_filters", "notch_hz", "highpass_hz",
                 "feature_mode", "band_mode", "fs_override", "seed")


# ---------------------------------------------------------------- extract

def _read_inputs_list(path: Path):
    """CSV with a ``path`` column and optional ``recording_id``, ``label``, ``group``."""
    try:
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise IngestError(f"{path}: {exc}") from exc
    if not rows or "path" not in rows[0]:
        raise IngestError(f"{path}: inputs list needs a 'path' column")
    entries = []
    for r in rows:
        p = Path(r["path"])
        if not p.is_absolute():
            p = path.parent / p
        entries.append((p, r.get("recording_id") or p.stem, r.get("label"), r.get("group")))
    return entries


def build_config(args) -> PipelineConfig:
    values: dict = {}
    if args.preset:
        if args.preset not in PRESETS:
            raise ParameterError(f"unknown preset {args.preset!r}")
        values.update(PRESETS[args.preset])
    if args.config:
        values.update(load_config_file(args.config))
    for key in _CONFIG_FLAGS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    for key in ("notch_hz", "highpass_hz"):
        if values.get(key) is not None and values[key] <= 0:
            values[key] = None  # 0 disables a preset filter
    return PipelineConfig(**values)


def run_extract(config: PipelineConfig, inputs: Sequence, output, *, fmt_: str = "auto",
                sample_rate_hz: float | None = None, recording_ids=None, labels=None,
                groups=None):
    """Extract features from ``inputs`` into ``output`` CSV plus a run manifest."""
    inputs = [Path(p) for p in inputs]
    if not inputs:
        raise ParameterError("no input recordings")
    fs_hint = sample_rate_hz if sample_rate_hz is not None else config.fs_override
    recs = []
    for p in inputs:
        try:
            recs.append(ingest(p, fmt_, fs_hint))
        except TkeoEegError as exc:
            if str(p) not in str(exc):
                raise type(exc)(f"{p}: {exc}") from exc
            raise
    if recording_ids is None:
        recording_ids = [p.stem for p in inputs]
    matrix = extract_matrix(recs, config, recording_ids, labels, groups)
    output = Path(output)
    with atomic_output(output) as tmp:
        write_feature_csv(matrix, tmp)
    write_manifest(output.with_name(output.name + ".manifest.json"), command="extract",
                   config=config.to_dict(), inputs=inputs, output=output)
    return matrix


def _cmd_extract(args) -> int:
    config = build_config(args)
    inputs = [Path(p) for p in args.inputs]
    ids, labels, groups = [p.stem for p in inputs], [None] * len(inputs), [None] * len(inputs)
    if args.inputs_list:
        for p, rid, lab, grp in _read_inputs_list(Path(args.inputs_list)):
            inputs.append(p)
            ids.append(rid)
            labels.append(lab)
            groups.append(grp)
    labels = labels if any(v not in (None, "") for v in labels) else None
    groups = groups if any(v not in (None, "") for v in groups) else None
    m = run_extract(config, inputs, args.output, fmt_=args.format, sample_rate_hz=args.fs,
                    recording_ids=ids, labels=labels, groups=groups)
    log.info("wrote %d rows x %d features to %s", m.n_rows, len(m.names), args.output)
    return 0


# ---------------------------------------------------------------- synth

def _write_signal_csv(path: Path, columns: dict[str, np.ndarray], fs: float) -> None:
    n = len(next(iter(columns.values())))
    with atomic_output(path) as tmp, tmp.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", *columns])
        cols = list(columns.values())
        for i in range(n):
            w.writerow([fmt(i / fs)] + [fmt(c[i]) for c in cols])


def run_synth(spec: AmFmSpec, fs: float, seed: int, output, truth=None) -> None:
    x, env, inst = gen_am_fm(spec, fs, seed)
    _write_signal_csv(Path(output), {"x": x.samples}, fs)
    if truth:
        _write_signal_csv(Path(truth), {"envelope": env.samples,
                                        "inst_freq_hz": inst.samples}, fs)


def run_synth_dataset(out_dir, class_names: Sequence[str], n_per_class: int, fs: float,
                      window_seconds: float, seed: int, n_channels: int = 1) -> Path:
    """Write one CSV per synthetic recording plus ``inputs.csv`` listing labels."""
    bands = canonical_band_set()
    try:
        class_bands = [bands[name] for name in class_names]
    except KeyError as exc:
        raise ParameterError(f"unknown band {exc.args[0]!r}") from exc
    recs, labels = gen_labeled_dataset(n_per_class, class_bands, fs, WindowSpec(window_seconds),
                                       seed, n_channels=n_channels)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    listing = out_dir / "inputs.csv"
    with atomic_output(listing) as tmp, tmp.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["path", "recording_id", "label"])
        for i, (rec, lab) in enumerate(zip(recs, labels)):
            name = f"rec{i:04d}.csv"
            _write_signal_csv(out_dir / name, dict(zip(rec.names, rec.as_array())), fs)
            w.writerow([name, f"rec{i:04d}", lab])
    return listing


def _cmd_synth(args) -> int:
    if args.dataset_dir:
        listing = run_synth_dataset(args.dataset_dir, args.classes.split(","), args.n_per_class,
                                    args.fs, args.window_seconds, args.seed, args.channels)
        log.info("wrote dataset listing %s", listing)
        return 0
    if not args.output or args.carrier_hz is None:
        raise ParameterError("synth needs --output and --carrier-hz (or --dataset-dir)")
    spec = AmFmSpec(carrier_hz=args.carrier_hz, am_depth=args.am_depth, am_hz=args.am_hz,
                    fm_deviation_hz=args.fm_deviation_hz, fm_hz=args.fm_hz,
                    amplitude=args.amplitude, duration_s=args.duration, noise_std=args.noise_std)
    run_synth(spec, args.fs, args.seed, args.output, args.truth)
    return 0


# ---------------------------------------------------------------- eval

def read_external_scores(path, matrix, folds, classes) -> dict[int, np.ndarray]:
    """Score matrices per fold from a CSV keyed by ``recording_id, window_index, fold``.

    Score columns are named ``score_<class>``.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        header = reader.fieldnames or []
    cols = [f"score_{c}" for c in classes]
    missing = [c for c in ("recording_id", "window_index", "fold", *cols) if c not in header]
    if missing:
        raise IngestError(f"{path}: missing columns {missing}")
    table = {}
    for r in rows:
        key = (r["recording_id"], int(r["window_index"]))
        table[key] = (int(r["fold"]), [float(r[c]) for c in cols])
    out = {}
    for fold, (_, test) in enumerate(folds):
        mat = []
        for i in test:
            key = (matrix.recording_ids[i], matrix.window_indices[i])
            if key not in table:
                raise IngestError(f"{path}: no scores for {key}")
            f, s = table[key]
            if f != fold:
                raise LayoutError(f"{path}: row {key} scored in fold {f}, expected {fold}")
            mat.append(s)
        out[fold] = np.asarray(mat)
    return out


def run_eval(feature_csv, k: int = 5, seed: int = 0, scores=None, out=None,
             folds_out=None):
    out = out if out is not None else sys.stdout
    matrix = read_feature_csv(feature_csv)
    if matrix.labels is None:
        raise LayoutError(f"{feature_csv}: a 'label' column is needed for evaluation")
    labels = np.asarray([str(v) for v in matrix.labels])
    folds = stratified_kfold(labels, k, seed)
    if folds_out:
        with atomic_output(folds_out) as tmp, tmp.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["recording_id", "window_index", "label", "fold"])
            for i, f in enumerate(folds.fold_of_row):
                w.writerow([matrix.recording_ids[i], matrix.window_indices[i], labels[i], f])
    external = None
    if scores:
        external = read_external_scores(scores, matrix, folds, np.unique(labels))
    result = cross_validate(matrix, labels, k, seed, external_scores=external)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["fold", "balanced_accuracy", "roc_auc"])
    for name, ba, auc in result.table():
        w.writerow([name, fmt(ba), fmt(auc)])
    return result


def _cmd_eval(args) -> int:
    run_eval(args.features, args.k, args.seed, args.scores, folds_out=args.write_folds)
    return 0


# ---------------------------------------------------------------- psd

def run_psd(input_path, output, *, fmt_: str = "auto", sample_rate_hz=None,
            seg_len=None, overlap: float = 0.5):
    """Whole-recording Welch PSD, one power column per channel."""
    rec = ingest(input_path, fmt_, sample_rate_hz)
    estimates = [welch_psd(ts, seg_len, overlap) for _, ts in rec]
    freqs = estimates[0].freqs_hz
    with atomic_output(output) as tmp, tmp.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["freq_hz", *rec.names])
        for i, f in enumerate(freqs):
            w.writerow([fmt(f)] + [fmt(e.power[i]) for e in estimates])
    return estimates


def _cmd_psd(args) -> int:
    run_psd(args.input, args.output, fmt_=args.format, sample_rate_hz=args.fs,
            seg_len=args.seg_len, overlap=args.overlap)
    return 0


# ---------------------------------------------------------------- parser

def _add_input_flags(p):
    p.add_argument("--format", choices=("auto", "csv", "binary"), default="auto")
    p.add_argument("--fs", type=float, help="sample rate for CSVs without a time column")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tkeo-eeg", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="windowed feature extraction to CSV")
    p.add_argument("inputs", nargs="*", help="recording files (.csv or float32 binary)")
    p.add_argument("--inputs-list", help="CSV with path[,recording_id,label,group] columns")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--config", help="flat JSON file of pipeline settings")
    p.add_argument("--window-seconds", type=float)
    p.add_argument("--overlap", type=float, help="fraction in [0, 1)")
    p.add_argument("--n-filters", type=int)
    p.add_argument("--notch-hz", type=float, help="0 disables")
    p.add_argument("--highpass-hz", type=float, help="0 disables")
    p.add_argument("--feature-mode", choices=FEATURE_MODES)
    p.add_argument("--band-mode", choices=BAND_MODES)
    p.add_argument("--fs-override", type=float)
    p.add_argument("--seed", type=int)
    _add_input_flags(p)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("synth", help="synthetic AM-FM signal or labeled dataset")
    p.add_argument("-o", "--output")
    p.add_argument("--truth", help="also write envelope and inst. frequency here")
    p.add_argument("--fs", type=float, default=250.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--carrier-hz", type=float)
    p.add_argument("--am-depth", type=float, default=0.0)
    p.add_argument("--am-hz", type=float, default=0.0)
    p.add_argument("--fm-deviation-hz", type=float, default=0.0)
    p.add_argument("--fm-hz", type=float, default=0.0)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--duration", type=float, default=4.0, help="seconds")
    p.add_argument("--noise-std", type=float, default=0.0)
    p.add_argument("--dataset-dir", help="write a labeled dataset here instead")
    p.add_argument("--classes", default="theta,alpha,beta")
    p.add_argument("--n-per-class", type=int, default=20)
    p.add_argument("--window-seconds", type=float, default=4.0)
    p.add_argument("--channels", type=int, default=1)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("eval", help="stratified k-fold evaluation of a feature CSV")
    p.add_argument("features")
    p.add_argument("-k", "--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scores", help="external per-row class scores CSV")
    p.add_argument("--write-folds", help="write the fold assignment CSV here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("psd", help="Welch PSD of a recording to CSV")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seg-len", type=int)
    p.add_argument("--overlap", type=float, default=0.5)
    _add_input_flags(p)
    p.set_defaults(func=_cmd_psd)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except TkeoEegError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 9


if __name__ == "__main__":
    sys.exit(main())
