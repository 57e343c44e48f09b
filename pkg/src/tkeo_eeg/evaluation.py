"""Standardization, stratified folds, metrics and a nearest-centroid reference classifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.special import log_softmax
from scipy.stats import rankdata

from .errors import (EmptyResultError, LayoutError, ParameterError, StratificationError,
                     UndefinedMetricError)
from .features import FeatureMatrix

__all__ = [
    "ScalerParams",
    "fit_scaler",
    "transform",
    "FoldAssignment",
    "stratified_kfold",
    "balanced_accuracy",
    "roc_auc",
    "roc_auc_ovr_macro",
    "NearestCentroid",
    "nearest_centroid",
    "centroid_distances",
    "predict",
    "CrossValidationResult",
    "cross_validate",
]

_STD_FLOOR = 1e-12


def _as_array(m) -> np.ndarray:
    if isinstance(m, FeatureMatrix):
        return m.values
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


@dataclass(frozen=True)
class ScalerParams:
    means: np.ndarray
    stds: np.ndarray


def fit_scaler(train) -> ScalerParams:
    """Per-feature mean and population std (floored at 1e-12)."""
    x = _as_array(train)
    if x.shape[0] == 0:
        raise EmptyResultError("cannot fit a scaler on zero rows")
    return ScalerParams(x.mean(axis=0), np.maximum(x.std(axis=0), _STD_FLOOR))


def transform(params: ScalerParams, m):
    x = _as_array(m)
    if x.shape[1] != params.means.shape[0]:
        raise LayoutError(f"{x.shape[1]} features, scaler fitted on {params.means.shape[0]}")
    z = (x - params.means) / params.stds
    if isinstance(m, FeatureMatrix):
        return FeatureMatrix(m.names, z, m.layout_id, list(m.recording_ids),
                             list(m.window_indices), m.labels, m.groups)
    return z


@dataclass(frozen=True)
class FoldAssignment:
    fold_of_row: np.ndarray
    k: int

    def train_test(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        test = np.flatnonzero(self.fold_of_row == fold)
        train = np.flatnonzero(self.fold_of_row != fold)
        return train, test

    def __iter__(self):
        return (self.train_test(f) for f in range(self.k))


def stratified_kfold(labels: Sequence, k: int = 5, seed: int = 0) -> FoldAssignment:
    """Shuffle each class with ``seed`` and deal its rows round-robin over ``k`` folds.

    The dealing for each class starts where the previous class stopped, so
    fold sizes also stay within one of each other.
    """
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    y = np.asarray(labels)
    classes, counts = np.unique(y, return_counts=True)
    small = [(c, n) for c, n in zip(classes.tolist(), counts.tolist()) if n < k]
    if small:
        raise StratificationError(f"classes with fewer than k={k} members: {small}")
    rng = np.random.default_rng(seed)
    folds = np.empty(y.shape[0], dtype=np.int64)
    start = 0
    for c in classes:
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        folds[idx] = (start + np.arange(idx.size)) % k
        start = (start + idx.size) % k
    return FoldAssignment(folds, k)


def balanced_accuracy(y_true: Sequence, y_pred: Sequence) -> float:
    """Unweighted mean of per-class recall over the classes present in ``y_true``."""
    yt, yp = np.asarray(y_true), np.asarray(y_pred)
    if yt.shape != yp.shape:
        raise LayoutError(f"y_true has {yt.size} entries, y_pred {yp.size}")
    if yt.size == 0:
        raise UndefinedMetricError("balanced accuracy of zero samples")
    classes = np.unique(yt)
    unknown = np.setdiff1d(np.unique(yp), classes)
    if unknown.size:
        raise UndefinedMetricError(f"predicted classes {unknown.tolist()} absent from y_true")
    # exact rational mean, rounded once
    recalls = [Fraction(int(np.sum(yp[yt == c] == c)), int(np.sum(yt == c))) for c in classes]
    return float(sum(recalls) / len(recalls))


def roc_auc(y_true: Sequence, scores: Sequence) -> float:
    """Probability that a random positive outscores a random negative, ties counting half."""
    y = np.asarray(y_true).astype(bool)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise LayoutError("labels and scores differ in length")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("ROC-AUC needs both positive and negative samples")
    ranks = rankdata(s)  # average ranks handle ties
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_auc_ovr_macro(y_true: Sequence, score_matrix, classes: Sequence | None = None) -> float:
    """Unweighted mean of one-vs-rest AUCs; column ``j`` scores ``classes[j]``."""
    y = np.asarray(y_true)
    s = np.asarray(score_matrix, dtype=np.float64)
    if classes is None:
        classes = np.unique(y)
    if s.ndim != 2 or s.shape != (y.size, len(classes)):
        raise LayoutError(f"score matrix of shape {s.shape} for {y.size} rows and "
                          f"{len(classes)} classes")
    return float(np.mean([roc_auc(y == c, s[:, j]) for j, c in enumerate(classes)]))


@dataclass(frozen=True)
class NearestCentroid:
    classes: np.ndarray
    centroids: np.ndarray


def nearest_centroid(train, labels: Sequence) -> NearestCentroid:
    x = _as_array(train)
    y = np.asarray(labels)
    if x.shape[0] != y.size:
        raise LayoutError("row and label counts differ")
    classes = np.unique(y)
    if classes.size == 0:
        raise EmptyResultError("no training rows")
    cents = np.vstack([x[y == c].mean(axis=0) for c in classes])
    return NearestCentroid(classes, cents)


def centroid_distances(model: NearestCentroid, rows) -> np.ndarray:
    """Euclidean distance of every row to every class centroid."""
    x = _as_array(rows)
    return np.sqrt(((x[:, None, :] - model.centroids[None, :, :]) ** 2).sum(axis=2))


def predict(model: NearestCentroid, rows) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(labels, scores)``.

    Scores are log-softmax values of the negated centroid distances of each
    row: within a row they rank classes exactly like the distances, and
    across rows they are comparable, which one-vs-rest AUC needs. The log
    form avoids ties from underflow when rows sit far from every centroid.
    """
    d = centroid_distances(model, rows)
    # argmin returns the first minimum, i.e. the lowest class id on ties
    labels = model.classes[np.argmin(d, axis=1)]
    return labels, log_softmax(-d, axis=1)


@dataclass
class CrossValidationResult:
    balanced_accuracy: list[float]
    roc_auc: list[float]
    folds: FoldAssignment = field(repr=False)

    @property
    def mean_balanced_accuracy(self) -> float:
        return float(np.mean(self.balanced_accuracy))

    @property
    def std_balanced_accuracy(self) -> float:
        return float(np.std(self.balanced_accuracy))

    @property
    def mean_roc_auc(self) -> float:
        return float(np.mean(self.roc_auc))

    @property
    def std_roc_auc(self) -> float:
        return float(np.std(self.roc_auc))

    def table(self) -> list[tuple[str, float, float]]:
        rows = [(str(i), ba, auc) for i, (ba, auc)
                in enumerate(zip(self.balanced_accuracy, self.roc_auc))]
        rows.append(("mean", self.mean_balanced_accuracy, self.mean_roc_auc))
        rows.append(("std", self.std_balanced_accuracy, self.std_roc_auc))
        return rows


def cross_validate(matrix, labels: Sequence, k: int = 5, seed: int = 0,
                   external_scores: Mapping[int, np.ndarray] | None = None
                   ) -> CrossValidationResult:
    """Stratified k-fold evaluation.

    Each fold fits the scaler on its training rows only, then scores the
    held-out rows with a nearest-centroid model. ``external_scores`` swaps
    the classifier out: it maps fold index to a ``(n_test, n_classes)``
    score matrix ordered like the fold's test rows, columns in sorted class
    order. Predictions are then the per-row argmax.
    """
    x = _as_array(matrix)
    y = np.asarray(labels)
    if x.shape[0] != y.size:
        raise LayoutError(f"{x.shape[0]} rows but {y.size} labels")
    folds = stratified_kfold(y, k, seed)
    classes = np.unique(y)
    bas, aucs = [], []
    for fold, (tr, te) in enumerate(folds):
        if external_scores is not None:
            scores = np.asarray(external_scores[fold], dtype=np.float64)
            if scores.shape != (te.size, classes.size):
                raise LayoutError(f"fold {fold}: external scores of shape {scores.shape}, "
                                  f"expected {(te.size, classes.size)}")
            pred = classes[np.argmax(scores, axis=1)]
        else:
            params = fit_scaler(x[tr])
            model = nearest_centroid(transform(params, x[tr]), y[tr])
            pred, scores = predict(model, transform(params, x[te]))
        bas.append(balanced_accuracy(y[te], pred))
        aucs.append(roc_auc_ovr_macro(y[te], scores, classes))
    return CrossValidationResult(bas, aucs, folds)
