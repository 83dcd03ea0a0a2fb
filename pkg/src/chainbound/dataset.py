"""Multi-label datasets and the prediction-augmented views used along a chain.

A dataset couples an m x d feature matrix with an m x K sign-label matrix.
Labels are {-1, +1} internally; {0, 1} is accepted on CSV ingest only and
mapped 0 -> -1, 1 -> +1. Augmented views append prediction columns to the
features without ever touching the base arrays.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .validation import (
    DataFormatError,
    as_feature_matrix,
    as_sign_matrix,
    as_sign_vector,
    require_fraction,
    require_permutation,
)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MultiLabelDataset:
    """Immutable feature matrix plus sign-label matrix with column names."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()
    label_names: tuple[str, ...] = ()

    def __post_init__(self):
        feats = as_feature_matrix(self.features, "features")
        labs = as_sign_matrix(self.labels, "labels")
        if feats.shape[0] != labs.shape[0]:
            raise ValueError(
                f"features and labels must have the same row count, "
                f"got {feats.shape[0]} vs {labs.shape[0]}"
            )
        if feats.shape[0] < 1:
            raise ValueError("dataset must contain at least one row")
        if feats.shape[1] < 1 or labs.shape[1] < 1:
            raise ValueError("dataset needs at least one feature and one label column")
        fnames = tuple(self.feature_names) or tuple(f"x{j}" for j in range(feats.shape[1]))
        lnames = tuple(self.label_names) or tuple(f"y{j}" for j in range(labs.shape[1]))
        if len(fnames) != feats.shape[1]:
            raise ValueError("feature_names length does not match feature count")
        if len(lnames) != labs.shape[1]:
            raise ValueError("label_names length does not match label count")
        object.__setattr__(self, "features", _frozen(feats))
        object.__setattr__(self, "labels", _frozen(labs))
        object.__setattr__(self, "feature_names", fnames)
        object.__setattr__(self, "label_names", lnames)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_labels(self) -> int:
        return self.labels.shape[1]

    def label_column(self, j: int) -> np.ndarray:
        return self.labels[:, j]

    def take(self, rows: np.ndarray) -> "MultiLabelDataset":
        """New dataset restricted to the given row indices (order preserved)."""
        return MultiLabelDataset(
            self.features[rows], self.labels[rows], self.feature_names, self.label_names
        )


def load_csv(path, k_labels: int) -> MultiLabelDataset:
    """Load a dataset whose last ``k_labels`` columns are sign labels.

    The file must be UTF-8, comma-separated, with a header row. Feature
    columns parse as decimal reals, label columns as integers in
    {-1, 0, +1}; 0/1 labels are mapped onto -1/+1. Any malformed cell is
    reported with its 1-based data row number. Missing values are a hard
    error.
    """
    k_labels = int(k_labels)
    if k_labels < 1:
        raise ValueError("k_labels must be >= 1")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file, header row required") from None
        n_cols = len(header)
        if n_cols < k_labels + 1:
            raise DataFormatError(
                f"{path}: header has {n_cols} columns, need at least {k_labels + 1} "
                f"for {k_labels} labels plus one feature"
            )
        d = n_cols - k_labels
        feat_rows: list[list[float]] = []
        lab_rows: list[list[int]] = []
        for row_no, row in enumerate(reader, start=1):
            if len(row) != n_cols:
                raise DataFormatError(
                    f"row {row_no}: expected {n_cols} columns, got {len(row)}"
                )
            feats = []
            for j, cell in enumerate(row[:d]):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"row {row_no}: non-numeric feature value {cell!r} "
                        f"in column {header[j]!r}"
                    ) from None
                if not np.isfinite(value):
                    raise DataFormatError(
                        f"row {row_no}: non-finite feature value in column {header[j]!r}"
                    )
                feats.append(value)
            labs = []
            for j, cell in enumerate(row[d:]):
                try:
                    value = int(cell)
                except ValueError:
                    raise DataFormatError(
                        f"row {row_no}: non-integer label value {cell!r} "
                        f"in column {header[d + j]!r}"
                    ) from None
                if value not in (-1, 0, 1):
                    raise DataFormatError(
                        f"row {row_no}: label value {value} outside {{-1, 0, +1}} "
                        f"in column {header[d + j]!r}"
                    )
                labs.append(-1 if value == 0 else value)
            feat_rows.append(feats)
            lab_rows.append(labs)
    if not feat_rows:
        raise DataFormatError(f"{path}: no data rows")
    return MultiLabelDataset(
        np.array(feat_rows, dtype=np.float64),
        np.array(lab_rows, dtype=np.int64),
        tuple(header[:d]),
        tuple(header[d:]),
    )


def save_csv(data: MultiLabelDataset, path) -> None:
    """Write a dataset in the format ``load_csv`` reads back losslessly."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(data.feature_names) + list(data.label_names))
        for i in range(data.n_rows):
            row = [repr(float(v)) for v in data.features[i]]
            row += [str(int(v)) for v in data.labels[i]]
            writer.writerow(row)


def split(
    data: MultiLabelDataset, train_fraction: float, seed: int
) -> tuple[MultiLabelDataset, MultiLabelDataset]:
    """Disjoint row partition, train size floor(fraction * m), >= 1 row each side."""
    require_fraction(train_fraction, "train_fraction")
    m = data.n_rows
    if m < 2:
        raise ValueError("split needs at least 2 rows")
    n_train = int(np.floor(train_fraction * m))
    n_train = min(max(n_train, 1), m - 1)
    perm = np.random.default_rng(seed).permutation(m)
    return data.take(np.sort(perm[:n_train])), data.take(np.sort(perm[n_train:]))


@dataclass(frozen=True)
class AugmentedView:
    """Features of ``base`` extended with the chain's prediction columns.

    ``step`` is 1-based: at step k the view carries k-1 prediction columns
    and its rows have width d + k - 1. Step 1 is the raw feature matrix.
    """

    base: MultiLabelDataset
    order: tuple[int, ...]
    step: int
    predictions: np.ndarray = field(default=None)

    def __post_init__(self):
        order = require_permutation(self.order, self.base.n_labels)
        object.__setattr__(self, "order", order)
        preds = self.predictions
        if preds is None:
            preds = np.empty((self.base.n_rows, 0), dtype=np.int64)
        preds = np.asarray(preds)
        if preds.ndim != 2:
            raise ValueError("predictions must be 2-dimensional")
        if preds.shape[0] != self.base.n_rows:
            raise ValueError("predictions row count does not match base dataset")
        preds = as_sign_matrix(preds, "predictions") if preds.shape[1] else preds.astype(
            np.int64
        )
        if self.step != preds.shape[1] + 1:
            raise ValueError(
                f"step {self.step} requires {self.step - 1} prediction columns, "
                f"got {preds.shape[1]}"
            )
        if not 1 <= self.step <= self.base.n_labels:
            raise ValueError("step must lie in 1..K")
        object.__setattr__(self, "predictions", _frozen(preds))

    @property
    def width(self) -> int:
        return self.base.n_features + self.step - 1

    def matrix(self) -> np.ndarray:
        """Augmented row matrix (x_i, prediction columns); a fresh array."""
        return np.hstack([self.base.features, self.predictions.astype(np.float64)])

    def augment(self, column) -> "AugmentedView":
        """View at step + 1 with ``column`` appended; base data untouched."""
        col = as_sign_vector(column, "column")
        if col.shape[0] != self.base.n_rows:
            raise ValueError(
                f"column length {col.shape[0]} does not match m={self.base.n_rows}"
            )
        preds = np.hstack([self.predictions, col.reshape(-1, 1)])
        return AugmentedView(self.base, self.order, self.step + 1, preds)


def initial_view(data: MultiLabelDataset, order) -> AugmentedView:
    """Step-1 view of a dataset (no prediction columns yet)."""
    return AugmentedView(data, tuple(order), 1)
