"""Dataset loading, normalization, label-noise injection and stratified splitting.

All operations are pure given their seed arguments. A :class:`Dataset` is
immutable after construction (backing arrays are write-protected), so it can
be shared freely between pipeline stages.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


class DatasetError(ValueError):
    """Base class for dataset construction and parsing failures."""


class RaggedRowsError(DatasetError):
    """CSV rows do not all have the same number of columns."""


class LabelCardinalityError(DatasetError):
    """The label column does not contain exactly two distinct values."""


class NonNumericFeatureError(DatasetError):
    """A feature cell failed to parse as a real number."""


class MissingValueError(DatasetError):
    """A cell is empty; missing values are a hard error, no imputation."""


class StratificationError(DatasetError):
    """A class is too small to stratify the requested split."""


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Binary-classification dataset with labels in {+1, -1}.

    memberships, when present, are per-point degrees in (0, 1].
    """

    features: np.ndarray
    labels: np.ndarray
    memberships: np.ndarray | None = None
    name: str = "unnamed"

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        labs = np.asarray(self.labels, dtype=int)
        if feats.ndim != 2 or feats.shape[1] < 1:
            raise DatasetError(f"features must be an n x d matrix with d >= 1, got shape {feats.shape}")
        n = feats.shape[0]
        if labs.shape != (n,):
            raise DatasetError(f"labels must have length {n}, got shape {labs.shape}")
        if n < 2:
            raise DatasetError(f"need at least 2 samples, got {n}")
        if not np.all(np.isin(labs, (-1, 1))):
            raise DatasetError("every label must be exactly +1 or -1")
        if not (np.any(labs == 1) and np.any(labs == -1)):
            raise DatasetError("both labels must occur at least once")
        if not np.all(np.isfinite(feats)):
            raise DatasetError("features must be finite reals")
        object.__setattr__(self, "features", _frozen(feats))
        object.__setattr__(self, "labels", _frozen(labs))
        if self.memberships is not None:
            mem = np.asarray(self.memberships, dtype=float)
            if mem.shape != (n,):
                raise DatasetError(f"memberships must have length {n}, got shape {mem.shape}")
            if not np.all((mem > 0.0) & (mem <= 1.0)):
                raise DatasetError("memberships must lie in (0, 1]")
            object.__setattr__(self, "memberships", _frozen(mem))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def with_memberships(self, memberships: np.ndarray) -> "Dataset":
        return Dataset(self.features, self.labels, memberships, self.name)

    def subset(self, indices: np.ndarray, name: str | None = None) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        mem = self.memberships[idx] if self.memberships is not None else None
        return Dataset(self.features[idx], self.labels[idx], mem, name or self.name)


@dataclass(frozen=True)
class NoiseSpec:
    """Fraction of labels to flip plus the seed that fully determines which."""

    fraction: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 0.5:
            raise DatasetError(f"noise fraction must lie in [0, 0.5], got {self.fraction}")
        if self.seed < 0:
            raise DatasetError("seed must be a nonnegative integer")


def load_csv(path, label_column) -> Dataset:
    """Load a headered, comma-separated CSV into a Dataset.

    label_column selects the label field by header name or zero-based index;
    every other column must be numeric. The two distinct raw label values are
    mapped deterministically: lexicographically smaller value -> -1.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    width = len(header)
    if isinstance(label_column, int):
        if not 0 <= label_column < width:
            raise DatasetError(f"label column index {label_column} out of range for {width} columns")
        label_idx = label_column
    else:
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise DatasetError(f"label column {label_column!r} not found in header {header}") from None

    raw_labels: list[str] = []
    feature_rows: list[list[float]] = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != width:
            raise RaggedRowsError(f"line {lineno}: expected {width} columns, got {len(row)}")
        feats = []
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell == "":
                raise MissingValueError(f"line {lineno}, column {j}: empty cell")
            if j == label_idx:
                raw_labels.append(cell)
                continue
            try:
                feats.append(float(cell))
            except ValueError:
                raise NonNumericFeatureError(
                    f"line {lineno}, column {header[j]!r}: non-numeric value {cell!r}"
                ) from None
        feature_rows.append(feats)

    distinct = sorted(set(raw_labels))
    if len(distinct) != 2:
        raise LabelCardinalityError(f"expected exactly 2 distinct label values, got {distinct}")
    mapping = {distinct[0]: -1, distinct[1]: 1}
    labels = np.array([mapping[v] for v in raw_labels], dtype=int)
    import os

    name = os.path.splitext(os.path.basename(str(path)))[0]
    return Dataset(np.array(feature_rows, dtype=float), labels, name=name)


def normalize_minmax(d: Dataset) -> Dataset:
    """Affinely map each feature column onto [0, 1]; constant columns map to 0."""
    feats = d.features
    lo = feats.min(axis=0)
    hi = feats.max(axis=0)
    span = hi - lo
    out = np.zeros_like(feats)
    nonconst = span > 0
    out[:, nonconst] = (feats[:, nonconst] - lo[nonconst]) / span[nonconst]
    return Dataset(out, d.labels, d.memberships, d.name)


def inject_label_noise(d: Dataset, spec: NoiseSpec) -> Dataset:
    """Negate the labels of exactly round(fraction * n) seed-chosen indices."""
    k = _round_half_up(spec.fraction * d.n)
    labels = np.array(d.labels)
    if k > 0:
        rng = np.random.default_rng(spec.seed)
        flip = rng.permutation(d.n)[:k]
        labels[flip] = -labels[flip]
    return Dataset(d.features, labels, d.memberships, d.name)


def split(d: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified shuffle split into (train, test).

    Per-class test counts follow the largest-remainder apportionment of
    round(test_fraction * n) seats, then are clamped into [1, n_c - 1] so both
    partitions keep both labels. Classes are processed in ascending label
    order; remainder ties go to the smaller label.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    class_idx = {c: np.flatnonzero(d.labels == c) for c in (-1, 1)}
    for c, idx in class_idx.items():
        if len(idx) < 2:
            raise StratificationError(f"class {c:+d} has {len(idx)} samples; need >= 2 to stratify")

    total = _round_half_up(test_fraction * d.n)
    quota = {c: test_fraction * len(idx) for c, idx in class_idx.items()}
    counts = {c: int(math.floor(q)) for c, q in quota.items()}
    seats = total - sum(counts.values())
    order = sorted(class_idx, key=lambda c: (-(quota[c] - counts[c]), c))
    for c in order[: max(seats, 0)]:
        counts[c] += 1
    for c, idx in class_idx.items():
        counts[c] = min(max(counts[c], 1), len(idx) - 1)

    rng = np.random.default_rng(seed)
    test_parts = []
    train_parts = []
    for c in (-1, 1):
        idx = class_idx[c]
        perm = idx[rng.permutation(len(idx))]
        test_parts.append(perm[: counts[c]])
        train_parts.append(perm[counts[c]:])
    test_idx = np.sort(np.concatenate(test_parts))
    train_idx = np.sort(np.concatenate(train_parts))
    return d.subset(train_idx, f"{d.name}-train"), d.subset(test_idx, f"{d.name}-test")
