"""Dataset ingestion, standardization, and train/test splitting.

Corpus layout: comma-delimited UTF-8 files with '.' decimals, numeric
feature columns plus one label column (any token), header optional. Labels
are kept as raw string tokens; the class catalog is ordered by first
appearance in the file, never sorted.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DataError, ParseError, ShapeError

__all__ = [
    "Dataset",
    "StandardizationStats",
    "load_csv",
    "load_feature_csv",
    "write_csv",
    "fit_standardizer",
    "apply_standardizer",
    "transform_features",
    "split_train_test",
    "load_split_indices",
    "subset",
    "labels_to_signs",
]


@dataclass
class Dataset:
    """Immutable-by-convention feature matrix with string labels."""

    name: str
    features: np.ndarray  # (N, n) float64, all finite
    labels: np.ndarray    # (N,) object array of str tokens
    catalog: tuple[str, ...]

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=object)
        if self.features.ndim != 2:
            raise DataError(f"features must be 2-d, got shape {self.features.shape}")
        if self.features.shape[0] == 0:
            raise DataError(f"dataset {self.name!r} is empty")
        if self.labels.shape != (self.features.shape[0],):
            raise DataError("labels length does not match feature rows")
        if not np.all(np.isfinite(self.features)):
            raise DataError(f"dataset {self.name!r} contains nonfinite features")
        cat = set(self.catalog)
        if any(lbl not in cat for lbl in self.labels):
            raise DataError("labels outside the class catalog")

    @property
    def N(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.catalog)


@dataclass
class StandardizationStats:
    """Per-feature center/scale; scale is the population sd with 0 -> 1."""

    mean: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.scale = np.asarray(self.scale, dtype=float)

    @classmethod
    def identity(cls, n: int) -> "StandardizationStats":
        return cls(np.zeros(n), np.ones(n))


def _parse_cell(cell: str) -> float | None:
    """Return the finite float value of a cell, or None if missing/bad."""
    text = cell.strip()
    if not text:
        return None
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(
    path,
    label_col: int | str = -1,
    has_header: bool | None = None,
    impute_mean: bool = False,
    name: str | None = None,
) -> Dataset:
    """Load a delimited dataset with one label column.

    `label_col` is a zero-based column index (negative allowed) or, with a
    header, a column name. `has_header=None` autodetects: the first row is
    data if every feature cell parses as a number. Without `impute_mean`,
    any nonnumeric/missing/nonfinite feature cell is a ParseError naming the
    row and column (1-based row numbers count file lines including any
    header); with it, such cells take the column mean of the parseable rows.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    if not rows:
        raise DataError(f"dataset file {path} is empty")

    width = len(rows[0][1])
    if width < 2:
        raise DataError(f"{path}: need at least one feature column and a label column")

    if isinstance(label_col, str):
        if has_header is False:
            raise ConfigurationError("label column given by name requires a header")
        has_header = True
        header = [c.strip() for c in rows[0][1]]
        if label_col not in header:
            raise DataError(f"{path}: label column {label_col!r} absent from header")
        label_idx = header.index(label_col)
    else:
        label_idx = label_col if label_col >= 0 else width + label_col
        if not (0 <= label_idx < width):
            raise DataError(f"{path}: label column index {label_col} out of range")

    if has_header is None:
        first = rows[0][1]
        probe = [c for j, c in enumerate(first) if j != label_idx]
        has_header = any(_parse_cell(c) is None for c in probe)
    body = rows[1:] if has_header else rows
    if not body:
        raise DataError(f"dataset file {path} has a header but no data rows")

    n = width - 1
    feats = np.empty((len(body), n))
    missing: list[tuple[int, int, int]] = []  # (row_pos, col_pos, file_line)
    labels = []
    for r, (line_no, row) in enumerate(body):
        if len(row) != width:
            raise ParseError(
                f"{path}: row {line_no} has {len(row)} fields, expected {width}"
            )
        labels.append(row[label_idx].strip())
        j = 0
        for col, cell in enumerate(row):
            if col == label_idx:
                continue
            v = _parse_cell(cell)
            if v is None:
                if not impute_mean:
                    raise ParseError(
                        f"{path}: row {line_no}, column {col + 1}: "
                        f"non-numeric feature value {cell!r}"
                    )
                missing.append((r, j, line_no))
                feats[r, j] = np.nan
            else:
                feats[r, j] = v
            j += 1
    if not all(labels):
        bad = next(line for (line, row) in body if not row[label_idx].strip())
        raise ParseError(f"{path}: row {bad}: empty label")

    if missing:
        present = ~np.isnan(feats)
        counts = present.sum(axis=0)
        sums = np.where(present, feats, 0.0).sum(axis=0)
        for r, j, line_no in missing:
            if counts[j] == 0:
                raise ParseError(
                    f"{path}: feature column {j + 1} has no numeric values to impute from"
                )
            feats[r, j] = sums[j] / counts[j]

    catalog = tuple(dict.fromkeys(labels))
    return Dataset(
        name=name if name is not None else path.stem,
        features=feats,
        labels=np.array(labels, dtype=object),
        catalog=catalog,
    )


def load_feature_csv(path, has_header: bool | None = None) -> np.ndarray:
    """Load a label-free feature matrix; an empty file yields a (0, 0) array."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"feature file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    if not rows:
        return np.empty((0, 0))
    if has_header is None:
        has_header = any(_parse_cell(c) is None for c in rows[0][1])
    body = rows[1:] if has_header else rows
    if not body:
        return np.empty((0, 0))
    width = len(body[0][1])
    out = np.empty((len(body), width))
    for r, (line_no, row) in enumerate(body):
        if len(row) != width:
            raise ParseError(f"{path}: row {line_no} has {len(row)} fields, expected {width}")
        for j, cell in enumerate(row):
            v = _parse_cell(cell)
            if v is None:
                raise ParseError(
                    f"{path}: row {line_no}, column {j + 1}: non-numeric value {cell!r}"
                )
            out[r, j] = v
    return out


def write_csv(dataset: Dataset, path, include_header: bool = True) -> None:
    """Write a dataset back to CSV with full float fidelity (label column last)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if include_header:
            writer.writerow([f"f{j}" for j in range(dataset.n)] + ["label"])
        for x, lbl in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in x] + [lbl])


def fit_standardizer(data) -> StandardizationStats:
    """Per-feature mean and population sd from a Dataset or a feature matrix.

    Numerically-zero sd (constant feature) is replaced by 1 so the column
    maps to constant 0 instead of dividing by zero.
    """
    X = data.features if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if X.shape[0] < 1:
        raise DataError("cannot fit a standardizer on an empty matrix")
    mean = X.mean(axis=0)
    sd = X.std(axis=0)  # population (ddof=0)
    floor = 1e-12 * np.maximum(1.0, np.abs(mean))
    scale = np.where(sd > floor, sd, 1.0)
    return StandardizationStats(mean=mean, scale=scale)


def transform_features(stats: StandardizationStats, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != stats.mean.shape[0]:
        raise ShapeError(
            f"feature dimension {X.shape[-1]} does not match stats dimension "
            f"{stats.mean.shape[0]}"
        )
    return (X - stats.mean) / stats.scale


def apply_standardizer(stats: StandardizationStats, dataset: Dataset) -> Dataset:
    return Dataset(
        name=dataset.name,
        features=transform_features(stats, dataset.features),
        labels=dataset.labels.copy(),
        catalog=dataset.catalog,
    )


def subset(dataset: Dataset, idx) -> Dataset:
    """Row subset; the catalog keeps the parent order, filtered to present labels."""
    idx = np.asarray(idx, dtype=int)
    labels = dataset.labels[idx]
    present = set(labels)
    return Dataset(
        name=dataset.name,
        features=dataset.features[idx],
        labels=labels,
        catalog=tuple(l for l in dataset.catalog if l in present),
    )


def split_train_test(
    dataset: Dataset,
    fraction: float | None = None,
    indices=None,
    seed: int = 0,
) -> tuple[Dataset, Dataset]:
    """Disjoint, covering train/test split.

    Either a train `fraction` (rounded half-up, so the train side gets the
    extra row of an odd 50/50 split) with a seeded shuffle, or an explicit
    list of zero-based train row `indices` for exact reproduction.
    """
    N = dataset.N
    if indices is not None:
        tr = sorted(set(int(i) for i in indices))
        if any(i < 0 or i >= N for i in tr):
            raise ConfigurationError("split index out of range")
        if len(tr) != len(list(indices)):
            raise ConfigurationError("duplicate split indices")
        te = sorted(set(range(N)) - set(tr))
    else:
        if fraction is None:
            raise ConfigurationError("either fraction or indices must be given")
        if not (0.0 < fraction < 1.0):
            raise ConfigurationError(f"fraction must be in (0, 1), got {fraction!r}")
        n_train = int(math.floor(N * fraction + 0.5))
        perm = np.random.default_rng(seed).permutation(N)
        tr = sorted(perm[:n_train].tolist())
        te = sorted(perm[n_train:].tolist())
    if not tr or not te:
        raise ConfigurationError(
            f"split leaves an empty side (N={N}, train={len(tr)}, test={len(te)})"
        )
    return subset(dataset, tr), subset(dataset, te)


def load_split_indices(path) -> list[int]:
    """Read one zero-based row index per line."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"split index file not found: {path}")
    out = []
    for i, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        text = line.strip()
        if not text:
            continue
        try:
            out.append(int(text))
        except ValueError:
            raise ParseError(f"{path}: line {i}: not an integer index: {text!r}")
    return out


def labels_to_signs(dataset: Dataset) -> np.ndarray:
    """Map label tokens to -1/+1 floats; DataError if any token is neither."""
    out = np.empty(dataset.N)
    for i, lbl in enumerate(dataset.labels):
        v = _parse_cell(str(lbl))
        if v not in (-1.0, 1.0):
            raise DataError(
                f"dataset {dataset.name!r}: label {lbl!r} is not -1/+1"
            )
        out[i] = v
    return out
