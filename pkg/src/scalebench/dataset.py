"""In-memory dataset representation and categorical preprocessing.

A raw table (string/number cells plus column metadata) is cleaned, one-hot
encoded into a purely numeric `Dataset`, and classified into an imbalance
stratum.  Datasets are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "Column",
    "RawTable",
    "Dataset",
    "FoldPair",
    "LOW",
    "MEDIUM",
    "HIGH",
    "STRATA",
    "clean_strings",
    "one_hot_encode",
    "imbalance_ratio",
    "ir_stratum",
    "stratified_folds",
]

NUMERIC = "numeric"
CATEGORICAL = "categorical"
CLASS = "class"

LOW = "low"
MEDIUM = "medium"
HIGH = "high"
STRATA = (LOW, MEDIUM, HIGH)


@dataclass(frozen=True)
class Column:
    """Descriptor of one raw-table column.

    `values` holds the declared value list for categorical and class
    columns, None for numeric ones.
    """

    name: str
    kind: str
    values: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL, CLASS):
            raise ValueError(f"unknown column kind {self.kind!r}")
        if self.kind != NUMERIC and self.values is None:
            raise ValueError(f"column {self.name!r} of kind {self.kind} needs a value list")


@dataclass(frozen=True)
class RawTable:
    name: str
    columns: tuple[Column, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        n_class = sum(1 for c in self.columns if c.kind == CLASS)
        if n_class != 1:
            raise ValueError(f"table {self.name!r} must have exactly one class column, has {n_class}")

    @property
    def class_column(self) -> int:
        return next(i for i, c in enumerate(self.columns) if c.kind == CLASS)


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix with binary labels.

    `labels` contains class indices 0/1 assigned by sorted class name;
    `class_counts[i]` is the number of instances with label i and
    `positive_class` the index treated as positive by the metrics.
    """

    name: str
    features: np.ndarray
    labels: np.ndarray
    positive_class: int
    class_counts: tuple[int, int]
    feature_names: tuple[str, ...]
    class_names: tuple[str, str]

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        y = np.asarray(self.labels, dtype=np.int64)
        if X.ndim != 2 or X.shape[1] < 1:
            raise ValueError("features must be a 2-D matrix with at least one column")
        if y.shape != (X.shape[0],):
            raise ValueError("labels must be one per feature row")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must contain only 0 and 1")
        if self.positive_class not in (0, 1):
            raise ValueError("positive_class must be 0 or 1")
        if sum(self.class_counts) != X.shape[0]:
            raise ValueError("class_counts must sum to the number of instances")
        if X.shape[1] != len(self.feature_names):
            raise ValueError("feature_names must match the feature columns")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def n_instances(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class FoldPair:
    fold_index: int
    train: Dataset
    test: Dataset

    def __post_init__(self):
        if self.fold_index < 1:
            raise ValueError("fold_index starts at 1")
        if self.train.feature_names != self.test.feature_names:
            raise ValueError("train and test must share feature names")
        if self.train.class_names != self.test.class_names:
            raise ValueError("train and test must share the class name mapping")


def _clean(s: str) -> str:
    return s.strip().lower()


def clean_strings(raw: RawTable) -> RawTable:
    """Trim and lower-case categorical/class cells and declared value lists.

    Declared lists are de-duplicated after cleaning (first occurrence kept);
    numeric cells pass through untouched.
    """
    columns = []
    for col in raw.columns:
        if col.kind == NUMERIC:
            columns.append(col)
            continue
        seen = []
        for v in col.values:
            cv = _clean(v)
            if cv not in seen:
                seen.append(cv)
        columns.append(replace(col, values=tuple(seen)))

    string_cols = {i for i, c in enumerate(raw.columns) if c.kind != NUMERIC}
    rows = tuple(
        tuple(_clean(cell) if i in string_cols else cell for i, cell in enumerate(row))
        for row in raw.rows
    )
    return RawTable(name=raw.name, columns=tuple(columns), rows=rows)


def resolve_positive_name(class_values: tuple[str, ...], labels: list[str]) -> str:
    """Pick the positive class name: a literal "positive" if present,
    otherwise the minority class (ties to the lexicographically smaller)."""
    if "positive" in class_values:
        return "positive"
    counts = {v: 0 for v in class_values}
    for lab in labels:
        if lab in counts:  # undeclared labels are rejected later, with context
            counts[lab] += 1
    return min(class_values, key=lambda v: (counts[v], v))


def one_hot_encode(raw: RawTable, positive_name: str | None = None) -> Dataset:
    """Encode a cleaned table into a numeric dataset.

    Each categorical column with n declared values becomes n-1 binary
    columns (the lexicographically smallest value is dropped); numeric
    columns pass through.  Class labels map to indices 0/1 by sorted name.
    """
    ci = raw.class_column
    class_col = raw.columns[ci]
    class_values = class_col.values
    if len(class_values) != 2:
        raise ValueError(
            f"class column {class_col.name!r} must have exactly 2 distinct values, "
            f"has {len(class_values)}"
        )
    class_names = tuple(sorted(class_values))
    label_index = {name: i for i, name in enumerate(class_names)}

    raw_labels = [row[ci] for row in raw.rows]
    for r, lab in enumerate(raw_labels):
        if lab not in label_index:
            raise ValueError(
                f"row {r}: class value {lab!r} is not one of the declared {class_names}"
            )

    if positive_name is None:
        positive_name = resolve_positive_name(class_names, raw_labels)
    if positive_name not in label_index:
        raise ValueError(f"positive class {positive_name!r} is not one of {class_names}")

    feature_names: list[str] = []
    encoders = []  # (column index, slot map or None, dropped value)
    for i, col in enumerate(raw.columns):
        if col.kind == CLASS:
            continue
        if col.kind == NUMERIC:
            encoders.append((i, None, None))
            feature_names.append(col.name)
        else:
            ordered = sorted(col.values)
            kept = ordered[1:]  # drop the lexicographically smallest
            slots = {v: s for s, v in enumerate(kept)}
            encoders.append((i, slots, ordered[0]))
            feature_names.extend(f"{col.name}={v}" for v in kept)

    n = len(raw.rows)
    X = np.zeros((n, len(feature_names)), dtype=np.float64)
    for r, row in enumerate(raw.rows):
        out = 0
        for i, slots, dropped in encoders:
            if slots is None:
                X[r, out] = float(row[i])
                out += 1
            else:
                cell = row[i]
                if cell in slots:
                    X[r, out + slots[cell]] = 1.0
                elif cell != dropped:
                    raise ValueError(
                        f"row {r}: value {cell!r} not in declared values of column "
                        f"{raw.columns[i].name!r}"
                    )
                out += len(slots)

    y = np.array([label_index[lab] for lab in raw_labels], dtype=np.int64)
    counts = (int(np.sum(y == 0)), int(np.sum(y == 1)))
    return Dataset(
        name=raw.name,
        features=X,
        labels=y,
        positive_class=label_index[positive_name],
        class_counts=counts,
        feature_names=tuple(feature_names),
        class_names=class_names,
    )


def imbalance_ratio(d: Dataset) -> float:
    """Majority class count over minority class count; at least 1."""
    c0, c1 = d.class_counts
    if c0 == 0 or c1 == 0:
        raise ValueError(f"dataset {d.name!r} has an empty class: counts {d.class_counts}")
    return max(c0, c1) / min(c0, c1)


def ir_stratum(ir: float, low_bound: float = 3.0, high_bound: float = 9.0) -> str:
    """Stratum of an imbalance ratio; both bounds are closed from above
    (3.0 is still low, 9.0 is still medium)."""
    if ir < 1.0:
        raise ValueError(f"imbalance ratio must be >= 1, got {ir}")
    if ir <= low_bound:
        return LOW
    if ir <= high_bound:
        return MEDIUM
    return HIGH


def stratified_folds(d: Dataset, k: int, seed: int) -> list[FoldPair]:
    """Deterministic stratified k-fold split for datasets that do not come
    pre-split.  Per class, shuffled indices are dealt round-robin, so fold
    class proportions differ from the global ones by at most one instance.
    """
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    for cls in (0, 1):
        have = int(np.sum(d.labels == cls))
        if have < k:
            raise ValueError(
                f"class {d.class_names[cls]!r} has {have} instances, fewer than k={k}"
            )
    rng = np.random.default_rng(seed)
    test_indices = [[] for _ in range(k)]
    for cls in (0, 1):
        idx = np.flatnonzero(d.labels == cls)
        idx = idx[rng.permutation(idx.size)]
        for f in range(k):
            test_indices[f].extend(idx[f::k].tolist())

    pairs = []
    all_idx = np.arange(d.n_instances)
    for f in range(k):
        test_idx = np.array(sorted(test_indices[f]), dtype=np.intp)
        mask = np.ones(d.n_instances, dtype=bool)
        mask[test_idx] = False
        train_idx = all_idx[mask]
        pairs.append(
            FoldPair(
                fold_index=f + 1,
                train=_subset(d, train_idx),
                test=_subset(d, test_idx),
            )
        )
    return pairs


def _subset(d: Dataset, idx: np.ndarray) -> Dataset:
    y = d.labels[idx]
    return Dataset(
        name=d.name,
        features=d.features[idx],
        labels=y,
        positive_class=d.positive_class,
        class_counts=(int(np.sum(y == 0)), int(np.sum(y == 1))),
        feature_names=d.feature_names,
        class_names=d.class_names,
    )
