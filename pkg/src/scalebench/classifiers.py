"""Monolithic classifiers spanning the scale-sensitivity spectrum.

Every predictor is a frozen dataclass with a deterministic batch
`predict(features) -> labels`; all tie-breaks resolve to the lower index
so results are reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dataset import Dataset

__all__ = [
    "KnnModel",
    "GnbModel",
    "PerceptronModel",
    "TreeModel",
    "LdaModel",
    "train_knn",
    "train_gnb",
    "train_perceptron",
    "train_tree",
    "train_lda",
]


# ---------------------------------------------------------------- KNN

@dataclass(frozen=True)
class KnnModel:
    train_features: np.ndarray
    train_labels: np.ndarray
    k: int

    def predict(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        d2 = _squared_distances(X, self.train_features)
        dist = np.sqrt(np.maximum(d2, 0.0))
        out = np.empty(X.shape[0], dtype=np.int64)
        for i in range(X.shape[0]):
            # Stable sort: equal distances keep ascending row index.
            order = np.argsort(dist[i], kind="stable")[: self.k]
            out[i] = _knn_vote(self.train_labels[order], dist[i][order])
        return out


def _squared_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return (
        np.sum(A * A, axis=1)[:, None]
        - 2.0 * (A @ B.T)
        + np.sum(B * B, axis=1)[None, :]
    )


def _knn_vote(labels: np.ndarray, dists: np.ndarray) -> int:
    counts = np.bincount(labels, minlength=2)
    if counts[0] != counts[1]:
        return int(np.argmax(counts))
    s0 = float(dists[labels == 0].sum())
    s1 = float(dists[labels == 1].sum())
    if s0 != s1:
        return 0 if s0 < s1 else 1
    return 0


def train_knn(train: Dataset, k: int = 5) -> KnnModel:
    """Lazy nearest-neighbour model: majority label of the k Euclidean
    nearest training rows; vote ties go to the class with the smaller
    summed neighbour distance, then to the lower class index."""
    if not 1 <= k <= train.n_instances:
        raise ValueError(f"k must be in 1..{train.n_instances}, got {k}")
    return KnnModel(train_features=train.features, train_labels=train.labels, k=k)


# ---------------------------------------------------------------- GNB

@dataclass(frozen=True)
class GnbModel:
    log_priors: np.ndarray  # (2,)
    means: np.ndarray       # (2, d)
    variances: np.ndarray   # (2, d), smoothed > 0

    def predict(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        scores = np.empty((X.shape[0], 2))
        for c in (0, 1):
            var = self.variances[c]
            log_density = -0.5 * (
                np.log(2.0 * np.pi * var) + (X - self.means[c]) ** 2 / var
            )
            scores[:, c] = self.log_priors[c] + log_density.sum(axis=1)
        return np.argmax(scores, axis=1)  # argmax takes the lower index on ties


def train_gnb(train: Dataset) -> GnbModel:
    """Gaussian naive Bayes with population variances and smoothing of
    1e-9 times the largest whole-training-set feature variance."""
    X, y = train.features, train.labels
    if train.class_counts[0] == 0 or train.class_counts[1] == 0:
        raise ValueError("each class needs at least one training instance")
    eps = 1e-9 * float(X.var(axis=0).max())
    if eps == 0.0:
        eps = 1e-9  # all-constant features; keep densities finite
    priors = np.array(train.class_counts, dtype=np.float64) / train.n_instances
    means = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
    variances = np.vstack([X[y == c].var(axis=0) for c in (0, 1)]) + eps
    return GnbModel(log_priors=np.log(priors), means=means, variances=variances)


# ---------------------------------------------------------------- Perceptron

@dataclass(frozen=True)
class PerceptronModel:
    weights: np.ndarray
    bias: float
    n_epochs: int

    def predict(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        return (X @ self.weights + self.bias >= 0.0).astype(np.int64)


def fit_perceptron(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    max_iter: int = 1000,
    tol: float = 1e-3,
) -> PerceptronModel:
    """Classic perceptron epochs with per-epoch shuffling.

    Training stops when an epoch's error rate fails to improve on the best
    seen by more than `tol`, or after `max_iter` epochs.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    yf = y.astype(np.float64)
    w = np.zeros(X.shape[1], dtype=np.float64)
    b = 0.0
    best = np.inf
    epochs = 0
    for _ in range(max_iter):
        order = rng.permutation(X.shape[0])
        b = _kernels.perceptron_pass(w, b, X, yf, order)
        epochs += 1
        err = float(np.mean((X @ w + b >= 0.0) != (yf == 1.0)))
        if best - err <= tol:
            break
        best = err
    return PerceptronModel(weights=w, bias=float(b), n_epochs=epochs)


def train_perceptron(
    train: Dataset, max_iter: int = 1000, tol: float = 1e-3, seed: int = 0
) -> PerceptronModel:
    if train.n_instances < 1:
        raise ValueError("empty training set")
    rng = np.random.default_rng(seed)
    return fit_perceptron(train.features, train.labels, rng, max_iter=max_iter, tol=tol)


# ---------------------------------------------------------------- CART

@dataclass(frozen=True)
class TreeModel:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_class: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def predict(self, features) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(np.asarray(features, dtype=np.float64)))
        return _kernels.tree_predict(
            self.feature, self.threshold, self.left, self.right, self.leaf_class, X
        )


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray | None = None,
    max_depth: int = -1,
    max_features: int = 0,
    seed: int = 0,
) -> TreeModel:
    X = np.ascontiguousarray(X, dtype=np.float64)
    w = np.ones(X.shape[0]) if sample_weight is None else np.asarray(sample_weight, float)
    nodes = _kernels.build_tree(X, y.astype(np.int64), w, max_depth, max_features, seed)
    return TreeModel(*nodes)


def train_tree(train: Dataset) -> TreeModel:
    """CART with best-first Gini splits, midpoint thresholds, no depth
    limit, and order-based tie-breaks (lower feature index, then lower
    threshold), which makes its predictions invariant under strictly
    increasing per-feature rescalings."""
    if train.n_instances < 1:
        raise ValueError("empty training set")
    return fit_tree(train.features, train.labels)


# ---------------------------------------------------------------- LDA

@dataclass(frozen=True)
class LdaModel:
    coefs: np.ndarray       # (2, d)
    intercepts: np.ndarray  # (2,)

    def predict(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        scores = X @ self.coefs.T + self.intercepts
        return np.argmax(scores, axis=1)


def train_lda(train: Dataset) -> LdaModel:
    """Linear discriminant with pooled within-class covariance (divided by
    n - 2) and a small trace-scaled ridge for invertibility."""
    X, y = train.features, train.labels
    for c in (0, 1):
        if train.class_counts[c] < 2:
            raise ValueError(
                f"class {train.class_names[c]!r} has {train.class_counts[c]} instances; "
                "LDA needs at least 2 per class"
            )
    n, d = X.shape
    means = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
    pooled = np.zeros((d, d))
    for c in (0, 1):
        centered = X[y == c] - means[c]
        pooled += centered.T @ centered
    pooled /= n - 2
    ridge = 1e-6 * np.trace(pooled) / d
    if ridge == 0.0:
        ridge = 1e-12  # all-constant features
    pooled[np.diag_indices(d)] += ridge

    priors = np.array(train.class_counts, dtype=np.float64) / n
    coefs = np.linalg.solve(pooled, means.T).T
    intercepts = -0.5 * np.sum(coefs * means, axis=1) + np.log(priors)
    return LdaModel(coefs=coefs, intercepts=intercepts)
