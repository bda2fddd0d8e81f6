"""Static ensembles and dynamic classifier/ensemble selection.

The bagging pool (perceptrons over bootstrap replicates) doubles as the
shared pool for the dynamic methods: OLA, LCA and MCB select one base
model per query, KNORA-E/KNORA-U select a subset, all judged on the
region of competence — the query's k nearest rows of the selection data
(here, the training fold itself).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classifiers import TreeModel, fit_perceptron, fit_tree
from .dataset import Dataset

__all__ = [
    "Pool",
    "RegionOfCompetence",
    "ForestModel",
    "AdaboostModel",
    "MCB_SIMILARITY_THRESHOLD",
    "MCB_SELECTION_MARGIN",
    "make_pool",
    "train_bagging",
    "feature_subset_size",
    "train_random_forest",
    "train_adaboost",
    "region_of_competence",
    "predict_majority",
    "predict_ola",
    "predict_lca",
    "predict_mcb",
    "predict_knora_e",
    "predict_knora_u",
    "predict_pool_batch",
    "knora_e_select",
    "knora_u_weights",
    "ola_competences",
    "lca_competences",
]

MCB_SIMILARITY_THRESHOLD = 0.7
MCB_SELECTION_MARGIN = 0.1


@dataclass(frozen=True)
class Pool:
    """Base models plus the reference data used to judge local competence.

    `dsel_predictions[i, j]` caches base model i's prediction on selection
    row j; `dsel_correct` is the matching correctness bit matrix.
    """

    base_models: tuple
    dsel_features: np.ndarray
    dsel_labels: np.ndarray
    k_roc: int
    dsel_predictions: np.ndarray
    dsel_correct: np.ndarray

    def __post_init__(self):
        if not 1 <= self.k_roc <= self.dsel_labels.size:
            raise ValueError(
                f"k_roc must be in 1..{self.dsel_labels.size}, got {self.k_roc}"
            )

    @property
    def size(self) -> int:
        return len(self.base_models)


@dataclass(frozen=True)
class RegionOfCompetence:
    """Nearest selection rows for one query, nearest first."""

    indices: np.ndarray  # into dsel, ordered by (distance, index)
    labels: np.ndarray
    correct: np.ndarray  # (pool_size, region_size) correctness bits


def train_bagging(
    train: Dataset,
    pool_size: int = 100,
    seed: int = 0,
    k_roc: int = 7,
    max_iter: int = 1000,
    tol: float = 1e-3,
) -> Pool:
    """Perceptron pool over seeded bootstrap replicates of the training fold.

    A bootstrap sample that contains a single class is redrawn (up to 10
    retries, then accepted: the constant predictor stands).  The full
    training fold serves as the selection data.
    """
    if train.n_instances < 1:
        raise ValueError("empty training set")
    X, y = train.features, train.labels
    n = train.n_instances
    models = []
    for i in range(pool_size):
        rng = np.random.default_rng([seed, i])
        idx = rng.integers(0, n, n)
        for _ in range(10):
            if 0 < y[idx].sum() < n:
                break
            idx = rng.integers(0, n, n)
        models.append(fit_perceptron(X[idx], y[idx], rng, max_iter=max_iter, tol=tol))
    return make_pool(tuple(models), X, y, min(k_roc, n))


def make_pool(models: tuple, dsel_X: np.ndarray, dsel_y: np.ndarray, k_roc: int) -> Pool:
    """Assemble a pool around arbitrary base models, caching their
    predictions over the selection data."""
    preds = np.vstack([m.predict(dsel_X) for m in models])
    return Pool(
        base_models=models,
        dsel_features=dsel_X,
        dsel_labels=dsel_y,
        k_roc=k_roc,
        dsel_predictions=preds,
        dsel_correct=preds == dsel_y[None, :],
    )


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeModel, ...]

    def predict(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        ones = np.zeros(X.shape[0], dtype=np.int64)
        for tree in self.trees:
            ones += tree.predict(X)
        return (2 * ones > len(self.trees)).astype(np.int64)  # tie -> class 0


def feature_subset_size(n_features: int) -> int:
    """Features considered per forest split: ceil(sqrt(n_features))."""
    m = math.isqrt(n_features)
    return m if m * m == n_features else m + 1


def train_random_forest(
    train: Dataset,
    n_trees: int = 100,
    seed: int = 0,
    max_features: int | None = None,
    bootstrap: bool = True,
) -> ForestModel:
    """Bagged CART trees with a random feature subset per split
    (ceil(sqrt(n_features)) unless overridden); majority vote."""
    if train.n_instances < 1:
        raise ValueError("empty training set")
    X, y = train.features, train.labels
    n, d = X.shape
    m = feature_subset_size(d) if max_features is None else max_features
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        idx = rng.integers(0, n, n) if bootstrap else np.arange(n)
        tree_seed = int(rng.integers(0, 2**31 - 1))
        trees.append(
            fit_tree(X[idx], y[idx], max_features=min(m, d), seed=tree_seed)
        )
    return ForestModel(trees=tuple(trees))


@dataclass(frozen=True)
class AdaboostModel:
    stumps: tuple[TreeModel, ...]
    alphas: tuple[float, ...]

    def predict(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        score = np.zeros(X.shape[0])
        for stump, alpha in zip(self.stumps, self.alphas):
            score += alpha * (2.0 * stump.predict(X) - 1.0)
        return (score > 0.0).astype(np.int64)  # tie -> class 0


def train_adaboost(train: Dataset, n_rounds: int = 100) -> AdaboostModel:
    """Discrete two-class AdaBoost over depth-1 trees (weighted Gini).

    A round with zero weighted error keeps its stump with a capped weight
    of 10 and stops; a round with error >= 0.5 discards the stump and
    stops.
    """
    if train.n_instances < 2 or 0 in train.class_counts:
        raise ValueError("AdaBoost needs at least 2 instances with both classes present")
    X, y = train.features, train.labels
    n = train.n_instances
    w = np.full(n, 1.0 / n)
    stumps: list[TreeModel] = []
    alphas: list[float] = []
    for _ in range(n_rounds):
        stump = fit_tree(X, y, sample_weight=w, max_depth=1)
        h = stump.predict(X)
        miss = h != y
        eps = float(w[miss].sum())
        if eps == 0.0:
            stumps.append(stump)
            alphas.append(10.0)
            break
        if eps >= 0.5:
            break
        alpha = 0.5 * math.log((1.0 - eps) / eps)
        stumps.append(stump)
        alphas.append(alpha)
        w *= np.exp(np.where(miss, alpha, -alpha))
        total = w.sum()
        if not np.isfinite(total) or total <= 0.0:
            break  # weights degenerated numerically; keep the rounds so far
        w /= total
    return AdaboostModel(stumps=tuple(stumps), alphas=tuple(alphas))


# ------------------------------------------------------- dynamic selection

def _majority(preds: np.ndarray) -> int:
    votes = np.bincount(preds, minlength=2)
    return 1 if votes[1] > votes[0] else 0


def _weighted_majority(preds: np.ndarray, weights: np.ndarray) -> int:
    w1 = float(weights[preds == 1].sum())
    w0 = float(weights[preds == 0].sum())
    return 1 if w1 > w0 else 0


def ola_competences(correct_region: np.ndarray) -> np.ndarray:
    """Mean correctness of each base model over the region."""
    return correct_region.mean(axis=1)


def lca_competences(
    preds_x: np.ndarray, region_labels: np.ndarray, correct_region: np.ndarray
) -> np.ndarray:
    """Per-model accuracy restricted to region rows whose true label equals
    the model's own prediction for the query; no such rows scores 0."""
    comps = np.zeros(preds_x.size)
    for i, wl in enumerate(preds_x):
        mask = region_labels == wl
        denom = int(mask.sum())
        if denom > 0:
            comps[i] = float(correct_region[i, mask].sum()) / denom
    return comps


def knora_e_select(correct_region: np.ndarray) -> np.ndarray | None:
    """Indices of local oracles at the largest region size that has any.

    Starting from the full region, models correct on every one of the k
    nearest rows are the oracles; with none, the farthest row is dropped
    and the search repeats.  None means no oracle exists at any size
    (callers fall back to the whole pool).
    """
    all_correct_up_to = np.cumprod(correct_region.astype(bool), axis=1)
    for k in range(correct_region.shape[1], 0, -1):
        sel = np.flatnonzero(all_correct_up_to[:, k - 1])
        if sel.size:
            return sel
    return None


def knora_u_weights(correct_region: np.ndarray) -> np.ndarray:
    """One vote per correctly classified region row."""
    return correct_region.sum(axis=1)


def region_of_competence(pool: Pool, x) -> RegionOfCompetence:
    """The pool's k_roc nearest selection rows to `x` by Euclidean
    distance, ties resolved to the lower row index."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    diff = pool.dsel_features - x
    d2 = np.einsum("ij,ij->i", diff, diff)
    idx = np.argsort(d2, kind="stable")[: pool.k_roc]
    return RegionOfCompetence(
        indices=idx,
        labels=pool.dsel_labels[idx],
        correct=pool.dsel_correct[:, idx],
    )


def _base_predictions(pool: Pool, X: np.ndarray) -> np.ndarray:
    return np.vstack([m.predict(X) for m in pool.base_models])


def predict_majority(pool: Pool, x) -> int:
    """Unweighted majority vote of the whole pool; tie to the lower class."""
    X = np.asarray(x, dtype=np.float64).reshape(1, -1)
    return int(_majority(_base_predictions(pool, X)[:, 0]))


def predict_ola(pool: Pool, x) -> int:
    return int(predict_pool_batch(pool, np.asarray(x).reshape(1, -1), "ola")[0])


def predict_lca(pool: Pool, x) -> int:
    return int(predict_pool_batch(pool, np.asarray(x).reshape(1, -1), "lca")[0])


def predict_mcb(pool: Pool, x) -> int:
    return int(predict_pool_batch(pool, np.asarray(x).reshape(1, -1), "mcb")[0])


def predict_knora_e(pool: Pool, x) -> int:
    return int(predict_pool_batch(pool, np.asarray(x).reshape(1, -1), "knorae")[0])


def predict_knora_u(pool: Pool, x) -> int:
    return int(predict_pool_batch(pool, np.asarray(x).reshape(1, -1), "knorau")[0])


def predict_pool_batch(pool: Pool, features, method: str) -> np.ndarray:
    """Predict a batch of query instances with one dynamic method.

    Base predictions and regions are computed vectorized once per batch;
    per-query selection then follows each method's rule.
    """
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    base_preds = _base_predictions(pool, X)  # (pool, n)
    if method == "bagging":
        return np.array([_majority(base_preds[:, q]) for q in range(X.shape[0])])

    d2 = (
        np.sum(X * X, axis=1)[:, None]
        - 2.0 * (X @ pool.dsel_features.T)
        + np.sum(pool.dsel_features * pool.dsel_features, axis=1)[None, :]
    )
    out = np.empty(X.shape[0], dtype=np.int64)
    for q in range(X.shape[0]):
        region_idx = np.argsort(d2[q], kind="stable")[: pool.k_roc]
        correct = pool.dsel_correct[:, region_idx]
        preds_x = base_preds[:, q]
        if method == "ola":
            out[q] = preds_x[int(np.argmax(ola_competences(correct)))]
        elif method == "lca":
            comps = lca_competences(preds_x, pool.dsel_labels[region_idx], correct)
            out[q] = preds_x[int(np.argmax(comps))]
        elif method == "mcb":
            out[q] = _mcb_one(pool, region_idx, correct, preds_x)
        elif method == "knorae":
            sel = knora_e_select(correct)
            chosen = preds_x if sel is None else preds_x[sel]
            out[q] = _majority(chosen)
        elif method == "knorau":
            weights = knora_u_weights(correct)
            if weights.sum() == 0:
                out[q] = _majority(preds_x)
            else:
                keep = weights > 0
                out[q] = _weighted_majority(preds_x[keep], weights[keep])
        else:
            raise ValueError(f"unknown dynamic method {method!r}")
    return out


def _mcb_one(
    pool: Pool,
    region_idx: np.ndarray,
    correct: np.ndarray,
    preds_x: np.ndarray,
    similarity_threshold: float = MCB_SIMILARITY_THRESHOLD,
    selection_margin: float = MCB_SELECTION_MARGIN,
) -> int:
    """MCB: filter the region by decision similarity to the query, rank by
    overall local accuracy, and fall back to the pool majority when the
    best model's margin over the runner-up is too small."""
    region_preds = pool.dsel_predictions[:, region_idx]  # (pool, k)
    sims = (region_preds == preds_x[:, None]).mean(axis=0)
    keep = sims >= similarity_threshold
    filtered = correct[:, keep] if keep.any() else correct
    comps = ola_competences(filtered)
    best = int(np.argmax(comps))
    if comps.size == 1:
        return int(preds_x[best])
    second = float(np.max(np.delete(comps, best)))
    if comps[best] - second > selection_margin:
        return int(preds_x[best])
    return _majority(preds_x)
