"""Experiment runner: the dataset x fold x scaler x model grid.

Scaling is leakage-safe (fit on the training fold only), every cell's
randomness derives from a stable hash of (master seed, dataset, fold,
model), and cells are pure, so results are byte-identical no matter how
many workers execute the grid.  Any failing cell aborts the run with its
full grid coordinates; silent holes would corrupt the rank statistics
downstream.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classifiers, ensembles, metrics, scaling
from .dataset import Dataset, FoldPair, ir_stratum
from .keel_io import N_FOLDS, ResultRecord, load_fold_pair, write_results_csv

__all__ = [
    "MONOLITHIC_MODELS",
    "POOL_MODELS",
    "DEFAULT_MODELS",
    "DEFAULT_SCALERS",
    "ExperimentConfig",
    "DatasetInfo",
    "CellResult",
    "derive_seed",
    "discover_datasets",
    "dataset_summaries",
    "run_cell",
    "run_experiment",
]

MONOLITHIC_MODELS = ("knn", "gnb", "percep", "dt", "lda")
STATIC_ENSEMBLES = ("bagging", "rf", "adaboost")
DYNAMIC_MODELS = ("ola", "lca", "mcb", "knorae", "knorau")
DEFAULT_MODELS = MONOLITHIC_MODELS + STATIC_ENSEMBLES + DYNAMIC_MODELS

# Models that inherit the bagging pool (and therefore its seed), so the
# pool is literally shared rather than retrained per method.
POOL_MODELS = ("bagging",) + DYNAMIC_MODELS

DEFAULT_SCALERS = ("NS", "SS", "MM", "MA", "RS", "QT")

POOL_SIZE = 100
N_TREES = 100
N_BOOST_ROUNDS = 100
KNN_K = 5
K_ROC = 7


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; (config, seed) determines every output byte."""

    data_dir: str
    out_dir: str
    datasets: tuple[str, ...] | None = None  # None discovers every dataset
    exclude: tuple[str, ...] = ()
    scalers: tuple[str, ...] = DEFAULT_SCALERS
    models: tuple[str, ...] = DEFAULT_MODELS
    seed: int = 0
    jobs: int = 1
    low_bound: float = 3.0
    high_bound: float = 9.0

    def __post_init__(self):
        if not self.scalers:
            raise ValueError("need at least one scaler")
        if not self.models:
            raise ValueError("need at least one model")
        for s in self.scalers:
            scaling.scaler_from_id(s)
        unknown = [m for m in self.models if m not in DEFAULT_MODELS]
        if unknown:
            raise ValueError(
                f"unknown models {unknown}; known: {', '.join(DEFAULT_MODELS)}"
            )
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if not 1.0 <= self.low_bound < self.high_bound:
            raise ValueError("stratum bounds must satisfy 1 <= low < high")


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    n_instances: int
    majority: int
    minority: int
    ir: float
    stratum: str


@dataclass(frozen=True)
class CellResult:
    f1: float
    gmean: float
    predictions: np.ndarray


def derive_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit seed from the master seed and grid coordinates."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master_seed)).encode())
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "big")


def discover_datasets(data_dir) -> list[str]:
    """Dataset names: subdirectories of data_dir holding pre-split fold files."""
    root = Path(data_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"data directory {root} does not exist")
    names = [
        p.name
        for p in root.iterdir()
        if p.is_dir() and (p / f"{p.name}-5-1tra.dat").is_file()
    ]
    return sorted(names)


def resolve_datasets(cfg: ExperimentConfig) -> list[str]:
    names = list(cfg.datasets) if cfg.datasets else discover_datasets(cfg.data_dir)
    names = sorted(n for n in names if n not in set(cfg.exclude))
    if not names:
        raise ValueError(f"no datasets selected under {cfg.data_dir}")
    return names


def _full_dataset_counts(pair: FoldPair) -> tuple[int, int]:
    tr, te = pair.train.class_counts, pair.test.class_counts
    return (tr[0] + te[0], tr[1] + te[1])


def dataset_summaries(cfg: ExperimentConfig, names=None) -> list[DatasetInfo]:
    """Per-dataset imbalance ratio and stratum, from fold 1 (train + test
    of any fold reunite the full dataset)."""
    names = resolve_datasets(cfg) if names is None else list(names)
    infos = []
    for name in names:
        pair = load_fold_pair(Path(cfg.data_dir) / name, name, 1)
        c0, c1 = _full_dataset_counts(pair)
        ir = max(c0, c1) / min(c0, c1)
        infos.append(
            DatasetInfo(
                name=name,
                n_instances=c0 + c1,
                majority=max(c0, c1),
                minority=min(c0, c1),
                ir=ir,
                stratum=ir_stratum(ir, cfg.low_bound, cfg.high_bound),
            )
        )
    return infos


def _train_and_predict(
    model_id: str,
    train: Dataset,
    test_features: np.ndarray,
    seed: int,
    pool_cache: dict,
) -> np.ndarray:
    if model_id == "knn":
        return classifiers.train_knn(train, k=KNN_K).predict(test_features)
    if model_id == "gnb":
        return classifiers.train_gnb(train).predict(test_features)
    if model_id == "percep":
        return classifiers.train_perceptron(train, seed=seed).predict(test_features)
    if model_id == "dt":
        return classifiers.train_tree(train).predict(test_features)
    if model_id == "lda":
        return classifiers.train_lda(train).predict(test_features)
    if model_id == "rf":
        return ensembles.train_random_forest(train, n_trees=N_TREES, seed=seed).predict(
            test_features
        )
    if model_id == "adaboost":
        return ensembles.train_adaboost(train, n_rounds=N_BOOST_ROUNDS).predict(
            test_features
        )
    if model_id in POOL_MODELS:
        pool = pool_cache.get("pool")
        if pool is None:
            pool = ensembles.train_bagging(
                train, pool_size=POOL_SIZE, seed=seed, k_roc=min(K_ROC, train.n_instances)
            )
            pool_cache["pool"] = pool
        return ensembles.predict_pool_batch(pool, test_features, model_id)
    raise ValueError(f"unknown model id {model_id!r}")


def run_cell(
    fold: FoldPair,
    scaler_kind: scaling.ScalerKind,
    model_id: str,
    seed: int,
    pool_cache: dict | None = None,
) -> CellResult:
    """One grid cell: scale (fitting on train only), train, predict, score.

    The no-scaling baseline skips transformation entirely.  A pool cache
    may be passed so the dynamic-selection models reuse the bagging pool
    they inherit; with the same seed the retrained pool would be
    identical, caching just avoids the recomputation.
    """
    if scaler_kind.tag == "NS":
        train, test_X = fold.train, fold.test.features
    else:
        fitted = scaling.fit(scaler_kind, fold.train.features)
        train = _with_features(fold.train, scaling.transform(fitted, fold.train.features))
        test_X = scaling.transform(fitted, fold.test.features)

    predictions = _train_and_predict(
        model_id, train, test_X, seed, pool_cache if pool_cache is not None else {}
    )
    cm = metrics.confusion(predictions, fold.test.labels, fold.test.positive_class)
    return CellResult(
        f1=metrics.f1(cm), gmean=metrics.g_mean(cm), predictions=predictions
    )


def _with_features(d: Dataset, features: np.ndarray) -> Dataset:
    return Dataset(
        name=d.name,
        features=features,
        labels=d.labels,
        positive_class=d.positive_class,
        class_counts=d.class_counts,
        feature_names=d.feature_names,
        class_names=d.class_names,
    )


def _run_unit(args) -> list[ResultRecord]:
    """All models of one (dataset, fold, scaler) cell group.

    Self-contained so units can execute in any process in any order.
    """
    data_dir, name, fold_index, scaler_id, models, master_seed = args
    pair = load_fold_pair(Path(data_dir) / name, name, fold_index)
    kind = scaling.scaler_from_id(scaler_id)
    pool_cache: dict = {}
    records = []
    for model_id in models:
        seed_key = "bagging" if model_id in POOL_MODELS else model_id
        seed = derive_seed(master_seed, name, fold_index, seed_key)
        try:
            cell = run_cell(pair, kind, model_id, seed, pool_cache)
        except Exception as exc:
            raise RuntimeError(
                f"cell failed: dataset={name} fold={fold_index} "
                f"model={model_id} scaler={scaler_id}: {exc}"
            ) from exc
        records.append(
            ResultRecord(
                dataset=name,
                fold=fold_index,
                model=model_id,
                scaler=scaler_id,
                f1=cell.f1,
                gmean=cell.gmean,
            )
        )
    return records


def run_experiment(cfg: ExperimentConfig) -> list[ResultRecord]:
    """Execute the full grid and persist results.csv under cfg.out_dir.

    One record per (dataset, fold, model, scaler); the record set is
    independent of cfg.jobs.
    """
    names = resolve_datasets(cfg)
    units = [
        (cfg.data_dir, name, fold, scaler_id, cfg.models, cfg.seed)
        for name in names
        for fold in range(1, N_FOLDS + 1)
        for scaler_id in cfg.scalers
    ]
    if cfg.jobs == 1:
        unit_records = [_run_unit(u) for u in units]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            unit_records = list(pool.map(_run_unit, units, chunksize=1))

    records = [r for unit in unit_records for r in unit]
    expected = len(names) * N_FOLDS * len(cfg.scalers) * len(cfg.models)
    if len(records) != expected:
        raise RuntimeError(
            f"incomplete grid: {len(records)} records, expected {expected}"
        )
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results_csv(records, out_dir / "results.csv")
    return records
