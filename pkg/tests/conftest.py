from pathlib import Path

import numpy as np
import pytest

from scalebench.dataset import Dataset

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data" / "keel"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    assert DATA_DIR.is_dir(), "bundled fixture datasets are missing; run scripts/generate_fixtures.py"
    return DATA_DIR


def make_dataset(X, y, name="fixture", positive=1) -> Dataset:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    return Dataset(
        name=name,
        features=X,
        labels=y,
        positive_class=positive,
        class_counts=(int(np.sum(y == 0)), int(np.sum(y == 1))),
        feature_names=tuple(f"a{i}" for i in range(X.shape[1])),
        class_names=("negative", "positive"),
    )


@pytest.fixture
def blob_dataset() -> Dataset:
    """Two separable-ish blobs with wildly different feature scales."""
    rng = np.random.default_rng(7)
    n, d = 120, 5
    y = (np.arange(n) % 3 == 0).astype(int)
    direction = rng.normal(size=d)
    direction /= np.linalg.norm(direction)
    Z = rng.normal(size=(n, d)) + 1.8 * np.outer(y, direction)
    scales = np.array([1e-3, 1.0, 40.0, 1e3, 0.2])
    return make_dataset(Z * scales + scales * 0.5, y, name="blobs")
