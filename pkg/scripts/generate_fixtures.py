#!/usr/bin/env python3
"""Regenerate the bundled KEEL-format fixture datasets under data/keel/.

Each fixture mirrors a real dataset from the KEEL imbalanced-data
repository in name, class counts (hence imbalance ratio) and attribute
layout, but its feature values are synthesized: class-conditional
Gaussian signal in a normalized space, then per-feature distortions
(wildly different scales and offsets, heavy tails, outliers, integer
quantization) so that scale-sensitive learners genuinely suffer on the
raw values.  Generation is fully seeded; rerunning this script leaves
the files byte-identical.

Writes, per dataset, the pre-split stratified 5-fold files
<name>-5-<i>tra.dat / <name>-5-<i>tst.dat into data/keel/<name>/, plus a
catalog.csv with the repository's published class counts and 2-decimal
imbalance ratios.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from scalebench.dataset import CATEGORICAL, CLASS, NUMERIC, Column, RawTable
from scalebench.keel_io import format_keel

MASTER_SEED = 20240917

# name, majority count, minority count, published IR, attribute family,
# numeric attribute count, categorical columns ((name, values) pairs).
CATALOG = [
    ("glass1", 138, 76, "1.82", "glass", 9, ()),
    ("ecoli-0_vs_1", 143, 77, "1.86", "ecoli", 7, ()),
    ("wisconsin", 444, 239, "1.86", "wisconsin", 9, ()),
    ("pima", 500, 268, "1.87", "pima", 8, ()),
    ("iris0", 100, 50, "2.00", "iris", 4, ()),
    ("glass0", 144, 70, "2.06", "glass", 9, ()),
    ("haberman", 225, 81, "2.78", "haberman", 3, ()),
    ("glass-0-1-2-3_vs_4-5-6", 163, 51, "3.20", "glass", 9, ()),
    ("ecoli1", 259, 77, "3.36", "ecoli", 7, ()),
    ("new-thyroid1", 180, 35, "5.14", "newthyroid", 5, ()),
    ("ecoli2", 284, 52, "5.46", "ecoli", 7, ()),
    ("glass6", 185, 29, "6.38", "glass", 9, ()),
    ("ecoli3", 301, 35, "8.60", "ecoli", 7, ()),
    ("ecoli-0-3-4_vs_5", 180, 20, "9.00", "ecoli", 7, ()),
    ("yeast-2_vs_4", 463, 51, "9.08", "yeast", 8, ()),
    ("ecoli-0-6-7_vs_3-5", 200, 22, "9.09", "ecoli", 7, ()),
    ("ecoli-0-2-3-4_vs_5", 182, 20, "9.10", "ecoli", 7, ()),
    ("glass-0-1-5_vs_2", 155, 17, "9.12", "glass", 9, ()),
    ("glass-0-4_vs_5", 83, 9, "9.22", "glass", 9, ()),
    ("ecoli-0-6-7_vs_5", 200, 20, "10.00", "ecoli", 6, ()),
    ("glass-0-1-6_vs_2", 175, 17, "10.29", "glass", 9, ()),
    ("glass2", 197, 17, "11.59", "glass", 9, ()),
    ("cleveland-0_vs_4", 160, 13, "12.31", "cleveland", 13, ()),
    ("glass4", 201, 13, "15.46", "glass", 9, ()),
    ("shuttle-c2-vs-c4", 123, 6, "20.50", "shuttle", 9, ()),
    ("glass5", 205, 9, "22.78", "glass", 9, ()),
    ("poker-9_vs_7", 236, 8, "29.50", "poker", 10, ()),
    ("winequality-white-9_vs_4", 163, 5, "32.60", "winequality", 11, ()),
    ("ecoli-0-1-3-7_vs_2-6", 274, 7, "39.14", "ecoli", 7, ()),
    ("abalone9-18", 689, 42, "16.40", "abalone", 7, (("Sex", ("M", "F", "I")),)),
    ("abalone19", 4142, 32, "129.44", "abalone", 7, (("Sex", ("M", "F", "I")),)),
]

FAMILY_ATTRS = {
    "glass": ("RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe"),
    "ecoli": ("Mcg", "Gvh", "Lip", "Chg", "Aac", "Alm1", "Alm2"),
    "iris": ("SepalLength", "SepalWidth", "PetalLength", "PetalWidth"),
    "haberman": ("Age", "Year", "Positive"),
    "wisconsin": (
        "ClumpThickness", "CellSize", "CellShape", "MarginalAdhesion",
        "EpithelialSize", "BareNuclei", "BlandChromatin", "NormalNucleoli", "Mitoses",
    ),
    "pima": ("Preg", "Plas", "Pres", "Skin", "Insu", "Mass", "Pedi", "Age"),
    "newthyroid": ("T3resin", "Thyroxin", "Triiodothyronine", "Thyroidstimulating", "TSH_value"),
    "yeast": ("Mcg", "Gvh", "Alm", "Mit", "Erl", "Pox", "Vac", "Nuc"),
    "cleveland": (
        "Age", "Sex", "Cp", "Trestbps", "Chol", "Fbs", "Restecg",
        "Thalach", "Exang", "Oldpeak", "Slope", "Ca", "Thal",
    ),
    "shuttle": tuple(f"A{i}" for i in range(1, 10)),
    "poker": ("S1", "C1", "S2", "C2", "S3", "C3", "S4", "C4", "S5", "C5"),
    "winequality": (
        "FixedAcidity", "VolatileAcidity", "CitricAcid", "ResidualSugar", "Chlorides",
        "FreeSulfurDioxide", "TotalSulfurDioxide", "Density", "PH", "Sulphates", "Alcohol",
    ),
    "abalone": (
        "Length", "Diameter", "Height", "Whole_weight",
        "Shucked_weight", "Viscera_weight", "Shell_weight",
    ),
}


def synth_features(n_pos: int, n_neg: int, d: int, rng: np.random.Generator):
    """Class-conditional Gaussian signal, then realistic distortions."""
    n = n_pos + n_neg
    y = np.zeros(n, dtype=np.int64)
    y[rng.permutation(n)[:n_pos]] = 1

    direction = rng.normal(size=d)
    direction /= np.linalg.norm(direction)
    separation = rng.uniform(1.3, 2.4)
    Z = rng.normal(size=(n, d)) * rng.uniform(0.6, 1.4, size=d)
    Z[y == 1] += separation * direction

    # Heavy tails on some columns (monotone, so signal survives).
    heavy = rng.random(d) < 0.3
    for j in np.flatnonzero(heavy):
        Z[:, j] = np.sinh(Z[:, j])

    # Sparse additive outliers on some columns.
    for j in np.flatnonzero(rng.random(d) < 0.25):
        k = max(1, n // 60)
        rows = rng.choice(n, size=k, replace=False)
        Z[rows, j] += rng.choice((-1.0, 1.0), size=k) * rng.uniform(8.0, 25.0, size=k)

    # Per-feature scale/offset distortion: this is what separates the
    # scale-sensitive learners from the invariant ones.  Values are kept at
    # full float precision: quantizing them onto a decimal grid would let
    # test values land exactly on split midpoints, where post-rescaling
    # rounding could flip a comparison.
    scales = 10.0 ** rng.uniform(-2.0, 3.0, d)
    offsets = rng.uniform(-5.0, 5.0, d) * scales
    return Z * scales + offsets, y


def five_fold_test_indices(y: np.ndarray, rng: np.random.Generator) -> list[np.ndarray]:
    """Stratified round-robin assignment of rows to the 5 test folds."""
    folds: list[list[int]] = [[] for _ in range(5)]
    for cls in (0, 1):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(idx.size)]
        for f in range(5):
            folds[f].extend(idx[f::5].tolist())
    return [np.array(sorted(f), dtype=np.intp) for f in folds]


def build_dataset(name, majority, minority, family, n_num, categorical, rng):
    """Returns (columns, rows, numeric ranges) for one full dataset."""
    X, y = synth_features(minority, majority, n_num, rng)
    n = y.size

    attr_names = FAMILY_ATTRS[family][:n_num]
    assert len(attr_names) == n_num, (name, family, n_num)

    cat_cells = []
    cat_columns = []
    for cat_name, values in categorical:
        # Mildly class-dependent category frequencies.
        base = rng.dirichlet(np.ones(len(values)) * 4.0)
        skew = rng.dirichlet(np.ones(len(values)) * 2.0)
        cells = []
        for i in range(n):
            p = skew if y[i] == 1 else base
            cells.append(values[rng.choice(len(values), p=p)])
        cat_cells.append(cells)
        cat_columns.append(Column(name=cat_name, kind=CATEGORICAL, values=tuple(values)))

    # Class tokens: value order varies across datasets like real files do.
    tokens = ("positive", "negative")
    declared = tokens if rng.random() < 0.5 else tokens[::-1]
    class_col = Column(name="Class", kind=CLASS, values=declared)

    columns = tuple(cat_columns) + tuple(
        Column(name=a, kind=NUMERIC) for a in attr_names
    ) + (class_col,)

    rows = []
    for i in range(n):
        row = [cells[i] for cells in cat_cells]
        row.extend(X[i].tolist())
        row.append("positive" if y[i] == 1 else "negative")
        rows.append(tuple(row))

    n_cat = len(cat_columns)
    ranges = {
        a: (float(X[:, j].min()), float(X[:, j].max()))
        for j, a in enumerate(attr_names)
    }
    return columns, tuple(rows), ranges, y, n_cat


def write_dataset(out_root: Path, entry, rng) -> None:
    name, majority, minority, _ir, family, n_num, categorical = entry
    columns, rows, ranges, y, _ = build_dataset(
        name, majority, minority, family, n_num, categorical, rng
    )
    ds_dir = out_root / name
    ds_dir.mkdir(parents=True, exist_ok=True)
    inputs = tuple(c.name for c in columns if c.kind != CLASS)

    test_folds = five_fold_test_indices(y, rng)
    all_idx = np.arange(y.size)
    for f, test_idx in enumerate(test_folds, start=1):
        mask = np.ones(y.size, dtype=bool)
        mask[test_idx] = False
        for suffix, idx in (("tra", all_idx[mask]), ("tst", test_idx)):
            table = RawTable(
                name=name,
                columns=columns,
                rows=tuple(rows[i] for i in idx),
            )
            text = format_keel(table, inputs=inputs, ranges=ranges)
            (ds_dir / f"{name}-5-{f}{suffix}.dat").write_bytes(text.encode("utf-8"))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out", default=str(Path(__file__).resolve().parent.parent / "data" / "keel")
    )
    args = parser.parse_args(argv)
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)

    catalog_lines = ["dataset,majority,minority,ir"]
    for entry in CATALOG:
        name = entry[0]
        digest = hashlib.blake2b(name.encode(), digest_size=4).digest()
        rng = np.random.default_rng([MASTER_SEED, int.from_bytes(digest, "big")])
        write_dataset(out_root, entry, rng)
        catalog_lines.append(f"{name},{entry[1]},{entry[2]},{entry[3]}")
        print(f"wrote {name} ({entry[1]}+{entry[2]} rows)")
    (out_root / "catalog.csv").write_bytes(("\n".join(catalog_lines) + "\n").encode("utf-8"))
    print(f"wrote {out_root / 'catalog.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
