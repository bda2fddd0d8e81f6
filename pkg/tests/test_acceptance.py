"""Acceptance suite: one test per release criterion, each printing a
PASS line (visible with `pytest -s`) after its assertions hold."""

import hashlib
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from scalebench import scaling
from scalebench.dataset import ir_stratum
from scalebench.ensembles import knora_e_select, knora_u_weights
from scalebench.harness import (
    DEFAULT_MODELS,
    DEFAULT_SCALERS,
    ExperimentConfig,
    dataset_summaries,
    run_cell,
    run_experiment,
)
from scalebench.keel_io import load_fold_pair, load_fold_pairs
from scalebench.metrics import ConfusionMatrix, confusion, f1, f_beta, g_mean, precision, recall
from scalebench.reports import report_ranges_and_ranks, write_reports
from scalebench.scaling import ScalerKind, fit, inverse_normal_cdf, quantile, transform
from scalebench.stats import chi2_sf, fractional_wins, friedman, nemenyi_cd
from tests.test_ensembles import brute_knora_e, brute_knora_u_vote

DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "keel"

# Bundled datasets small enough for the full-grid criterion; the held-out
# large ones still participate in the imbalance-ratio checks.
GRID_EXCLUDES = ("wisconsin", "pima", "yeast-2_vs_4", "abalone9-18", "abalone19")


def _report(number: int, label: str) -> None:
    print(f"ACCEPTANCE {number} ({label}): PASS")


def test_criterion_1_scaler_moment_suite():
    start = time.monotonic()
    rng = np.random.default_rng(101)
    for _ in range(50):
        n = int(rng.integers(5, 400))
        x = rng.normal(rng.uniform(-100, 100), rng.uniform(1e-3, 1e3), (n, 1))
        while np.ptp(x) == 0:
            x = rng.normal(0, 1, (n, 1))
        ss = transform(fit(ScalerKind("SS"), x), x)
        assert abs(ss.mean()) <= 1e-9
        assert abs(ss.std() - 1.0) <= 1e-9
        mm = transform(fit(ScalerKind("MM"), x), x)
        assert abs(mm.min() - 0.0) <= 1e-12
        assert abs(mm.max() - 1.0) <= 1e-12
        ma = transform(fit(ScalerKind("MA"), x), x)
        assert abs(np.abs(ma).max() - 1.0) <= 1e-12
        rs = transform(fit(ScalerKind("RS"), x), x)
        assert abs(np.median(rs)) <= 1e-9
        q1, q3 = np.quantile(rs, [0.25, 0.75])
        assert abs((q3 - q1) - 1.0) <= 1e-9

    u = rng.uniform(0, 1, (1000, 1))
    out = np.sort(transform(fit(ScalerKind("QT"), u), u).ravel())
    for p in np.arange(0.1, 0.95, 0.1):
        assert abs(quantile(out, p) - inverse_normal_cdf(p)) <= 0.05

    elapsed = time.monotonic() - start
    assert elapsed < 5.0, f"moment suite took {elapsed:.2f}s"
    _report(1, "scaler moment suite")


def test_criterion_2_look_ahead_safety():
    rng = np.random.default_rng(202)
    kinds = [ScalerKind(tag) for tag in ("MC", "SS", "PS", "VS", "MM", "MA", "RS", "QT")]
    for _ in range(20):
        n_train = int(rng.integers(10, 120))
        n_test = int(rng.integers(5, 80))
        d = int(rng.integers(1, 8))
        train = rng.normal(rng.uniform(-10, 10), rng.uniform(0.1, 50), (n_train, d))
        test = rng.normal(rng.uniform(-10, 10), rng.uniform(0.1, 50), (n_test, d))
        for kind in kinds:
            fitted = fit(kind, train)
            base = transform(fitted, test)
            perm = rng.permutation(n_test)
            assert np.array_equal(transform(fitted, test[perm]), base[perm])
            dup = np.vstack([test, test])
            assert np.array_equal(transform(fitted, dup), np.vstack([base, base]))
            cut = int(rng.integers(1, n_test + 1))
            assert np.array_equal(transform(fitted, test[:cut]), base[:cut])
    _report(2, "look-ahead safety")


def test_criterion_3_tree_affine_invariance_on_bundled_data():
    datasets = (
        "glass1", "iris0", "haberman", "ecoli-0-3-4_vs_5",
        "glass-0-1-6_vs_2", "abalone9-18",
    )
    mismatches = 0
    for name in datasets:
        for pair in load_fold_pairs(DATA_DIR / name, name):
            base = run_cell(pair, ScalerKind("NS"), "dt", seed=0).predictions
            for tag in ("SS", "MM", "MA", "RS"):
                moved = run_cell(pair, ScalerKind(tag), "dt", seed=0).predictions
                mismatches += int((moved != base).sum())
    assert mismatches == 0
    _report(3, "decision-tree affine invariance")


def test_criterion_4_model_sensitivity_ordering(tmp_path):
    start = time.monotonic()
    cfg = ExperimentConfig(
        data_dir=str(DATA_DIR),
        out_dir=str(tmp_path / "grid"),
        exclude=GRID_EXCLUDES,
        models=DEFAULT_MODELS,
        scalers=DEFAULT_SCALERS,
        seed=0,
        jobs=1,
    )
    infos = dataset_summaries(cfg)
    assert len(infos) >= 20
    strata = {i.stratum for i in infos}
    assert strata == {"low", "medium", "high"}

    records = run_experiment(cfg)
    names = [i.name for i in infos]
    rows = {
        r["model"]: r
        for r in report_ranges_and_ranks(records, names, cfg.models, cfg.scalers)
        if r["metric"] == "f1"
    }
    percep_range = rows["percep"]["mean_range"]
    dt_range = rows["dt"]["mean_range"]
    bagging_range = rows["bagging"]["mean_range"]
    rf_range = rows["rf"]["mean_range"]

    assert percep_range >= 3.0 * dt_range, (percep_range, dt_range)
    assert bagging_range > rf_range, (bagging_range, rf_range)

    elapsed = time.monotonic() - start
    assert elapsed < 600.0, f"grid took {elapsed:.1f}s"
    _report(4, "sensitivity ordering on the full grid")


def test_criterion_5_dynamic_selection_oracle_equivalence():
    rng = np.random.default_rng(505)
    for _ in range(200):
        n_models = int(rng.integers(1, 11))
        k = int(rng.integers(1, 8))
        correct = rng.integers(0, 2, (n_models, k)).astype(bool)
        preds_x = rng.integers(0, 2, n_models)

        sel = knora_e_select(correct)
        expected = brute_knora_e(correct)
        if expected is None:
            assert sel is None
        else:
            assert sel.tolist() == expected

        weights = knora_u_weights(correct)
        if weights.sum() == 0:
            vote = 1 if np.bincount(preds_x, minlength=2)[1] > np.bincount(preds_x, minlength=2)[0] else 0
        else:
            w1 = weights[(preds_x == 1) & (weights > 0)].sum()
            w0 = weights[(preds_x == 0) & (weights > 0)].sum()
            vote = 1 if w1 > w0 else 0
        assert vote == brute_knora_u_vote(correct.astype(int), preds_x)
    _report(5, "dynamic-selection oracle equivalence")


def test_criterion_6_statistics_oracle():
    from scipy.stats import friedmanchisquare

    rng = np.random.default_rng(606)
    for trial in range(20):
        n = int(rng.integers(5, 40))
        k = int(rng.integers(3, 9))
        m = rng.random((n, k))
        if trial % 2:
            m = np.round(m, 1)
        mine = friedman(m)
        ref = friedmanchisquare(*[m[:, j] for j in range(k)])
        assert abs(mine.statistic - ref.statistic) <= 1e-6
        assert abs(mine.p_value - ref.pvalue) <= 1e-6

    assert abs(chi2_sf(3.841, 1) - 0.05) <= 5e-4
    assert abs(chi2_sf(11.070, 5) - 0.05) <= 5e-4
    assert abs(nemenyi_cd(6, 82) - 0.8327) <= 5e-4

    for _ in range(50):
        n = int(rng.integers(2, 30))
        k = int(rng.integers(2, 9))
        wins = fractional_wins(np.round(rng.random((n, k)), 1))
        assert abs(wins.sum() - n) <= 1e-12
    _report(6, "statistics oracle")


def test_criterion_7_bundled_imbalance_ratios_match_published():
    catalog_path = DATA_DIR / "catalog.csv"
    lines = catalog_path.read_text().splitlines()
    assert lines[0] == "dataset,majority,minority,ir"
    published = {}
    for line in lines[1:]:
        name, majority, minority, ir = line.split(",")
        published[name] = (int(majority), int(minority), ir)
    assert len(published) >= 25
    assert published["glass1"][2] == "1.82"
    assert published["abalone19"][2] == "129.44"

    for name, (majority, minority, printed) in sorted(published.items()):
        pair = load_fold_pair(DATA_DIR / name, name, 1)
        counts = tuple(
            a + b for a, b in zip(pair.train.class_counts, pair.test.class_counts)
        )
        assert sorted(counts) == sorted((majority, minority)), name
        ir = max(counts) / min(counts)
        assert f"{ir:.2f}" == printed, (name, ir, printed)
        assert ir_stratum(ir) == ir_stratum(float(printed)), name
    _report(7, "published imbalance ratios reproduced")


def test_criterion_8_determinism_across_worker_counts(tmp_path):
    base = ExperimentConfig(
        data_dir=str(DATA_DIR),
        out_dir=str(tmp_path / "w1"),
        datasets=("iris0", "glass-0-4_vs_5", "ecoli-0-3-4_vs_5"),
        models=DEFAULT_MODELS,
        scalers=DEFAULT_SCALERS,
        seed=42,
        jobs=1,
    )
    outputs = {}
    for jobs in (1, 8):
        cfg = replace(base, jobs=jobs, out_dir=str(tmp_path / f"w{jobs}"))
        records = run_experiment(cfg)
        write_reports(records, dataset_summaries(cfg), cfg)
        digests = {}
        for path in sorted(Path(cfg.out_dir).rglob("*")):
            if path.is_file() and path.name != "manifest.txt":
                digests[path.relative_to(cfg.out_dir)] = hashlib.sha256(
                    path.read_bytes()
                ).hexdigest()
        outputs[jobs] = digests
    assert outputs[1] == outputs[8]
    assert any(str(p) == "results.csv" for p in outputs[1])
    assert any(str(p).startswith("reports") for p in outputs[1])
    _report(8, "byte-identical results across worker counts")


def test_criterion_9_metric_unit_suite():
    cm = confusion([1, 1, 0], [1, 1, 0], positive_class=1)
    assert (cm.tp, cm.tn, cm.fp, cm.fn) == (2, 1, 0, 0)
    cm = confusion([0, 0, 0, 0], [1, 1, 1, 1], positive_class=1)
    assert (cm.tp, cm.fp, cm.fn, cm.tn) == (0, 0, 4, 0)
    cm = confusion([1, 0, 1, 0, 1], [1, 1, 0, 0, 1], positive_class=1)
    assert (cm.tp, cm.fn, cm.fp, cm.tn) == (2, 1, 1, 1)

    assert precision(ConfusionMatrix(2, 0, 1, 1)) == 1.0
    assert precision(ConfusionMatrix(0, 0, 1, 1)) == 0.0
    assert recall(ConfusionMatrix(3, 0, 1, 0)) == 0.75

    assert f_beta(ConfusionMatrix(3, 1, 2, 0), 1.0) == 3 / 4.5
    assert f_beta(ConfusionMatrix(7, 0, 0, 3), 2.0) == 1.0
    assert f_beta(ConfusionMatrix(0, 2, 3, 1), 1.0) == 0.0

    assert f1(ConfusionMatrix(3, 1, 2, 0)) == pytest.approx(0.6667, abs=5e-5)
    assert f1(ConfusionMatrix(4, 0, 0, 4)) == 1.0
    assert f1(ConfusionMatrix(0, 1, 1, 1)) == 0.0

    assert g_mean(ConfusionMatrix(tp=8, fn=2, tn=9, fp=1)) == pytest.approx(0.848528, abs=1e-6)
    assert g_mean(ConfusionMatrix(5, 0, 0, 5)) == 1.0
    assert g_mean(ConfusionMatrix(0, 0, 5, 5)) == 0.0

    rng = np.random.default_rng(909)
    for _ in range(1000):
        cm = ConfusionMatrix(*(int(v) for v in rng.integers(0, 300, 4)))
        assert abs(f_beta(cm, 1.0) - f1(cm)) <= 1e-12
    _report(9, "metric unit suite")
