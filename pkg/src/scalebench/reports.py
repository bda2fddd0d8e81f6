"""Analysis artifacts over a completed results grid.

Per-dataset scores are the mean over the five folds; only then do
cross-dataset aggregations (means, ranks, wins, Friedman tests) happen.
All writers emit byte-deterministic CSV/SVG with LF endings.
"""

from __future__ import annotations

import platform
from collections import defaultdict
from pathlib import Path

import numpy as np

from . import __version__
from .cd_diagram import emit_cd_diagram
from .dataset import STRATA
from .harness import DatasetInfo, ExperimentConfig
from .keel_io import N_FOLDS, ResultRecord
from .stats import (
    average_ranks,
    best_worst_range,
    fractional_wins,
    friedman,
    nemenyi_cd,
)

__all__ = [
    "METRICS",
    "fold_mean_scores",
    "report_mean_table",
    "report_friedman",
    "report_wins",
    "report_ranges_and_ranks",
    "write_reports",
]

METRICS = ("f1", "gmean")
ALL_STRATA = ("all",) + STRATA


def fold_mean_scores(records) -> dict:
    """(dataset, model, scaler) -> {metric: mean over the 5 folds}.

    Rejects duplicate cells and cells with a wrong fold count: every
    aggregation below assumes one complete 5-fold mean per key.
    """
    folds = defaultdict(list)
    for r in records:
        folds[(r.dataset, r.model, r.scaler)].append(r)
    out = {}
    for key, cells in folds.items():
        fold_ids = sorted(c.fold for c in cells)
        if fold_ids != list(range(1, N_FOLDS + 1)):
            raise ValueError(f"cell {key} has folds {fold_ids}, expected 1..{N_FOLDS}")
        out[key] = {
            "f1": sum(c.f1 for c in cells) / N_FOLDS,
            "gmean": sum(c.gmean for c in cells) / N_FOLDS,
        }
    return out


def _grid_or_raise(scores: dict, datasets, models, scalers) -> None:
    missing = [
        (d, m, s)
        for d in datasets
        for m in models
        for s in scalers
        if (d, m, s) not in scores
    ]
    if missing:
        shown = ", ".join(map(str, missing[:10]))
        raise ValueError(f"results grid is missing {len(missing)} cells: {shown} ...")


def report_mean_table(records, datasets, models, scalers) -> list[dict]:
    """Per (model, metric): the mean over datasets of per-dataset fold
    means, one column per scaler, plus the best scaler (first on ties)."""
    scores = fold_mean_scores(records)
    _grid_or_raise(scores, datasets, models, scalers)
    rows = []
    for model in models:
        for metric in METRICS:
            means = {
                s: float(np.mean([scores[(d, model, s)][metric] for d in datasets]))
                for s in scalers
            }
            best = max(scalers, key=lambda s: means[s])  # max is first-on-ties
            rows.append({"model": model, "metric": metric, "means": means, "best": best})
    return rows


def report_friedman(records, infos: list[DatasetInfo], models, scalers) -> list[dict]:
    """Friedman tests per (model, metric, stratum) over the scaler columns.

    Strata with fewer than two datasets are reported as insufficient
    rather than failing the report.
    """
    scores = fold_mean_scores(records)
    names = [i.name for i in infos]
    _grid_or_raise(scores, names, models, scalers)
    by_stratum = {"all": names}
    for stratum in STRATA:
        by_stratum[stratum] = [i.name for i in infos if i.stratum == stratum]
    rows = []
    for model in models:
        for metric in METRICS:
            for stratum in ALL_STRATA:
                members = by_stratum[stratum]
                row = {
                    "model": model,
                    "metric": metric,
                    "stratum": stratum,
                    "n_datasets": len(members),
                }
                if len(members) < 2:
                    row["status"] = "insufficient_data"
                    row["result"] = None
                else:
                    matrix = np.array(
                        [[scores[(d, model, s)][metric] for s in scalers] for d in members]
                    )
                    row["status"] = "ok"
                    row["result"] = friedman(matrix)
                rows.append(row)
    return rows


def report_wins(records, infos: list[DatasetInfo], models, scalers) -> list[dict]:
    """Fractional wins per scaler for each (metric, stratum), summed over
    models; a row's totals add up to n_datasets * n_models."""
    scores = fold_mean_scores(records)
    names = [i.name for i in infos]
    _grid_or_raise(scores, names, models, scalers)
    rows = []
    for metric in METRICS:
        per_model_wins = {}
        for model in models:
            matrix = np.empty((len(names), len(scalers)))
            win_rows = {}
            for di, d in enumerate(names):
                row = np.array([scores[(d, model, s)][metric] for s in scalers])
                matrix[di] = row
                best = row.max()
                tied = row == best
                win_rows[d] = tied / tied.sum()
            per_model_wins[model] = win_rows
        for stratum in ALL_STRATA:
            members = (
                names if stratum == "all" else [i.name for i in infos if i.stratum == stratum]
            )
            totals = np.zeros(len(scalers))
            for model in models:
                for d in members:
                    totals += per_model_wins[model][d]
            rows.append(
                {
                    "metric": metric,
                    "stratum": stratum,
                    "n_datasets": len(members),
                    "wins": {s: float(t) for s, t in zip(scalers, totals)},
                }
            )
    return rows


def report_ranges_and_ranks(records, datasets, models, scalers) -> list[dict]:
    """Scatter data relating scale sensitivity to performance.

    Per (model, metric): the mean over datasets of (best - worst scaler
    score), and the model's average rank where each dataset scores a
    model by its best-over-scalers value (rank 1 = best).
    """
    scores = fold_mean_scores(records)
    _grid_or_raise(scores, datasets, models, scalers)
    rows = []
    for metric in METRICS:
        per_scaler = {
            (d, m): np.array([scores[(d, m, s)][metric] for s in scalers])
            for d in datasets
            for m in models
        }
        best_matrix = np.array(
            [[per_scaler[(d, m)].max() for m in models] for d in datasets]
        )
        avg_rank = (
            average_ranks(best_matrix)
            if len(models) >= 2
            else np.ones(1)
        )
        for mi, model in enumerate(models):
            range_matrix = np.vstack([per_scaler[(d, model)] for d in datasets])
            _, mean_range = best_worst_range(range_matrix)
            rows.append(
                {
                    "model": model,
                    "metric": metric,
                    "mean_range": mean_range,
                    "avg_rank": float(avg_rank[mi]),
                }
            )
    return rows


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_reports(records, infos: list[DatasetInfo], cfg: ExperimentConfig) -> list[Path]:
    """Write every analysis artifact under out_dir/reports plus the run
    manifest; returns the written paths."""
    out_root = Path(cfg.out_dir)
    rep = out_root / "reports"
    rep.mkdir(parents=True, exist_ok=True)
    datasets = [i.name for i in infos]
    models, scalers = list(cfg.models), list(cfg.scalers)
    written = []

    lines = ["dataset,n_instances,majority,minority,ir,stratum"]
    for i in infos:
        lines.append(
            f"{i.name},{i.n_instances},{i.majority},{i.minority},{i.ir:.6f},{i.stratum}"
        )
    written.append(_write(rep / "datasets.csv", lines))

    lines = ["model,metric," + ",".join(scalers) + ",best"]
    for row in report_mean_table(records, datasets, models, scalers):
        cells = ",".join(_fmt(row["means"][s]) for s in scalers)
        lines.append(f"{row['model']},{row['metric']},{cells},{row['best']}")
    written.append(_write(rep / "mean_table.csv", lines))

    lines = ["model,metric,stratum,n_datasets,statistic,p_value,reject_at_0.05,status"]
    for row in report_friedman(records, infos, models, scalers):
        if row["status"] == "ok":
            r = row["result"]
            lines.append(
                f"{row['model']},{row['metric']},{row['stratum']},{row['n_datasets']},"
                f"{r.statistic:.6g},{r.p_value:.6g},"
                f"{'yes' if r.reject_at_0_05 else 'no'},ok"
            )
        else:
            lines.append(
                f"{row['model']},{row['metric']},{row['stratum']},{row['n_datasets']},"
                f",,,{row['status']}"
            )
    written.append(_write(rep / "friedman.csv", lines))

    lines = ["metric,stratum,n_datasets," + ",".join(scalers)]
    for row in report_wins(records, infos, models, scalers):
        cells = ",".join(_fmt(row["wins"][s]) for s in scalers)
        lines.append(f"{row['metric']},{row['stratum']},{row['n_datasets']},{cells}")
    written.append(_write(rep / "wins.csv", lines))

    lines = ["model,metric,mean_range,avg_rank"]
    for row in report_ranges_and_ranks(records, datasets, models, scalers):
        lines.append(
            f"{row['model']},{row['metric']},{_fmt(row['mean_range'])},{_fmt(row['avg_rank'])}"
        )
    written.append(_write(rep / "ranges_ranks.csv", lines))

    written.extend(_write_cd_diagrams(records, datasets, models, scalers, rep))
    written.append(_write_manifest(out_root, cfg, infos, len(list(records))))
    return written


def _write_cd_diagrams(records, datasets, models, scalers, rep: Path) -> list[Path]:
    """One scaler-ranking CD diagram per (model, metric), when the scaler
    count is inside the Nemenyi table range and there are >= 2 datasets."""
    if not (2 <= len(scalers) <= 10) or len(datasets) < 2:
        return []
    scores = fold_mean_scores(records)
    cd_dir = rep / "cd"
    cd_dir.mkdir(exist_ok=True)
    cd = nemenyi_cd(len(scalers), len(datasets))
    written = []
    for model in models:
        for metric in METRICS:
            matrix = np.array(
                [[scores[(d, model, s)][metric] for s in scalers] for d in datasets]
            )
            ranks = average_ranks(matrix)
            path = cd_dir / f"cd_{model}_{metric}.svg"
            emit_cd_diagram(dict(zip(scalers, ranks)), cd, path)
            written.append(path)
    return written


def _write_manifest(out_root: Path, cfg: ExperimentConfig, infos, n_records: int) -> Path:
    import numba

    lines = [
        "scalebench run manifest",
        f"package_version={__version__}",
        f"python={platform.python_version()}",
        f"numpy={np.__version__}",
        f"numba={numba.__version__}",
        f"seed={cfg.seed}",
        f"data_dir={cfg.data_dir}",
        f"out_dir={cfg.out_dir}",
        f"datasets={','.join(i.name for i in infos)}",
        f"models={','.join(cfg.models)}",
        f"scalers={','.join(cfg.scalers)}",
        f"jobs={cfg.jobs}",
        f"strata_bounds={cfg.low_bound:g},{cfg.high_bound:g}",
        "per_dataset_score=mean_over_5_folds_before_any_cross_dataset_aggregation",
        f"n_records={n_records}",
    ]
    return _write(out_root / "manifest.txt", lines)


def _write(path: Path, lines: list[str]) -> Path:
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    return path
