"""Command line interface.

`scalebench run` executes the experiment grid and writes results.csv, the
report tables, CD diagrams, and a run manifest.  `scalebench report`
regenerates the analysis artifacts from an existing results.csv.

Options may come from a flat key=value config file (--config); command
line flags override file values which override defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

CONFIG_KEYS = (
    "data_dir",
    "out_dir",
    "datasets",
    "exclude",
    "models",
    "scalers",
    "seed",
    "jobs",
    "strata",
)


def _cap_blas_threads() -> None:
    # One BLAS thread per worker process: the grid parallelizes over cells,
    # and nested thread pools only oversubscribe the CPU.
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, "1")


def _csv_tuple(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def parse_config_file(path) -> dict:
    """Flat key=value lines; blank lines and '#' comments ignored."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(
                f"{path}:{lineno}: unknown key {key!r}; known: {', '.join(CONFIG_KEYS)}"
            )
        values[key] = value.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scalebench",
        description="Benchmark how feature-scaling choices change classifier performance.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the experiment grid and write reports")
    _add_common(run)
    run.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    run.add_argument("--jobs", type=int, default=None, help="worker processes (default 1)")

    report = sub.add_parser("report", help="regenerate reports from a results.csv")
    _add_common(report)
    report.add_argument(
        "--results", default=None, help="existing results CSV (default <out-dir>/results.csv)"
    )
    return parser


def _add_common(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--config", default=None, help="flat key=value config file")
    cmd.add_argument("--data-dir", default=None, help="root directory of KEEL fold files")
    cmd.add_argument("--out-dir", default=None, help="output directory")
    cmd.add_argument("--datasets", default=None, help="comma-separated include list")
    cmd.add_argument("--exclude", default=None, help="comma-separated exclude list")
    cmd.add_argument("--models", default=None, help="comma-separated model ids")
    cmd.add_argument("--scalers", default=None, help="comma-separated scaler ids")
    cmd.add_argument("--strata", default=None, help="IR stratum bounds, e.g. 3.0,9.0")


def _merge_config(args) -> dict:
    from .harness import DEFAULT_MODELS, DEFAULT_SCALERS

    merged = {
        "data_dir": None,
        "out_dir": None,
        "datasets": None,
        "exclude": "",
        "models": ",".join(DEFAULT_MODELS),
        "scalers": ",".join(DEFAULT_SCALERS),
        "seed": "0",
        "jobs": "1",
        "strata": "3.0,9.0",
    }
    if args.config:
        merged.update(parse_config_file(args.config))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag if isinstance(flag, str) else str(flag)
    if not merged["data_dir"]:
        raise SystemExit("error: --data-dir is required (flag or config file)")
    if not merged["out_dir"]:
        raise SystemExit("error: --out-dir is required (flag or config file)")
    return merged


def _to_experiment_config(merged: dict):
    from .harness import ExperimentConfig

    bounds = _csv_tuple(merged["strata"])
    if len(bounds) != 2:
        raise SystemExit(f"error: --strata needs two bounds, got {merged['strata']!r}")
    return ExperimentConfig(
        data_dir=merged["data_dir"],
        out_dir=merged["out_dir"],
        datasets=_csv_tuple(merged["datasets"]) or None if merged["datasets"] else None,
        exclude=_csv_tuple(merged["exclude"]),
        models=_csv_tuple(merged["models"]),
        scalers=_csv_tuple(merged["scalers"]),
        seed=int(merged["seed"]),
        jobs=int(merged["jobs"]),
        low_bound=float(bounds[0]),
        high_bound=float(bounds[1]),
    )


def main(argv=None) -> int:
    _cap_blas_threads()
    args = _build_parser().parse_args(argv)
    merged = _merge_config(args)
    cfg = _to_experiment_config(merged)

    from .harness import dataset_summaries, resolve_datasets, run_experiment
    from .keel_io import read_results_csv
    from .reports import write_reports

    if args.command == "run":
        names = resolve_datasets(cfg)
        print(
            f"running grid: {len(names)} datasets x 5 folds x "
            f"{len(cfg.scalers)} scalers x {len(cfg.models)} models "
            f"(seed {cfg.seed}, jobs {cfg.jobs})"
        )
        records = run_experiment(cfg)
        infos = dataset_summaries(cfg, names)
        written = write_reports(records, infos, cfg)
        print(f"wrote {len(records)} records to {Path(cfg.out_dir) / 'results.csv'}")
        for path in written:
            print(f"wrote {path}")
        return 0

    if args.command == "report":
        results_path = args.results or str(Path(cfg.out_dir) / "results.csv")
        records = read_results_csv(results_path)
        names = sorted({r.dataset for r in records})
        present_models = {r.model for r in records}
        present_scalers = {r.scaler for r in records}
        cfg = _restrict(cfg, present_models, present_scalers)
        infos = dataset_summaries(cfg, names)
        written = write_reports(records, infos, cfg)
        for path in written:
            print(f"wrote {path}")
        return 0

    raise AssertionError(f"unhandled command {args.command!r}")


def _restrict(cfg, present_models: set, present_scalers: set):
    """Limit the report's model/scaler columns to what the CSV contains,
    keeping the configured order."""
    from dataclasses import replace

    models = tuple(m for m in cfg.models if m in present_models)
    scalers = tuple(s for s in cfg.scalers if s in present_scalers)
    missing_m = present_models - set(models)
    missing_s = present_scalers - set(scalers)
    if missing_m or missing_s:
        raise SystemExit(
            "error: results.csv contains ids outside the configured lists: "
            f"models {sorted(missing_m)}, scalers {sorted(missing_s)}"
        )
    return replace(cfg, models=models, scalers=scalers)


if __name__ == "__main__":
    sys.exit(main())
