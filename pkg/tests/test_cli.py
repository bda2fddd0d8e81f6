import hashlib
from pathlib import Path

import pytest

from scalebench.cli import main, parse_config_file

DATA_DIR = str(Path(__file__).resolve().parent.parent / "data" / "keel")


class TestConfigFile:
    def test_parses_flat_key_values(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nseed=7\nmodels=knn,dt\n\ndata_dir=/data\n")
        assert parse_config_file(cfg) == {
            "seed": "7", "models": "knn,dt", "data_dir": "/data"
        }

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("batchsize=3\n")
        with pytest.raises(ValueError, match="batchsize"):
            parse_config_file(cfg)

    def test_malformed_line_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("seed 7\n")
        with pytest.raises(ValueError, match="key=value"):
            parse_config_file(cfg)


class TestRunCommand:
    def test_run_then_report_reproduces_reports(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main([
            "run",
            "--data-dir", DATA_DIR,
            "--out-dir", str(out),
            "--datasets", "iris0,glass-0-4_vs_5,ecoli-0-3-4_vs_5",
            "--models", "knn,dt",
            "--scalers", "NS,SS,QT",
            "--seed", "3",
        ])
        assert rc == 0
        assert (out / "results.csv").is_file()
        report_files = sorted((out / "reports").rglob("*.*"))
        assert report_files
        digests = {p: hashlib.sha256(p.read_bytes()).hexdigest() for p in report_files}

        rc = main([
            "report",
            "--data-dir", DATA_DIR,
            "--out-dir", str(out),
            "--results", str(out / "results.csv"),
        ])
        assert rc == 0
        for p, digest in digests.items():
            assert hashlib.sha256(p.read_bytes()).hexdigest() == digest

    def test_config_file_with_flag_override(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            f"data_dir={DATA_DIR}\n"
            f"out_dir={out_a}\n"
            "datasets=iris0\n"
            "models=dt\n"
            "scalers=NS,SS\n"
            "seed=5\n"
        )
        assert main(["run", "--config", str(cfg)]) == 0
        assert (out_a / "results.csv").is_file()
        # flag overrides the config file's output directory
        assert main(["run", "--config", str(cfg), "--out-dir", str(out_b)]) == 0
        assert (out_b / "results.csv").read_bytes() == (out_a / "results.csv").read_bytes()

    def test_missing_data_dir_is_an_error(self):
        with pytest.raises(SystemExit, match="data-dir"):
            main(["run", "--out-dir", "/tmp/x"])

    def test_manifest_records_config(self, tmp_path):
        out = tmp_path / "m"
        main([
            "run",
            "--data-dir", DATA_DIR,
            "--out-dir", str(out),
            "--datasets", "iris0",
            "--models", "dt",
            "--scalers", "NS",
            "--seed", "9",
        ])
        manifest = (out / "manifest.txt").read_text()
        assert "seed=9" in manifest
        assert "models=dt" in manifest
        assert "datasets=iris0" in manifest
