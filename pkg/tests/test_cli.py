import csv
import math

import numpy as np
import pytest

from interpcomp.cli import main
from interpcomp.imagebench import GrayImage, read_pgm, synthetic_scene, write_pgm


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def run(argv):
    return main([str(a) for a in argv])


class TestConvergence:
    def test_deterministic_bytes(self, tmp_path, capsys):
        args = [
            "convergence", "--trials", 2, "--iterations", 3, "--modules", "0,1",
            "--n-coarse", 32, "--seed", 5,
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(args + ["--out", a]) == 0
        assert run(args + ["--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_one_row_per_iteration(self, tmp_path):
        out = tmp_path / "c.csv"
        assert run(
            ["convergence", "--trials", 1, "--iterations", 1, "--modules", "0,1,2",
             "--n-coarse", 32, "--out", out]
        ) == 0
        rows = read_rows(out)
        assert len(rows) == 3
        assert rows[0].keys() == {
            "method", "modules", "lambda", "k_rate", "iteration",
            "mean_snr_db", "trials", "seed",
        }

    def test_curves_ordered_by_modules(self, tmp_path):
        out = tmp_path / "c.csv"
        assert run(
            ["convergence", "--trials", 5, "--iterations", 2, "--modules", "0,1,2",
             "--out", out]
        ) == 0
        at2 = {
            int(r["modules"]): float(r["mean_snr_db"])
            for r in read_rows(out)
            if r["iteration"] == "2"
        }
        assert at2[2] >= at2[1] >= at2[0]

    def test_invalid_parameter_exit_code(self, tmp_path, capsys):
        code = run(
            ["convergence", "--lambda", "2.5", "--trials", 1, "--iterations", 1,
             "--out", tmp_path / "x.csv"]
        )
        assert code == 2
        err = capsys.readouterr().err
        assert "relaxation" in err

    def test_out_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("INTERPCOMP_OUT_DIR", str(tmp_path / "outputs"))
        assert run(
            ["convergence", "--trials", 1, "--iterations", 1, "--modules", "0",
             "--n-coarse", 32, "--out", "conv.csv"]
        ) == 0
        assert (tmp_path / "outputs" / "conv.csv").exists()


class TestLambdaSweep:
    def test_single_point_grid(self, tmp_path):
        out = tmp_path / "l.csv"
        assert run(
            ["lambda-sweep", "--lambda-grid", "1.0", "--trials", 1,
             "--iterations", 3, "--n-coarse", 32, "--out", out]
        ) == 0
        rows = read_rows(out)
        assert len(rows) == 1
        assert rows[0].keys() == {"lambda", "avg_db_per_iteration"}

    def test_grid_outside_range_rejected(self, tmp_path, capsys):
        code = run(
            ["lambda-sweep", "--lambda-grid", "0.5,2.5", "--trials", 1,
             "--iterations", 2, "--out", tmp_path / "l.csv"]
        )
        assert code == 2
        assert "lambda" in capsys.readouterr().err


class TestNoise:
    def test_negligible_noise_matches_noiseless(self, tmp_path):
        common = ["--trials", 3, "--iterations", 5, "--modules", "1",
                  "--n-coarse", 64, "--seed", 3]
        clean, noisy = tmp_path / "clean.csv", tmp_path / "noisy.csv"
        assert run(["convergence", *common, "--out", clean]) == 0
        assert run(["noise", *common, "--noise-power-db", "-300", "--out", noisy]) == 0
        trace_clean = [float(r["mean_snr_db"]) for r in read_rows(clean)]
        trace_noisy = [float(r["mean_snr_db"]) for r in read_rows(noisy)]
        for a, b in zip(trace_clean, trace_noisy):
            assert abs(a - b) < 0.5

    def test_peak_exists_at_minus_20db(self, tmp_path):
        out = tmp_path / "n.csv"
        assert run(
            ["noise", "--trials", 5, "--iterations", 30, "--modules", "0",
             "--noise-power-db", "-20", "--out", out]
        ) == 0
        trace = [float(r["mean_snr_db"]) for r in read_rows(out)]
        assert max(trace) > trace[-1] - 1e-3
        assert max(trace) > trace[0] + 3.0


class TestRate:
    def test_same_rate_zero_difference(self, tmp_path):
        out = tmp_path / "r.csv"
        assert run(
            ["rate", "--k-rates", "1,1", "--trials", 2, "--iterations", 3,
             "--n-coarse", 32, "--out", out]
        ) == 0
        diffs = {float(r["gain_diff_vs_first"]) for r in read_rows(out)}
        assert diffs == {0.0}

    def test_monotone_traces(self, tmp_path):
        out = tmp_path / "r.csv"
        assert run(
            ["rate", "--k-rates", "1,2", "--trials", 3, "--iterations", 4,
             "--out", out]
        ) == 0
        rows = read_rows(out)
        for k in ("1", "2"):
            trace = [float(r["mean_snr_db"]) for r in rows if r["k_rate"] == k]
            assert all(b >= a for a, b in zip(trace, trace[1:]))


class TestAnalyze:
    def test_text_output(self, capsys):
        assert run(["analyze", "--kind", "sh", "--modules", "1"]) == 0
        out = capsys.readouterr().out
        assert "contraction_factor" in out

    def test_csv_parseable(self, capsys):
        assert run(["analyze", "--kind", "sh", "--modules", "0", "--csv"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        table = dict(row.split(",", 1) for row in lines[1:])
        assert float(table["contraction_factor"]) == pytest.approx(0.3634, abs=1e-3)

    def test_hybrid_value(self, capsys):
        assert run(["analyze", "--kind", "sh", "--modules", "1", "--csv"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        table = dict(row.split(",", 1) for row in lines[1:])
        assert float(table["contraction_factor"]) == pytest.approx(0.06, abs=5e-3)


class TestImage:
    def test_end_to_end(self, tmp_path, capsys):
        src = tmp_path / "scene.pgm"
        write_pgm(synthetic_scene(64, 64, seed=2), src)
        out_dir = tmp_path / "bench"
        assert run(
            ["image", src, "--factor", "2",
             "--methods", "bilinear,hybrid:2:1", "--out-dir", out_dir]
        ) == 0
        assert (out_dir / "decimated.pgm").exists()
        assert (out_dir / "recon_bilinear.pgm").exists()
        assert (out_dir / "recon_hybrid_2_1.pgm").exists()
        assert (out_dir / "err_bilinear.pgm").exists()
        rows = read_rows(out_dir / "psnr.csv")
        assert [r["method"] for r in rows] == ["bilinear", "hybrid(2,1)"]
        assert float(rows[1]["psnr_db"]) > float(rows[0]["psnr_db"])

    def test_constant_image_inf_written(self, tmp_path):
        src = tmp_path / "flat.pgm"
        write_pgm(GrayImage(np.full((16, 16), 99, dtype=np.uint8)), src)
        out_dir = tmp_path / "bench"
        assert run(
            ["image", src, "--methods", "bilinear", "--out-dir", out_dir]
        ) == 0
        with open(out_dir / "psnr.csv") as fh:
            text = fh.read()
        assert text.splitlines()[1].endswith("inf")

    def test_rerun_overwrites_deterministically(self, tmp_path):
        src = tmp_path / "scene.pgm"
        write_pgm(synthetic_scene(32, 32, seed=4), src)
        out_dir = tmp_path / "bench"
        argv = ["image", src, "--methods", "iterative:2", "--out-dir", out_dir]
        assert run(argv) == 0
        first = (out_dir / "psnr.csv").read_bytes()
        assert run(argv) == 0
        assert (out_dir / "psnr.csv").read_bytes() == first

    def test_missing_file_exit_code(self, tmp_path, capsys):
        code = run(["image", tmp_path / "nope.pgm"])
        assert code == 2
        assert "nope.pgm" in capsys.readouterr().err
