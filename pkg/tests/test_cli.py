"""Benchmark harness: config handling, CSV layout, SVG output, exit codes."""

import csv

import numpy as np
import pytest

from mofista import (
    BenchConfig,
    ConfigError,
    Front,
    emit_svg_scatter,
    nondominated_filter,
    run_benchmark,
)
from mofista.cli import main


def _read_csv(path):
    with path.open(newline="") as fh:
        return list(csv.reader(fh))


# ---------------------------------------------------------------------------
# configuration validation


def test_bench_config_rejects_bad_values():
    with pytest.raises(ConfigError):
        BenchConfig(runs=0)
    with pytest.raises(ConfigError):
        BenchConfig(solvers=())
    with pytest.raises(ConfigError):
        BenchConfig(problems=())
    with pytest.raises(ConfigError):
        BenchConfig(solvers=("newton",))
    with pytest.raises(ConfigError):
        BenchConfig(fixed_L=-1.0)
    with pytest.raises(ConfigError):
        BenchConfig(fixed_L_scale=0.0)
    with pytest.raises(ConfigError):
        BenchConfig(jobs=0)


# ---------------------------------------------------------------------------
# report structure


def test_row_and_aggregate_accounting(tmp_path):
    bc = BenchConfig(problems=("BK1",), runs=5, seed=1,
                     solvers=("backtracking", "fixed"), out_dir=tmp_path)
    report = run_benchmark(bc)
    assert len(report.rows) == 10
    assert len(report.aggregates) == 2
    assert report.failed == 0

    results = _read_csv(tmp_path / "results.csv")
    assert len(results) == 11
    assert results[0][:8] == ["problem", "solver", "run_id", "status",
                              "iterations", "backtracks_total", "wall_ms",
                              "final_residual"]
    assert results[0][8:] == ["F_1", "F_2", "x_1", "x_2"]

    aggregates = _read_csv(tmp_path / "aggregates.csv")
    assert aggregates[0] == ["problem", "solver", "mean_iter", "mean_ms", "purity"]
    assert len(aggregates) == 3
    assert (tmp_path / "fronts_BK1.csv").exists()
    assert (tmp_path / "front_BK1.svg").exists()
    assert (tmp_path / "profiles.csv").exists()


def test_solvers_share_initial_points(tmp_path):
    # With max_iter=1 both fixed-step variants take one identical step
    # (t=1, y=x0, same L), so equal finals certify equal starts.
    bc = BenchConfig(problems=("BK1",), runs=4, seed=3, eps=1e-12, max_iter=1,
                     solvers=("fixed", "pgm"), fixed_L=2.0, out_dir=tmp_path)
    report = run_benchmark(bc)
    fixed = [r for r in report.rows if r.solver == "fixed"]
    pgm = [r for r in report.rows if r.solver == "pgm"]
    for a, b in zip(fixed, pgm):
        assert a.run_id == b.run_id
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.objectives, b.objectives)


def test_csv_floats_roundtrip_exactly(tmp_path):
    bc = BenchConfig(problems=("SP1",), runs=3, seed=5, out_dir=tmp_path)
    run_benchmark(bc)
    rows = _read_csv(tmp_path / "results.csv")
    for row in rows[1:]:
        for cell in row[6:]:
            if cell:
                assert f"{float(cell):.17g}" == cell


def test_parallel_runs_match_serial(tmp_path):
    kwargs = dict(problems=("BK1",), runs=3, seed=2,
                  solvers=("backtracking", "fixed"))
    serial = run_benchmark(BenchConfig(out_dir=tmp_path / "s", **kwargs))
    parallel = run_benchmark(BenchConfig(out_dir=tmp_path / "p", jobs=3, **kwargs))
    for a, b in zip(serial.rows, parallel.rows):
        assert (a.problem, a.solver, a.run_id, a.status) == \
               (b.problem, b.solver, b.run_id, b.status)
        assert a.iterations == b.iterations
        assert np.array_equal(a.objectives, b.objectives)
        assert np.array_equal(a.x, b.x)


def test_profiles_tau_only_when_nothing_converges(tmp_path):
    bc = BenchConfig(problems=("JOS1",), runs=2, eps=1e-13, max_iter=1,
                     out_dir=tmp_path)
    report = run_benchmark(bc)
    assert report.failed == len(report.rows) == 2
    assert (tmp_path / "profiles.csv").read_text() == "tau\n"


def test_single_solver_purity_is_one(tmp_path):
    bc = BenchConfig(problems=("MHHM2",), runs=4, seed=9, out_dir=tmp_path)
    report = run_benchmark(bc)
    (_, solver, _, _, pur) = report.aggregates[0]
    assert solver == "backtracking"
    assert pur == 1.0


# ---------------------------------------------------------------------------
# SVG scatter


def test_svg_one_circle_per_point(tmp_path):
    front = Front(objectives=np.array([[0.0, 1.0], [1.0, 0.0]]))
    path = emit_svg_scatter(front, (0, 1), tmp_path / "two.svg")
    text = path.read_text()
    assert text.count("<circle") == 2
    assert text.startswith("<?xml")

    front3 = Front(objectives=np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 2.0]]))
    text3 = emit_svg_scatter(front3, (0, 1, 2), tmp_path / "three.svg").read_text()
    assert text3.count("<circle") == 6  # three pairwise panels


def test_svg_empty_front_annotated(tmp_path):
    empty = nondominated_filter(np.empty((0, 2)))
    text = emit_svg_scatter(empty, (0, 1), tmp_path / "empty.svg").read_text()
    assert "empty front" in text
    assert "<circle" not in text


def test_svg_rejects_bad_axes(tmp_path):
    front = Front(objectives=np.array([[0.0, 1.0]]))
    with pytest.raises(ValueError):
        emit_svg_scatter(front, (0,), tmp_path / "bad.svg")
    with pytest.raises(ValueError):
        emit_svg_scatter(front, (0, 5), tmp_path / "bad.svg")


# ---------------------------------------------------------------------------
# command line entry point


def test_main_success_exit_code(tmp_path, capsys):
    code = main(["--problems", "BK1", "--runs", "2", "--seed", "4",
                 "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "BK1" in out and "purity" in out
    assert "0 not converged" in out


def test_main_unknown_problem(tmp_path, capsys):
    code = main(["--problems", "XYZ9", "--out", str(tmp_path)])
    assert code == 2
    assert "configuration error" in capsys.readouterr().err


def test_main_fixed_needs_constant(tmp_path, capsys):
    code = main(["--problems", "FF1", "--solvers", "fixed", "--runs", "2",
                 "--out", str(tmp_path)])
    assert code == 2
    assert "fixed-l" in capsys.readouterr().err


def test_main_reports_nonconverged(tmp_path, capsys):
    code = main(["--problems", "JOS1", "--runs", "2", "--eps", "1e-13",
                 "--max-iter", "1", "--out", str(tmp_path)])
    assert code == 1
    assert "2 not converged" in capsys.readouterr().out


def test_config_file_defaults_and_cli_override(tmp_path):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(
        "# benchmark defaults\n"
        "problems = BK1\n"
        "runs = 5\n"
        "solvers = backtracking\n"
        "eps = 1e-3\n"
    )
    out = tmp_path / "out"
    code = main(["--config", str(cfg), "--runs", "2", "--out", str(out)])
    assert code == 0
    rows = _read_csv(out / "results.csv")
    assert len(rows) == 3  # header + 2 runs: the flag beats the file default
    assert all(r[0] == "BK1" for r in rows[1:])


def test_config_file_errors(tmp_path, capsys):
    bad_key = tmp_path / "a.cfg"
    bad_key.write_text("frobnicate = 3\n")
    assert main(["--config", str(bad_key)]) == 2
    assert "unknown option" in capsys.readouterr().err

    bad_value = tmp_path / "b.cfg"
    bad_value.write_text("runs = many\n")
    assert main(["--config", str(bad_value)]) == 2
    assert "bad value" in capsys.readouterr().err

    bad_line = tmp_path / "c.cfg"
    bad_line.write_text("no equals sign here\n")
    assert main(["--config", str(bad_line)]) == 2

    assert main(["--config", str(tmp_path / "missing.cfg")]) == 2
