import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from typer.testing import CliRunner

from conftest import linear_values, plane_points
from manifold_mls.cli import EXIT_NUMERICAL, EXIT_USAGE, app
from manifold_mls.sample_io import write_queries, write_samples
from manifold_mls.samples import SampleSet

runner = CliRunner()


@pytest.fixture(autouse=True)
def _environment(monkeypatch, tmp_path: Path) -> None:
    monkeypatch.setenv("MMLS_OUTPUT_DIR", str(tmp_path / "default_out"))
    monkeypatch.setenv("MMLS_PROGRESS", "false")
    monkeypatch.setenv("MMLS_MAX_CONCURRENCY", "1")


@pytest.fixture
def plane_files(tmp_path: Path):
    points = plane_points()
    samples = write_samples(SampleSet(points, linear_values(points)), tmp_path / "plane.csv")
    queries = write_queries(np.array([[0.1, 0.2, 0.3], [-0.25, 0.35, -0.1]]), tmp_path / "queries.csv")
    return samples, queries


def test_fit_eval_writes_predictions(tmp_path: Path, plane_files) -> None:
    samples, queries = plane_files
    out = tmp_path / "out"
    result = runner.invoke(
        app,
        ["fit-eval", "--samples", str(samples), "--queries", str(queries), "--out", str(out), "--k", "4", "--h", "0.1",
         "--dump-frames", str(out / "frames.csv")],
    )
    assert result.exit_code == 0, result.output
    predictions = pd.read_csv(out / "predictions.csv")
    np.testing.assert_allclose(predictions["f1"], [0.6, 2 * -0.25 - 3 * 0.35 + 1], atol=1e-9)
    assert predictions["status"].tolist() == ["ok", "ok"]
    assert (out / "run_config.txt").is_file()
    assert len(pd.read_csv(out / "frames.csv")) == 2


def test_project_and_config_file(tmp_path: Path, plane_files) -> None:
    samples, queries = plane_files
    config = tmp_path / "plane.cfg"
    config.write_text("d=2\nm=1\nk=4\nh=0.1\n", encoding="utf-8")
    out = tmp_path / "out"
    result = runner.invoke(
        app, ["project", "--samples", str(samples), "--queries", str(queries), "--config", str(config), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    projections = pd.read_csv(out / "projections.csv")
    np.testing.assert_allclose(projections[["x1", "x2", "x3"]].to_numpy(), [[0.1, 0.2, 0.0], [-0.25, 0.35, 0.0]], atol=1e-9)


def test_invalid_option_exits_with_usage_code(tmp_path: Path, plane_files) -> None:
    samples, queries = plane_files
    result = runner.invoke(
        app, ["fit-eval", "--samples", str(samples), "--queries", str(queries), "--out", str(tmp_path), "--weight", "cubic"]
    )
    assert result.exit_code == EXIT_USAGE


def test_malformed_sample_file_exits_with_usage_code(tmp_path: Path, plane_files) -> None:
    _, queries = plane_files
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,x2,x3,f1\n1,2,3\n", encoding="utf-8")
    result = runner.invoke(app, ["fit-eval", "--samples", str(bad), "--queries", str(queries), "--out", str(tmp_path)])
    assert result.exit_code == EXIT_USAGE


def test_total_failure_exits_with_numerical_code(tmp_path: Path, plane_files) -> None:
    samples, _ = plane_files
    far = write_queries(np.array([[5.0, 5.0, 5.0]]), tmp_path / "far.csv")
    out = tmp_path / "out"
    result = runner.invoke(
        app, ["fit-eval", "--samples", str(samples), "--queries", str(far), "--out", str(out), "--k", "4", "--h", "0.1"]
    )
    assert result.exit_code == EXIT_NUMERICAL
    assert pd.read_csv(out / "predictions.csv")["status"].tolist() == ["NoSamplesInSupport"]


def test_gen_then_loo_cv(tmp_path: Path) -> None:
    out = tmp_path / "out"
    result = runner.invoke(app, ["gen", "--dataset", "circle", "--n-points", "30", "--seed", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    generated = out / "circle_samples.csv"
    assert len(pd.read_csv(generated)) == 30

    result = runner.invoke(app, ["loo-cv", "--samples", str(generated), "--d", "1", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert (out / "loo_cv.json").is_file()
    assert (out / "loo_cv_trials.csv").is_file()


def test_convergence_command_writes_report(tmp_path: Path) -> None:
    config = tmp_path / "convergence.cfg"
    config.write_text("n_queries=10\nresolutions=10,12,14\n", encoding="utf-8")
    out = tmp_path / "out"
    result = runner.invoke(app, ["convergence", "--config", str(config), "--m", "1", "--out", str(out)])
    assert result.exit_code == 0, result.output
    summary = json.loads((out / "convergence_m1.json").read_text(encoding="utf-8"))
    assert summary["name"] == "convergence_m1"
    assert "frame_residual_slope" in summary
    assert set(summary["weights"]) == {"10", "12", "14"}
    assert summary["weights"]["10"]["k"] == 4.0
    assert (out / "convergence_m1_resolutions.csv").is_file()


def test_fit_eval_echoes_resolved_weight(tmp_path: Path, plane_files) -> None:
    samples, queries = plane_files
    out = tmp_path / "out"
    result = runner.invoke(app, ["fit-eval", "--samples", str(samples), "--queries", str(queries), "--out", str(out)])
    assert result.exit_code == 0, result.output
    echoed = (out / "run_config.txt").read_text(encoding="utf-8")
    resolved = [line for line in echoed.splitlines() if line.startswith("# resolved k=")]
    assert len(resolved) == 1
    assert "None" not in resolved[0]
