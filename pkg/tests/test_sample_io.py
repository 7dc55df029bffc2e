from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from manifold_mls.approximator import BatchResult
from manifold_mls.datasets.klein import gen_klein
from manifold_mls.errors import NoSamplesInSupport, SampleFileError
from manifold_mls.frame import AffineFrame
from manifold_mls.sample_io import (
    read_point_table,
    read_queries,
    read_samples,
    write_frames,
    write_predictions,
    write_queries,
    write_samples,
)


def test_samples_are_read_back_bit_for_bit(tmp_path: Path) -> None:
    samples = gen_klein(40, sigma_r=0.1, snrdb=5.0, seed=2)
    path = write_samples(samples, tmp_path / "klein.csv")
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == "x1,x2,x3,x4,f1,t1,t2,truth1"
    restored = read_samples(path)
    np.testing.assert_array_equal(restored.points, samples.points)
    np.testing.assert_array_equal(restored.values, samples.values)
    np.testing.assert_array_equal(restored.params, samples.params)
    np.testing.assert_array_equal(restored.truth, samples.truth)


def test_column_order_and_comments_are_flexible(tmp_path: Path) -> None:
    path = tmp_path / "samples.csv"
    path.write_text("# generated by hand\nf1,x2,x1\n\n5.0,2.0,1.0\n# note\n6.0,4.0,3.0\n", encoding="utf-8")
    samples = read_samples(path)
    np.testing.assert_array_equal(samples.points, [[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(samples.values, [[5.0], [6.0]])


@pytest.mark.parametrize(
    "body, line",
    [
        ("x1,f1\n1.0,2.0\n# skip\n3.0\n", 4),
        ("x1,f1\n1.0,2.0\n3.0,abc\n", 3),
        ("x1,f1\n1.0,nan\n", 2),
        ("x1,y1\n1.0,2.0\n", 1),
        ("x1,x3,f1\n1.0,2.0,3.0\n", 1),
    ],
)
def test_malformed_rows_report_their_line(tmp_path: Path, body: str, line: int) -> None:
    path = tmp_path / "bad.csv"
    path.write_text(body, encoding="utf-8")
    with pytest.raises(SampleFileError) as info:
        read_point_table(path)
    assert info.value.line == line
    assert f"bad.csv:{line}" in str(info.value)


def test_samples_need_values(tmp_path: Path) -> None:
    path = write_queries(np.ones((3, 2)), tmp_path / "queries.csv")
    with pytest.raises(SampleFileError):
        read_samples(path)
    with pytest.raises(SampleFileError):
        read_samples(tmp_path / "missing.csv")


def test_queries_and_their_dimension(tmp_path: Path) -> None:
    path = write_queries(np.arange(6.0).reshape(3, 2), tmp_path / "queries.csv")
    np.testing.assert_array_equal(read_queries(path, 2), np.arange(6.0).reshape(3, 2))
    with pytest.raises(SampleFileError) as info:
        read_queries(path, 3)
    assert info.value.line == 1

    header_only = tmp_path / "header.csv"
    header_only.write_text("x1,x2\n", encoding="utf-8")
    assert read_queries(header_only, 2).shape == (0, 2)
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    assert read_queries(empty, 2).shape == (0, 2)


def test_predictions_and_frames_files(tmp_path: Path) -> None:
    batch = BatchResult(values=np.array([[1.5], [np.nan]]), failures={1: NoSamplesInSupport(3, 0, 0.5)})
    path = write_predictions(batch, tmp_path / "predictions.csv", 1)
    frame = pd.read_csv(path, keep_default_na=False)
    assert list(frame.columns) == ["query", "f1", "status", "message"]
    assert frame["status"].tolist() == ["ok", "NoSamplesInSupport"]
    assert frame.loc[1, "f1"] == ""
    assert "0 samples within support radius" in frame.loc[1, "message"]

    basis = np.array([[1.0], [0.0]])
    frames = [AffineFrame(origin=np.array([0.5, 0.0]), basis=basis, trace=(0.1, 1e-12)), None]
    table = pd.read_csv(write_frames(frames, tmp_path / "frames.csv"))
    assert table.loc[0, "q1"] == 0.5
    assert table.loc[0, "u1_1"] == 1.0
    assert table.loc[0, "iterations"] == 2
    assert np.isnan(table.loc[1, "q1"])
