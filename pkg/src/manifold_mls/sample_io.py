"""CSV codecs for sample, query, prediction and projection files.

Sample files have a header ``x1..xn,f1..fñ`` (any order); ``#`` starts a
comment line. Extra ``t*`` (parameter) and ``truth*`` columns are allowed and
read as reference data. Query files may omit the ``f*`` columns. All floats
are written with 17 significant digits and read back exactly.
"""

from __future__ import annotations

import io
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .approximator import BatchResult
from .errors import SampleFileError
from .frame import AffineFrame
from .samples import SampleSet
from .utils import FLOAT_FORMAT

logger = logging.getLogger(__name__)

_COLUMN = re.compile(r"^(x|f|t|truth)(\d+)$")


@dataclass(slots=True)
class PointTable:
    """Parsed CSV content before it becomes a :class:`SampleSet`."""

    points: np.ndarray
    values: Optional[np.ndarray]
    params: Optional[np.ndarray]
    truth: Optional[np.ndarray]

    def to_samples(self, path: Path) -> SampleSet:
        if self.values is None:
            raise SampleFileError("sample file has no f* value columns", path=path)
        if self.points.shape[0] == 0:
            raise SampleFileError("sample file contains no samples", path=path)
        try:
            return SampleSet(self.points, self.values, truth=self.truth, params=self.params)
        except ValueError as exc:
            raise SampleFileError(str(exc), path=path) from exc


def _data_lines(text: str) -> List[Tuple[int, str]]:
    """Header and data rows with their 1-based physical line numbers."""

    rows = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            rows.append((number, stripped))
    return rows


def _group(columns: Sequence[str], prefix: str, path: Path, header_line: int) -> List[str]:
    found: Dict[int, str] = {}
    for column in columns:
        match = _COLUMN.match(column)
        if match and match.group(1) == prefix:
            found[int(match.group(2))] = column
    if found and sorted(found) != list(range(1, len(found) + 1)):
        raise SampleFileError(f"{prefix}* columns must be numbered 1..{len(found)}", path=path, line=header_line)
    return [found[i] for i in sorted(found)]


def _validate_rows(rows: List[Tuple[int, str]], path: Path) -> None:
    width = len(rows[0][1].split(","))
    for number, line in rows[1:]:
        cells = line.split(",")
        if len(cells) != width:
            raise SampleFileError(f"expected {width} fields, found {len(cells)}", path=path, line=number)
        for cell in cells:
            try:
                value = float(cell)
            except ValueError:
                raise SampleFileError(f"non-numeric value {cell.strip()!r}", path=path, line=number) from None
            if not np.isfinite(value):
                raise SampleFileError(f"non-finite value {cell.strip()!r}", path=path, line=number)


def read_point_table(path: Path) -> PointTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SampleFileError(f"cannot read file: {exc}", path=path) from exc

    rows = _data_lines(text)
    if not rows:
        raise SampleFileError("file has no header row", path=path)
    header_line = rows[0][0]
    columns = [c.strip() for c in rows[0][1].split(",")]
    unknown = [c for c in columns if not _COLUMN.match(c)]
    if unknown:
        raise SampleFileError(f"unexpected columns {unknown}", path=path, line=header_line)
    if len(set(columns)) != len(columns):
        raise SampleFileError("duplicate column names", path=path, line=header_line)
    if not _group(columns, "x", path, header_line):
        raise SampleFileError("no x* coordinate columns", path=path, line=header_line)
    _validate_rows(rows, path)

    frame = pd.read_csv(
        io.StringIO("\n".join(line for _, line in rows)),
        float_precision="round_trip",
        dtype=float,
    )
    frame.columns = columns

    def block(prefix: str) -> Optional[np.ndarray]:
        selected = _group(columns, prefix, path, header_line)
        return frame[selected].to_numpy(dtype=float) if selected else None

    return PointTable(points=block("x"), values=block("f"), params=block("t"), truth=block("truth"))


def read_samples(path: Path) -> SampleSet:
    path = Path(path)
    samples = read_point_table(path).to_samples(path)
    logger.info("read %d samples (n=%d, values=%d) from %s", samples.n_samples, samples.ambient_dim, samples.value_dim, path)
    return samples


def read_queries(path: Path, ambient_dim: Optional[int] = None) -> np.ndarray:
    """Query coordinates; a file without any rows means zero queries."""

    path = Path(path)
    if ambient_dim is not None and path.is_file() and not _data_lines(path.read_text(encoding="utf-8")):
        return np.empty((0, ambient_dim))
    table = read_point_table(path)
    if ambient_dim is not None and table.points.shape[1] != ambient_dim:
        header_line = _data_lines(path.read_text(encoding="utf-8"))[0][0]
        raise SampleFileError(
            f"queries have {table.points.shape[1]} coordinates, samples have {ambient_dim}",
            path=path,
            line=header_line,
        )
    return table.points


# ----------------------------------------------------------------------
def samples_frame(samples: SampleSet, *, include_reference: bool = True) -> pd.DataFrame:
    frame = pd.DataFrame(samples.points, columns=[f"x{i + 1}" for i in range(samples.ambient_dim)])
    for j in range(samples.value_dim):
        frame[f"f{j + 1}"] = samples.values[:, j]
    if include_reference and samples.params is not None:
        for j in range(samples.params.shape[1]):
            frame[f"t{j + 1}"] = samples.params[:, j]
    if include_reference and samples.truth is not None:
        for j in range(samples.truth.shape[1]):
            frame[f"truth{j + 1}"] = samples.truth[:, j]
    return frame


def write_frame(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_samples(samples: SampleSet, path: Path, *, include_reference: bool = True) -> Path:
    return write_frame(samples_frame(samples, include_reference=include_reference), path)


def write_queries(queries: np.ndarray, path: Path) -> Path:
    queries = np.atleast_2d(queries)
    return write_frame(pd.DataFrame(queries, columns=[f"x{i + 1}" for i in range(queries.shape[1])]), path)


def _batch_frame(batch: BatchResult, prefix: str, width: int) -> pd.DataFrame:
    frame = pd.DataFrame(batch.values.reshape(-1, width), columns=[f"{prefix}{i + 1}" for i in range(width)])
    frame.insert(0, "query", np.arange(len(frame)))
    frame["status"] = batch.status
    frame["message"] = [str(batch.failures[i]) if i in batch.failures else "" for i in range(len(frame))]
    return frame


def write_predictions(batch: BatchResult, path: Path, value_dim: int) -> Path:
    """``query,f1..fñ,status,message``; failed rows leave the values empty."""

    return write_frame(_batch_frame(batch, "f", value_dim), path)


def write_projections(batch: BatchResult, path: Path, ambient_dim: int) -> Path:
    return write_frame(_batch_frame(batch, "x", ambient_dim), path)


def write_frames(frames: Sequence[Optional[AffineFrame]], path: Path) -> Path:
    """One row per query: origin, flattened basis and the iteration trace."""

    records = []
    for index, frame in enumerate(frames):
        record = {"query": index}
        if frame is not None:
            record.update(frame.to_record())
        records.append(record)
    return write_frame(pd.DataFrame(records), path)


__all__ = [
    "PointTable",
    "read_point_table",
    "read_queries",
    "read_samples",
    "samples_frame",
    "write_frame",
    "write_frames",
    "write_predictions",
    "write_projections",
    "write_queries",
    "write_samples",
]
