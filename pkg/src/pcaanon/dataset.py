"""Tabular data model: CSV ingestion/emission and standardization transforms.

A :class:`Dataset` is an n x p table of finite reals with named columns.
Standardization is always performed with the population (divide-by-n)
standard deviation, and the stats computed from the true database are
reused verbatim when standardizing its anonymized counterpart, so both
tables are expressed on the same per-column scale.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CsvParseError,
    DataError,
    ShapeMismatchError,
    ZeroVarianceError,
)


@dataclass(frozen=True)
class Dataset:
    """An n x p numeric table with unique column names."""

    column_names: tuple
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise DataError(f"dataset rows must be 2-D, got ndim={rows.ndim}")
        n, p = rows.shape
        if n < 2:
            raise DataError(f"dataset needs at least 2 rows, got {n}")
        if p < 1:
            raise DataError("dataset needs at least 1 column")
        names = tuple(str(c) for c in self.column_names)
        if len(names) != p:
            raise DataError(
                f"{len(names)} column names for {p} columns")
        if len(set(names)) != len(names):
            raise DataError("column names must be unique")
        if not np.all(np.isfinite(rows)):
            raise DataError("dataset contains non-finite values")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "column_names", names)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_cols(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class ColumnStats:
    """Per-column mean and population standard deviation."""

    means: np.ndarray
    std_devs: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64).reshape(-1)
        stds = np.asarray(self.std_devs, dtype=np.float64).reshape(-1)
        if means.shape != stds.shape:
            raise DataError("means and std_devs must have equal length")
        if np.any(stds <= 0):
            j = int(np.argmax(stds <= 0))
            raise ZeroVarianceError(
                f"non-positive standard deviation at column index {j}",
                column=j)
        means.setflags(write=False)
        stds.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "std_devs", stds)

    def __len__(self) -> int:
        return self.means.shape[0]

    def same_as(self, other: "ColumnStats") -> bool:
        """Exact equality; used to ensure two operands share one scale."""
        return (len(self) == len(other)
                and np.array_equal(self.means, other.means)
                and np.array_equal(self.std_devs, other.std_devs))


@dataclass(frozen=True)
class StandardizedDataset:
    """Rows mapped to (value - mean) / std, plus the stats used."""

    rows: np.ndarray
    stats: ColumnStats

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != len(self.stats):
            raise ShapeMismatchError(
                f"standardized rows of shape {rows.shape} do not match "
                f"{len(self.stats)} column stats")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_cols(self) -> int:
        return self.rows.shape[1]


def load_csv(path, has_header: bool = True) -> Dataset:
    """Read an RFC-4180-style CSV of finite reals into a Dataset.

    With ``has_header=False`` columns are named ``col0..col{p-1}``.
    Parse failures report the 1-based data row and the column name.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        records = [row for row in reader if row]
    if not records:
        raise CsvParseError(f"empty CSV file: {path}")

    if has_header:
        names = [cell.strip() for cell in records[0]]
        data_rows = records[1:]
    else:
        names = [f"col{j}" for j in range(len(records[0]))]
        data_rows = records
    if not data_rows:
        raise CsvParseError(f"CSV has a header but no data rows: {path}")

    p = len(names)
    values = np.empty((len(data_rows), p), dtype=np.float64)
    for i, row in enumerate(data_rows):
        if len(row) != p:
            raise CsvParseError(
                f"row {i + 1} has {len(row)} cells, expected {p}",
                row=i + 1)
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise CsvParseError(
                    f"cannot parse {cell!r} at row {i + 1}, "
                    f"column {names[j]!r}",
                    row=i + 1, column=names[j]) from None
            if not math.isfinite(v):
                raise CsvParseError(
                    f"non-finite value {cell!r} at row {i + 1}, "
                    f"column {names[j]!r}",
                    row=i + 1, column=names[j])
            values[i, j] = v
    return Dataset(column_names=tuple(names), rows=values)


def write_csv(d: Dataset, path) -> None:
    """Write header plus rows; floats keep full round-trip precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(d.column_names)
        for row in d.rows:
            # repr of a Python float is the shortest exact representation
            # (17 significant digits at most), so load_csv(write_csv(d)) == d.
            writer.writerow([repr(float(v)) for v in row])


def column_stats(d: Dataset) -> ColumnStats:
    """Per-column mean and population (divide-by-n) standard deviation."""
    means = d.rows.mean(axis=0)
    stds = np.sqrt(np.mean((d.rows - means) ** 2, axis=0))
    for j, s in enumerate(stds):
        if s == 0.0:
            raise ZeroVarianceError(
                f"column {d.column_names[j]!r} has zero variance",
                column=d.column_names[j])
    return ColumnStats(means=means, std_devs=stds)


def standardize(d: Dataset, stats: ColumnStats) -> StandardizedDataset:
    """Map each value to (value - mean_j) / std_j using the given stats."""
    if len(stats) != d.n_cols:
        raise ShapeMismatchError(
            f"stats have {len(stats)} columns, dataset has {d.n_cols}")
    rows = (d.rows - stats.means) / stats.std_devs
    return StandardizedDataset(rows=rows, stats=stats)


def destandardize(s: StandardizedDataset,
                  column_names=None) -> Dataset:
    """Invert :func:`standardize`, restoring original attribute units."""
    if column_names is None:
        column_names = tuple(f"col{j}" for j in range(s.n_cols))
    rows = s.rows * s.stats.std_devs + s.stats.means
    return Dataset(column_names=tuple(column_names), rows=rows)
