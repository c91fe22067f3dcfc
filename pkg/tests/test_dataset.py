import math

import numpy as np
import pytest

from pcaanon import (
    ColumnStats,
    Dataset,
    column_stats,
    destandardize,
    load_csv,
    standardize,
    write_csv,
)
from pcaanon.errors import (
    CsvParseError,
    DataError,
    ShapeMismatchError,
    ZeroVarianceError,
)


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_basic_3x2(self, tmp_path):
        d = load_csv(write(tmp_path, "x,y\n1,2\n3,4\n5,6\n"))
        assert d.n_rows == 3
        assert d.n_cols == 2
        assert d.column_names == ("x", "y")
        assert np.array_equal(d.rows, [[1, 2], [3, 4], [5, 6]])

    def test_parse_error_names_row_and_column(self, tmp_path):
        path = write(tmp_path, "x,y\n1,2\n3,abc\n5,6\n")
        with pytest.raises(CsvParseError) as err:
            load_csv(path)
        assert err.value.row == 2
        assert err.value.column == "y"
        assert "abc" in str(err.value)

    def test_headerless_generated_names(self, tmp_path):
        d = load_csv(write(tmp_path, "7\n9\n"), has_header=False)
        assert d.column_names == ("col0",)
        assert np.array_equal(d.rows, [[7], [9]])

    def test_ragged_rows_rejected(self, tmp_path):
        with pytest.raises(CsvParseError, match="row 2"):
            load_csv(write(tmp_path, "x,y\n1,2\n3\n"))

    def test_empty_file_rejected(self, tmp_path):
        with pytest.raises(CsvParseError):
            load_csv(write(tmp_path, ""))

    def test_non_finite_rejected(self, tmp_path):
        with pytest.raises(CsvParseError, match="row 1"):
            load_csv(write(tmp_path, "x\ninf\n2\n"))


class TestDatasetInvariants:
    def test_single_row_rejected(self):
        with pytest.raises(DataError, match="2 rows"):
            Dataset(column_names=("a",), rows=[[1.0]])

    def test_duplicate_names_rejected(self):
        with pytest.raises(DataError, match="unique"):
            Dataset(column_names=("a", "a"), rows=[[1, 2], [3, 4]])

    def test_nan_rejected(self):
        with pytest.raises(DataError, match="finite"):
            Dataset(column_names=("a",), rows=[[1.0], [math.nan]])


class TestColumnStats:
    def test_1_2_3(self):
        d = Dataset(column_names=("a",), rows=[[1.0], [2.0], [3.0]])
        stats = column_stats(d)
        assert stats.means[0] == pytest.approx(2.0, abs=1e-12)
        # population form: sqrt(((1)^2 + 0 + 1^2)/3) = sqrt(2/3)
        assert stats.std_devs[0] == pytest.approx(math.sqrt(2.0 / 3.0),
                                                  abs=1e-12)

    def test_0_0_4_4(self):
        d = Dataset(column_names=("a",), rows=[[0.0], [0.0], [4.0], [4.0]])
        stats = column_stats(d)
        assert stats.means[0] == pytest.approx(2.0, abs=1e-12)
        assert stats.std_devs[0] == pytest.approx(2.0, abs=1e-12)

    def test_zero_variance_names_column(self):
        d = Dataset(column_names=("a", "flat"),
                    rows=[[1, 5], [2, 5], [3, 5]])
        with pytest.raises(ZeroVarianceError, match="flat"):
            column_stats(d)


class TestStandardize:
    def test_own_stats_gives_zero_mean_unit_variance(self, gaussian_dataset):
        s = standardize(gaussian_dataset, column_stats(gaussian_dataset))
        assert np.all(np.abs(s.rows.mean(axis=0)) <= 1e-9)
        assert np.allclose(s.rows.var(axis=0), 1.0, atol=1e-9)

    def test_1_2_3_values(self):
        d = Dataset(column_names=("a",), rows=[[1.0], [2.0], [3.0]])
        s = standardize(d, column_stats(d))
        expected = math.sqrt(3.0 / 2.0)  # 1/sqrt(2/3)
        assert s.rows[:, 0] == pytest.approx([-expected, 0.0, expected],
                                             abs=1e-12)

    def test_same_stats_applied_to_equal_data_agree_exactly(
            self, gaussian_dataset):
        stats = column_stats(gaussian_dataset)
        b = Dataset(column_names=gaussian_dataset.column_names,
                    rows=gaussian_dataset.rows.copy())
        sa = standardize(gaussian_dataset, stats)
        sb = standardize(b, stats)
        assert np.array_equal(sa.rows, sb.rows)

    def test_dimension_mismatch(self, gaussian_dataset):
        stats = ColumnStats(means=[0.0], std_devs=[1.0])
        with pytest.raises(ShapeMismatchError):
            standardize(gaussian_dataset, stats)


class TestDestandardize:
    def test_round_trip_random(self):
        rng = np.random.default_rng(3)
        d = Dataset(column_names=("a", "b", "c"),
                    rows=rng.uniform(-50, 50, size=(5, 3)))
        stats = column_stats(d)
        back = destandardize(standardize(d, stats), d.column_names)
        assert np.max(np.abs(back.rows - d.rows)) <= 1e-9

    def test_zero_matrix_recovers_means(self, gaussian_dataset):
        stats = column_stats(gaussian_dataset)
        from pcaanon import StandardizedDataset
        zeros = StandardizedDataset(rows=np.zeros((4, 3)), stats=stats)
        back = destandardize(zeros)
        assert np.allclose(back.rows, np.tile(stats.means, (4, 1)),
                           atol=1e-12)

    def test_inverse_of_1_2_3(self):
        d = Dataset(column_names=("a",), rows=[[1.0], [2.0], [3.0]])
        stats = column_stats(d)
        back = destandardize(standardize(d, stats), ("a",))
        assert back.rows[:, 0] == pytest.approx([1.0, 2.0, 3.0], abs=1e-9)

    def test_stats_of_standardized_are_unit(self, gaussian_dataset):
        s = standardize(gaussian_dataset, column_stats(gaussian_dataset))
        d2 = Dataset(column_names=gaussian_dataset.column_names, rows=s.rows)
        stats2 = column_stats(d2)
        assert np.all(np.abs(stats2.means) <= 1e-9)
        assert np.allclose(stats2.std_devs, 1.0, atol=1e-9)


class TestWriteCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        d = Dataset(column_names=("a", "b"),
                    rows=rng.standard_normal((4, 2)) * 1e3)
        path = tmp_path / "out.csv"
        write_csv(d, path)
        back = load_csv(path)
        assert back.column_names == d.column_names
        assert np.max(np.abs(back.rows - d.rows)) <= 1e-9

    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(10)
        d = Dataset(column_names=("a",), rows=rng.standard_normal((6, 1)))
        path = tmp_path / "out.csv"
        write_csv(d, path)
        assert np.array_equal(load_csv(path).rows, d.rows)

    def test_unicode_column_names(self, tmp_path):
        d = Dataset(column_names=("höhe", "收入"), rows=[[1, 2], [3, 4]])
        path = tmp_path / "out.csv"
        write_csv(d, path)
        assert load_csv(path).column_names == ("höhe", "收入")

    def test_too_small_dataset_never_constructs(self):
        # the n >= 2 invariant fires at construction, before any write
        with pytest.raises(DataError):
            Dataset(column_names=("a",), rows=np.empty((0, 1)))
