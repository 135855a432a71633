"""Tests for the benchmark generators and CSV input/output."""

import numpy as np
import pytest

from kod import KodConfig, fit, load_csv, make_dataset, write_csv
from kod.errors import CsvParseError, InvalidInputError


class TestGenerators:
    @pytest.mark.parametrize("name", ["salt_pepper_ring", "circle_cluster",
                                      "inside_outside", "moons"])
    def test_label_count_contract(self, name):
        for n, cont in ((100, 0.1), (333, 0.15), (1000, 0.2)):
            X, labels = make_dataset(name, n, cont, seed=0)
            assert X.shape == (n, 2)
            assert labels.sum() == round(n * cont)
            assert np.isfinite(X).all()

    def test_deterministic_given_seed(self):
        a, la = make_dataset("moons", 200, 0.1, seed=5)
        b, lb = make_dataset("moons", 200, 0.1, seed=5)
        assert np.array_equal(a, b) and np.array_equal(la, lb)
        c, _ = make_dataset("moons", 200, 0.1, seed=6)
        assert not np.array_equal(a, c)

    def test_inside_outside_composition(self):
        X, labels = make_dataset("inside_outside", 1000, 0.2, seed=1)
        radius = np.linalg.norm(X, axis=1)
        assert (~labels).sum() == 800
        assert (labels & (radius < 1.0)).sum() == 100
        assert (labels & (radius >= 1.0)).sum() == 100

    def test_inside_outside_geometry_bands(self):
        X, labels = make_dataset("inside_outside", 500, 0.2, seed=2)
        radius = np.linalg.norm(X, axis=1)
        inner = radius[labels & (radius < 1.0)]
        outer = radius[labels & (radius >= 1.0)]
        assert np.all(inner < 1.0 - 3 * 0.05)
        assert np.all(outer > 1.0 + 3 * 0.05)

    def test_salt_pepper_noise_avoids_ring_band(self):
        X, labels = make_dataset("salt_pepper_ring", 500, 0.2, seed=3)
        radius = np.linalg.norm(X, axis=1)
        assert np.all(np.abs(radius[labels] - 1.0) > 3 * 0.05)
        assert np.all(radius[labels] <= 2.0)

    def test_moons_arcs_interleave(self):
        X, labels = make_dataset("moons", 400, 0.1, seed=4)
        upper, lower = X[~labels], X[labels]
        assert upper[:, 1].max() > lower[:, 1].max()
        assert lower[:, 0].max() > upper[:, 0].max() - 0.5

    def test_geometry_overrides(self):
        X, labels = make_dataset("inside_outside", 200, 0.2, seed=5, outer_radius=2.5)
        radius = np.linalg.norm(X, axis=1)
        assert radius[labels].max() > 2.2

    def test_spectral_diagnostics_at_defaults(self):
        # regression band for the prescribed generator geometry: the retained
        # dimension sits in the expected window and the numerical rank of the
        # centered kernel stays in a narrow band around 90
        X, _ = make_dataset("inside_outside", 1000, 0.2, seed=0)
        _, report = fit(X, KodConfig(seed=0))
        assert 5 <= report.q <= 11
        assert 84 <= report.rank_full <= 96

    def test_invalid_arguments_rejected(self):
        with pytest.raises(InvalidInputError):
            make_dataset("nope", 100, 0.1, seed=0)
        with pytest.raises(InvalidInputError):
            make_dataset("moons", 10, 0.1, seed=0)
        with pytest.raises(InvalidInputError):
            make_dataset("moons", 100, 0.6, seed=0)
        with pytest.raises(InvalidInputError):
            make_dataset("moons", 100, 0.1, seed=0, wrong_knob=1.0)


class TestCsv:
    def test_plain_numeric_file(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,2\n3,4\n5,6\n")
        X, labels = load_csv(path)
        assert np.array_equal(X, [[1, 2], [3, 4], [5, 6]])
        assert labels is None

    def test_header_autodetected(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,y\n1,2\n3,4\n")
        X, _ = load_csv(path)
        assert X.shape == (2, 2)

    def test_label_column_by_name(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,y,label\n1,2,0\n3,4,1\n5,6,0\n")
        X, labels = load_csv(path, label_column="label")
        assert X.shape == (3, 2)
        assert np.array_equal(labels, [False, True, False])

    def test_label_column_by_index(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("0,1.0,9\n1,0.0,8\n")
        X, labels = load_csv(path, label_column=0)
        assert np.array_equal(labels, [False, True])
        assert np.array_equal(X, [[1.0, 9.0], [0.0, 8.0]])

    def test_bad_cell_reports_row_and_column(self, tmp_path):
        rows = ["1,2"] * 6 + ["1,abc"] + ["3,4"]
        path = tmp_path / "data.csv"
        path.write_text("\n".join(rows) + "\n")
        with pytest.raises(CsvParseError, match=r"row 7, column 2"):
            load_csv(path)

    def test_ragged_row_reported(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(CsvParseError, match="row 2"):
            load_csv(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,nan\n")
        with pytest.raises(CsvParseError, match="non-finite"):
            load_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CsvParseError, match="not found"):
            load_csv(tmp_path / "missing.csv")

    def test_empty_file(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("")
        with pytest.raises(CsvParseError, match="no data"):
            load_csv(path)

    def test_unknown_label_name(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(CsvParseError, match="no column named"):
            load_csv(path, label_column="flag")

    def test_round_trip_full_precision(self, tmp_path):
        rng = np.random.default_rng(0)
        X = np.concatenate([
            rng.standard_normal((5, 3)),
            [[0.1, 1.0 / 3.0, 1e-300], [-1e300, 2.0 ** 53 + 1.0, 5e-324]],
        ])
        path = tmp_path / "data.csv"
        write_csv(path, X, columns=["a", "b", "c"])
        Y, _ = load_csv(path)
        assert np.array_equal(X, Y)

    def test_round_trip_with_labels(self, tmp_path):
        X, labels = make_dataset("moons", 60, 0.1, seed=1)
        path = tmp_path / "data.csv"
        write_csv(path, X, columns=["x", "y"], labels=labels)
        Y, loaded = load_csv(path, label_column="label")
        assert np.array_equal(X, Y)
        assert np.array_equal(labels, loaded)

    def test_forced_header_flag(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,2\n3,4\n")
        X, _ = load_csv(path, header=True)
        assert X.shape == (1, 2)
