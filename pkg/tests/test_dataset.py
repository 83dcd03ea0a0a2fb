import numpy as np
import pytest

from chainbound.dataset import (
    AugmentedView,
    MultiLabelDataset,
    initial_view,
    load_csv,
    save_csv,
    split,
)
from chainbound.validation import DataFormatError


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_zero_one_labels_are_mapped(self, tmp_path):
        p = write(tmp_path / "d.csv", "a,b,y\n1.0,2.0,0\n3.0,4.0,1\n5.0,6.0,1\n")
        data = load_csv(p, 1)
        assert data.labels[:, 0].tolist() == [-1, 1, 1]
        assert data.n_rows == 3 and data.n_features == 2

    def test_bad_label_names_offending_row(self, tmp_path):
        rows = "\n".join(f"{i}.0,1" for i in range(1, 5))
        p = write(tmp_path / "d.csv", f"a,y\n{rows}\n9.0,2\n")
        with pytest.raises(DataFormatError, match="row 5"):
            load_csv(p, 1)

    def test_identity_load(self, tmp_path):
        body = "a,b,y1,y2\n0.5,1.5,-1,1\n2.5,3.5,1,1\n4.5,5.5,-1,-1\n6.5,7.5,1,-1\n"
        data = load_csv(write(tmp_path / "d.csv", body), 2)
        assert (data.n_rows, data.n_features, data.n_labels) == (4, 2, 2)
        assert data.feature_names == ("a", "b")
        assert data.label_names == ("y1", "y2")

    def test_non_numeric_feature_reports_row(self, tmp_path):
        p = write(tmp_path / "d.csv", "a,y\n1.0,1\nzap,1\n")
        with pytest.raises(DataFormatError, match="row 2"):
            load_csv(p, 1)

    def test_row_length_mismatch_reports_row(self, tmp_path):
        p = write(tmp_path / "d.csv", "a,b,y\n1.0,2.0,1\n3.0,1\n")
        with pytest.raises(DataFormatError, match="row 2"):
            load_csv(p, 1)

    def test_missing_value_is_hard_error(self, tmp_path):
        p = write(tmp_path / "d.csv", "a,y\n,1\n")
        with pytest.raises(DataFormatError):
            load_csv(p, 1)

    def test_roundtrip_is_identity(self, tmp_path):
        rng = np.random.default_rng(5)
        data = MultiLabelDataset(rng.standard_normal((7, 3)), rng.choice([-1, 1], (7, 2)))
        path = tmp_path / "out.csv"
        save_csv(data, path)
        back = load_csv(path, 2)
        assert np.array_equal(back.features, data.features)
        assert np.array_equal(back.labels, data.labels)
        save_csv(back, tmp_path / "again.csv")
        assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


class TestDatasetInvariants:
    def test_rejects_non_sign_labels(self):
        with pytest.raises(ValueError):
            MultiLabelDataset(np.ones((2, 1)), np.array([[0], [1]]))

    def test_rejects_row_count_mismatch(self):
        with pytest.raises(ValueError):
            MultiLabelDataset(np.ones((2, 1)), np.array([[1], [1], [1]]))

    def test_arrays_are_read_only(self):
        data = MultiLabelDataset(np.ones((2, 1)), np.array([[1], [-1]]))
        with pytest.raises(ValueError):
            data.features[0, 0] = 5.0


class TestSplit:
    def test_floor_sizes(self):
        data = MultiLabelDataset(np.arange(10.0).reshape(10, 1), np.ones((10, 1), int))
        train, test = split(data, 0.8, 7)
        assert (train.n_rows, test.n_rows) == (8, 2)

    def test_deterministic_and_disjoint(self):
        data = MultiLabelDataset(np.arange(10.0).reshape(10, 1), np.ones((10, 1), int))
        a1, b1 = split(data, 0.8, 7)
        a2, b2 = split(data, 0.8, 7)
        assert np.array_equal(a1.features, a2.features)
        assert np.array_equal(b1.features, b2.features)
        together = np.concatenate([a1.features[:, 0], b1.features[:, 0]])
        assert sorted(together.tolist()) == list(range(10))

    def test_minimum_one_row_each_side(self):
        data = MultiLabelDataset(np.arange(2.0).reshape(2, 1), np.ones((2, 1), int))
        train, test = split(data, 0.5, 0)
        assert (train.n_rows, test.n_rows) == (1, 1)

    def test_fraction_and_size_guards(self):
        data = MultiLabelDataset(np.arange(2.0).reshape(2, 1), np.ones((2, 1), int))
        with pytest.raises(ValueError):
            split(data, 1.0, 0)
        one = MultiLabelDataset(np.ones((1, 1)), np.ones((1, 1), int))
        with pytest.raises(ValueError):
            split(one, 0.5, 0)


class TestAugmentedView:
    def make(self):
        return MultiLabelDataset(
            np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]), np.ones((3, 2), int)
        )

    def test_appended_column_lands_last(self):
        view = initial_view(self.make(), (0, 1))
        nxt = view.augment([1, -1, 1])
        assert nxt.step == 2
        assert nxt.matrix()[:, -1].tolist() == [1.0, -1.0, 1.0]

    def test_width_grows_to_d_plus_k_minus_1(self):
        data = MultiLabelDataset(np.ones((3, 2)), np.ones((3, 3), int))
        view = initial_view(data, (0, 1, 2))
        for _ in range(data.n_labels - 1):
            view = view.augment([1, 1, 1])
        assert view.width == data.n_features + data.n_labels - 1
        assert view.matrix().shape == (3, view.width)

    def test_zero_entry_rejected(self):
        view = initial_view(self.make(), (0, 1))
        with pytest.raises(ValueError):
            view.augment([1, 0, 1])

    def test_length_mismatch_rejected(self):
        view = initial_view(self.make(), (0, 1))
        with pytest.raises(ValueError):
            view.augment([1, -1])

    def test_base_never_mutated(self):
        data = self.make()
        before = data.features.copy()
        view = initial_view(data, (0, 1)).augment([1, -1, 1])
        mat = view.matrix()
        mat[:] = 99.0
        assert np.array_equal(data.features, before)
        assert view.matrix()[0, 0] == 1.0

    def test_step_one_has_no_prediction_columns(self):
        view = initial_view(self.make(), (0, 1))
        assert view.predictions.shape == (3, 0)
        assert np.array_equal(view.matrix(), self.make().features)

    def test_step_prediction_consistency_enforced(self):
        with pytest.raises(ValueError):
            AugmentedView(self.make(), (0, 1), 2, np.empty((3, 0), dtype=int))
