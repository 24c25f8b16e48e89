import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from svmer.data import (
    CsvSchema, DataError, Dataset, Sample, ScalingParams, SplitSpec, apply_scaling,
    builtin_schema, fit_scaling, load_csv, split, split_indices,
)


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestDataset:
    def test_rejects_bad_labels(self):
        with pytest.raises(DataError):
            Dataset(np.zeros((2, 2)), np.array([1, 0]))

    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            Dataset(np.array([[1.0, np.nan]]), np.array([1]))

    def test_arrays_read_only(self, blob_set):
        with pytest.raises(ValueError):
            blob_set.features[0, 0] = 5.0

    def test_samples_round_trip(self, blob_set):
        again = Dataset.from_samples(blob_set.samples, name="x")
        np.testing.assert_array_equal(again.features, blob_set.features)
        np.testing.assert_array_equal(again.labels, blob_set.labels)

    def test_sample_label_checked(self):
        with pytest.raises(DataError):
            Sample((1.0,), 2)

    def test_select_features(self, blob_set):
        sub = blob_set.select_features([1])
        assert sub.feature_count == 1
        np.testing.assert_array_equal(sub.features[:, 0], blob_set.features[:, 1])


class TestLoadCsv:
    def test_label_map_and_drop(self, tmp_path):
        p = write(tmp_path, "1,2.0,3.0,yes\n2,?,1.0,no\n3,4.0,5.0,no\n")
        schema = CsvSchema(label_column=3, label_map={"yes": 1, "no": -1}, drop_columns=(0,))
        ds = load_csv(p, schema)
        assert len(ds) == 2
        np.testing.assert_array_equal(ds.features, [[2.0, 3.0], [4.0, 5.0]])
        np.testing.assert_array_equal(ds.labels, [1, -1])

    def test_impute_mean(self, tmp_path):
        p = write(tmp_path, "1.0,a\n?,b\n3.0,a\n")
        schema = CsvSchema(label_column=1, label_map={"a": 1, "b": -1}, missing_policy="impute_mean")
        ds = load_csv(p, schema)
        np.testing.assert_array_equal(ds.features[:, 0], [1.0, 2.0, 3.0])

    def test_unknown_label_names_value(self, tmp_path):
        p = write(tmp_path, "1.0,a\n2.0,zzz\n")
        schema = CsvSchema(label_column=1, label_map={"a": 1, "b": -1})
        with pytest.raises(DataError, match="zzz"):
            load_csv(p, schema)

    def test_bad_number_names_row(self, tmp_path):
        p = write(tmp_path, "1.0,a\nfoo,b\n")
        schema = CsvSchema(label_column=1, label_map={"a": 1, "b": -1})
        with pytest.raises(DataError, match="row 1"):
            load_csv(p, schema)

    def test_header_and_named_column(self, tmp_path):
        p = write(tmp_path, "x,y,target\n1,2,M\n3,4,B\n")
        schema = CsvSchema(label_column="target", label_map={"M": 1, "B": -1}, header=True)
        ds = load_csv(p, schema)
        assert ds.feature_names == ("x", "y")
        np.testing.assert_array_equal(ds.labels, [1, -1])

    def test_schema_json_round_trip(self, tmp_path):
        s = builtin_schema("hdds")
        p = tmp_path / "s.json"
        p.write_text(json.dumps(s.to_dict()))
        assert CsvSchema.from_json(p) == s

    def test_builtin_heart_schema(self, tmp_path):
        rows = "63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0\n" \
               "67.0,1.0,4.0,160.0,286.0,0.0,2.0,108.0,1.0,1.5,2.0,3.0,3.0,2\n" \
               "67.0,1.0,4.0,120.0,229.0,0.0,2.0,129.0,1.0,2.6,2.0,?,7.0,1\n"
        ds = load_csv(write(tmp_path, rows), builtin_schema("hdds"))
        assert ds.feature_count == 13
        np.testing.assert_array_equal(ds.labels, [-1, 1])


class TestScaling:
    def test_minmax_range(self, blob_set):
        p = fit_scaling(blob_set)
        Z = apply_scaling(blob_set, p).features
        np.testing.assert_allclose(Z.min(axis=0), 0.0, atol=1e-15)
        np.testing.assert_allclose(Z.max(axis=0), 1.0, atol=1e-15)

    def test_zscore_moments(self, blob_set):
        Z = apply_scaling(blob_set, fit_scaling(blob_set, "zscore")).features
        np.testing.assert_allclose(Z.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(Z.std(axis=0), 1.0, atol=1e-12)

    @pytest.mark.parametrize("mode", ["minmax", "zscore"])
    def test_constant_column_maps_to_zero(self, mode):
        ds = Dataset(np.array([[1.0, 7.0], [2.0, 7.0], [4.0, 7.0]]), np.array([1, -1, 1]))
        Z = apply_scaling(ds, fit_scaling(ds, mode)).features
        assert (Z[:, 1] == 0).all()

    def test_params_round_trip(self, blob_set):
        p = fit_scaling(blob_set)
        q = ScalingParams.from_dict(json.loads(json.dumps(p.to_dict())))
        np.testing.assert_array_equal(p.transform(blob_set.features), q.transform(blob_set.features))

    def test_arity_mismatch(self, blob_set):
        with pytest.raises(DataError):
            fit_scaling(blob_set).transform(np.zeros((1, 3)))


labels_strategy = st.lists(st.sampled_from([-1, 1]), min_size=4, max_size=80).filter(
    lambda y: len(set(y)) == 2
)


class TestSplit:
    @settings(max_examples=60, deadline=None)
    @given(labels_strategy, st.data(), st.integers(0, 2**32))
    def test_partition_properties(self, y, data, seed):
        y = np.array(y)
        n_train = data.draw(st.integers(1, len(y) - 1))
        n_test = data.draw(st.integers(0, len(y) - n_train))
        tr, te = split_indices(y, SplitSpec(n_train, n_test, seed))
        assert len(tr) == n_train and len(te) == n_test
        assert not set(tr) & set(te)
        # stratified quota per class within one sample of proportional
        for c in (-1, 1):
            share = (y == c).mean()
            assert abs((y[tr] == c).sum() - share * n_train) < 1 + 1e-9

    def test_deterministic(self, blob_set):
        a = split(blob_set, SplitSpec(30, 10, seed=7))
        b = split(blob_set, SplitSpec(30, 10, seed=7))
        np.testing.assert_array_equal(a[0].features, b[0].features)
        np.testing.assert_array_equal(a[1].labels, b[1].labels)

    def test_seed_changes_split(self, blob_set):
        a, _ = split(blob_set, SplitSpec(30, 10, seed=1))
        b, _ = split(blob_set, SplitSpec(30, 10, seed=2))
        assert not np.array_equal(a.features, b.features)

    def test_too_large(self, blob_set):
        with pytest.raises(DataError):
            split(blob_set, SplitSpec(35, 10))

    def test_unstratified(self, blob_set):
        tr, te = split_indices(blob_set.labels, SplitSpec(30, 10, 3, stratified=False))
        assert len(set(tr) | set(te)) == 40


class TestWorkedExamples:
    def test_one_row(self, tmp_path):
        ds = load_csv(write(tmp_path, "1.0,2.0,pos\n"), CsvSchema(2, {"pos": 1, "neg": -1}))
        assert ds.features.tolist() == [[1.0, 2.0]] and ds.labels.tolist() == [1]

    def test_text_in_numeric_column(self, tmp_path):
        p = write(tmp_path, "1.0,2.0,pos\n3.0,abc,neg\n")
        with pytest.raises(DataError, match="row 1"):
            load_csv(p, CsvSchema(2, {"pos": 1, "neg": -1}))

    def test_wrong_arity(self, tmp_path):
        p = write(tmp_path, "1.0,2.0,pos\n3.0,neg\n")
        with pytest.raises(DataError, match="row 1"):
            load_csv(p, CsvSchema(2, {"pos": 1, "neg": -1}))

    def test_minmax_column(self):
        ds = Dataset(np.array([[0.0], [5.0], [10.0]]), np.array([1, -1, 1]))
        p = fit_scaling(ds)
        assert p.location.tolist() == [0.0] and p.spread.tolist() == [10.0]
        assert apply_scaling(ds, p).features[:, 0].tolist() == [0.0, 0.5, 1.0]

    def test_constant_three(self):
        ds = Dataset(np.array([[3.0], [3.0], [3.0]]), np.array([1, -1, 1]))
        assert apply_scaling(ds, fit_scaling(ds)).features[:, 0].tolist() == [0.0, 0.0, 0.0]

    def test_zscore_pair(self):
        ds = Dataset(np.array([[-1.0], [1.0]]), np.array([1, -1]))
        assert apply_scaling(ds, fit_scaling(ds, "zscore")).features[:, 0].tolist() == [-1.0, 1.0]

    def test_full_train_empty_test(self, blob_set):
        tr, te = split(blob_set, SplitSpec(len(blob_set), 0, seed=5))
        assert len(te) == 0
        assert sorted(map(tuple, tr.features)) == sorted(map(tuple, blob_set.features))

    def test_scaling_ignores_test_rows(self, blob_set):
        tr, te = split(blob_set, SplitSpec(30, 10))
        before = fit_scaling(tr).to_dict()
        te_mutated = Dataset(te.features * 100 + 7, te.labels)
        apply_scaling(te_mutated, fit_scaling(tr))
        assert fit_scaling(tr).to_dict() == before


class TestBenchmarkFiles:
    @pytest.fixture(autouse=True)
    def _data(self):
        from conftest import require_benchmarks
        self.dir = require_benchmarks()

    def test_wdbc(self):
        from svmer.data import load_dataset
        ds = load_dataset("bcds", self.dir / "wdbc.data")
        assert (len(ds), ds.feature_count) == (569, 30)
        assert int((ds.labels == 1).sum()) == 212
        tr, te = split(ds, SplitSpec(455, 114, seed=42))
        assert (len(tr), len(te)) == (455, 114)

    def test_heart_drops_missing(self):
        from svmer.data import load_dataset
        ds = load_dataset("hdds", self.dir / "processed.cleveland.data")
        assert (len(ds), ds.feature_count) == (297, 13)
        assert int((ds.labels == 1).sum()) == 137

    def test_ionosphere(self):
        from svmer.data import load_dataset
        ds = load_dataset("ids", self.dir / "ionosphere.data")
        assert (len(ds), ds.feature_count) == (351, 34)
        assert int((ds.labels == 1).sum()) == 126
        tr, te = split(ds, SplitSpec(263, 80, seed=42))
        idx_tr, idx_te = split_indices(ds.labels, SplitSpec(263, 80, seed=42))
        assert not set(idx_tr) & set(idx_te) and (len(tr), len(te)) == (263, 80)
