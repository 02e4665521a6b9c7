import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtqe.data import (
    QeDataset,
    Scaler,
    apply_scaler,
    fit_scaler,
    load_edit_counts,
    load_features,
    load_hter,
    load_sentences,
    load_table,
    sentence_lengths,
    write_table,
)
from mtqe.errors import (
    DimensionMismatch,
    LengthMismatch,
    NonNumericCell,
    RaggedRows,
    TooFewRows,
)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadFeatures:
    def test_zero_matrix(self, tmp_path):
        p = _write(tmp_path / "f.tsv", "0\t0\t0\n0\t0\t0\n")
        X = load_features(p)
        assert X.shape == (2, 3)
        assert not X.any()

    def test_direct_parse(self, tmp_path):
        p = _write(tmp_path / "f.tsv", "1.5\t2.0\n3.0\t4.0\n")
        assert load_features(p).tolist() == [[1.5, 2.0], [3.0, 4.0]]

    def test_ragged_rows(self, tmp_path):
        p = _write(tmp_path / "f.tsv", "1\t2\t3\n4\t5\n")
        with pytest.raises(RaggedRows, match="row 2"):
            load_features(p)

    def test_non_numeric_cell_named(self, tmp_path):
        p = _write(tmp_path / "f.tsv", "1\t2\n1\tx\n")
        with pytest.raises(NonNumericCell, match="row 2, column 2"):
            load_features(p)

    def test_non_finite_rejected(self, tmp_path):
        p = _write(tmp_path / "f.tsv", "1\tnan\n")
        with pytest.raises(NonNumericCell):
            load_features(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_features(tmp_path / "nope.tsv")

    def test_roundtrip_12_significant_digits(self, tmp_path):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(20, 5)) * 10.0 ** rng.integers(-6, 6, size=(20, 5))
        p = tmp_path / "rt.tsv"
        write_table(p, X)
        back = load_features(p)
        assert np.all(np.abs(back - X) <= 1e-11 * np.abs(X))

    def test_comment_skipping(self, tmp_path):
        p = _write(tmp_path / "f.tsv", "# config: {}\n1\t2\n")
        assert load_table(p, skip_comments=True).tolist() == [[1.0, 2.0]]


class TestLabelLoaders:
    def test_hter_single_column(self, tmp_path):
        p = _write(tmp_path / "h.txt", "0.5\n0.25\n")
        assert load_hter(p).tolist() == [0.5, 0.25]

    def test_hter_rejects_multicolumn(self, tmp_path):
        p = _write(tmp_path / "h.txt", "0.5\t1\n")
        with pytest.raises(RaggedRows):
            load_hter(p)

    def test_edit_counts_four_columns(self, tmp_path):
        p = _write(tmp_path / "e.tsv", "1\t0\t2\t0\n0\t0\t0\t1\n")
        assert load_edit_counts(p).shape == (2, 4)

    def test_edit_counts_reject_one_column(self, tmp_path):
        p = _write(tmp_path / "e.tsv", "0.5\n")
        with pytest.raises(RaggedRows):
            load_edit_counts(p)

    def test_sentences(self, tmp_path):
        p = _write(tmp_path / "s.txt", "The cat sat\nok\n")
        sents = load_sentences(p)
        assert sents == [["the", "cat", "sat"], ["ok"]]
        assert sentence_lengths(sents).tolist() == [3, 1]


class TestScaler:
    def test_zero_variance_guard(self):
        s = fit_scaler(np.array([[2.0], [2.0], [2.0]]))
        assert s.means[0] == 2.0
        assert s.stds[0] == 1.0

    def test_population_std_two_points(self):
        s = fit_scaler(np.array([[0.0], [2.0]]))
        assert s.means[0] == 1.0
        assert s.stds[0] == 1.0

    def test_population_std_three_points(self):
        s = fit_scaler(np.array([[1.0], [2.0], [3.0]]))
        assert s.means[0] == 2.0
        assert s.stds[0] == pytest.approx(math.sqrt(2.0 / 3.0), abs=1e-15)

    def test_too_few_rows(self):
        with pytest.raises(TooFewRows):
            fit_scaler(np.array([[1.0, 2.0]]))

    def test_apply_centers_own_fit(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(50, 4)) * [1, 10, 100, 0.001]
        Z = apply_scaler(fit_scaler(X), X)
        assert np.all(np.abs(Z.mean(axis=0)) < 1e-9)
        assert np.all(np.abs(Z.var(axis=0) - 1.0) < 1e-9)

    def test_zero_variance_column_maps_to_zero(self):
        X = np.column_stack([np.full(5, 3.0), np.arange(5.0)])
        Z = apply_scaler(fit_scaler(X), X)
        assert not Z[:, 0].any()

    def test_direct_formula(self):
        s = Scaler(means=np.array([1.0]), stds=np.array([2.0]))
        assert apply_scaler(s, np.array([[3.0]])).tolist() == [[1.0]]

    def test_dimension_mismatch(self):
        s = Scaler(means=np.zeros(2), stds=np.ones(2))
        with pytest.raises(DimensionMismatch):
            apply_scaler(s, np.zeros((3, 3)))

    @settings(max_examples=25, deadline=None)
    @given(
        a=st.floats(min_value=-5, max_value=5, allow_nan=False).filter(lambda v: abs(v) > 1e-3),
        b=st.floats(min_value=-5, max_value=5, allow_nan=False),
        seed=st.integers(min_value=0, max_value=2**16),
    )
    def test_scaling_is_affine(self, a, b, seed):
        X = np.random.default_rng(seed).normal(size=(8, 3))
        s = fit_scaler(X)
        lhs = apply_scaler(s, a * X + b)
        rhs = a * apply_scaler(s, X) + (a * s.means + b - s.means) / s.stds
        assert np.allclose(lhs, rhs, atol=1e-9)


class TestQeDataset:
    def test_length_validation(self):
        with pytest.raises(LengthMismatch):
            QeDataset(features=np.zeros((3, 2)), gold_hter=np.zeros(2))

    def test_subset_keeps_alignment(self):
        ds = QeDataset(
            features=np.arange(12.0).reshape(6, 2),
            gold_hter=np.arange(6.0),
            target_lengths=np.arange(1, 7),
        )
        sub = ds.subset(np.array([4, 1]))
        assert sub.features[:, 0].tolist() == [8.0, 2.0]
        assert sub.gold_hter.tolist() == [4.0, 1.0]
        assert sub.target_lengths.tolist() == [5, 2]
        assert sub.gold_edits is None
