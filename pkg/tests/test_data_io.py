import numpy as np
import pytest
import scipy.sparse as sp

from toppush import EmptyClass, Model, ParseError, UnknownLabel, build_dataset
from toppush.data_io import (
    SplitSpec,
    parse_libsvm,
    predict_scores,
    read_libsvm,
    read_model,
    scale_to_unit_ball,
    stratified_folds,
    stratified_split,
    write_libsvm,
    write_model,
)


def write(tmp_path, text, name="d.libsvm"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_two_line_file(tmp_path):
    data = read_libsvm(write(tmp_path, "+1 1:1.0\n-1 1:-1.0"))
    assert (data.m, data.n, data.d) == (1, 1, 1)
    assert data.positives.to_dense().tolist() == [[1.0]]
    assert data.negatives.to_dense().tolist() == [[-1.0]]


def test_comments_blank_lines_and_zero_label(tmp_path):
    X, y = parse_libsvm(write(tmp_path, "# header\n\n1 3:2 # tail\n0 1:1\n-1\n"))
    assert X.shape == (3, 3)
    assert y.tolist() == [1.0, 0.0, -1.0]
    assert X.toarray()[0].tolist() == [0.0, 0.0, 2.0]


def test_unknown_label(tmp_path):
    with pytest.raises(UnknownLabel):
        read_libsvm(write(tmp_path, "+1 1:1\n2 1:3\n"))


def test_parse_error_names_line(tmp_path):
    with pytest.raises(ParseError) as err:
        read_libsvm(write(tmp_path, "+1 1:1\n-1 1:abc\n"))
    assert err.value.lineno == 2
    assert ":2:" in str(err.value)


@pytest.mark.parametrize("bad", ["+1 0:1\n", "+1 2:1 1:1\n", "+1 1:nan\n", "+1 x\n"])
def test_malformed_features(tmp_path, bad):
    with pytest.raises(ParseError):
        parse_libsvm(write(tmp_path, bad))


def test_single_class_file(tmp_path):
    with pytest.raises(EmptyClass):
        read_libsvm(write(tmp_path, "+1 1:1\n+1 1:2\n"))


def test_n_features(tmp_path):
    X, _ = parse_libsvm(write(tmp_path, "+1 1:1\n"), n_features=4)
    assert X.shape == (1, 4)


def test_libsvm_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    Xp = rng.normal(size=(4, 5))
    Xp[Xp < 0] = 0
    data = build_dataset(Xp, rng.normal(size=(3, 5)))
    path = tmp_path / "rt.libsvm"
    write_libsvm(data, path)
    back = read_libsvm(path, n_features=5)
    np.testing.assert_array_equal(back.positives.to_dense(), data.positives.to_dense())
    np.testing.assert_array_equal(back.negatives.to_dense(), data.negatives.to_dense())


def _data(m, n, d=2):
    return build_dataset(np.arange(m * d, dtype=float).reshape(m, d) + 1,
                         -np.arange(n * d, dtype=float).reshape(n, d) - 1)


def test_split_counts_and_determinism():
    data = _data(3, 3)
    train, test = stratified_split(data, SplitSpec(2 / 3, seed=7))
    assert (train.m, train.n, test.m, test.n) == (2, 2, 1, 1)
    again, _ = stratified_split(data, SplitSpec(2 / 3, seed=7))
    np.testing.assert_array_equal(again.positives.to_dense(), train.positives.to_dense())
    np.testing.assert_array_equal(again.negatives.to_dense(), train.negatives.to_dense())


def test_split_partitions_rows():
    data = _data(10, 7)
    train, test = stratified_split(data, SplitSpec(seed=3))
    rows = sorted(map(tuple, np.vstack([train.positives.to_dense(), test.positives.to_dense()])))
    assert rows == sorted(map(tuple, data.positives.to_dense()))


def test_split_keeps_single_positive_in_train():
    train, test = stratified_split(_data(1, 5), SplitSpec(0.999))
    assert train.m == 1 and test.m == 0
    with pytest.raises(EmptyClass):
        test.require_both_classes("test split")


def test_split_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(1.0)


def test_folds_cover_each_row_once():
    data = _data(10, 12)
    folds = stratified_folds(data, 5, seed=1)
    assert len(folds) == 5
    assert sum(v.m for _, v in folds) == 10 and sum(v.n for _, v in folds) == 12
    for tr, va in folds:
        assert tr.m + va.m == 10 and tr.n + va.n == 12
    same = stratified_folds(data, 5, seed=1)
    for (_, a), (_, b) in zip(folds, same):
        np.testing.assert_array_equal(a.positives.to_dense(), b.positives.to_dense())


def test_fold_with_empty_class_is_named():
    with pytest.raises(EmptyClass, match="fold 3"):
        stratified_folds(_data(3, 10), 5)


def test_scale_to_unit_ball():
    small = build_dataset([[0.6, 0.0]], [[0.0, -1.0]])
    out, factor = scale_to_unit_ball(small)
    assert out is small and factor == 1.0
    big, factor = scale_to_unit_ball(build_dataset([[2.0, 0.0]], [[0.0, 1.0]]))
    assert factor == 2.0
    assert big.positives.to_dense().tolist() == [[1.0, 0.0]]
    assert big.negatives.to_dense().tolist() == [[0.0, 0.5]]


@pytest.mark.parametrize("w", [[0.5, -1.25, 3.0], [0.0, 0.0, 0.0, 0.1, 0.0]])
def test_model_roundtrip(tmp_path, w):
    model = Model(w=np.array(w) / 3.0, lam=0.1, trained_epsilon=1e-6, iterations_used=17,
                  scale_factor=2.5)
    path = tmp_path / "model.txt"
    write_model(model, path)
    back = read_model(path)
    np.testing.assert_array_equal(back.w, model.w)
    assert (back.lam, back.trained_epsilon, back.iterations_used, back.scale_factor) == (
        0.1, 1e-6, 17, 2.5)
    assert back.loss_kind == model.loss_kind


def test_read_model_rejects_garbage(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("not a model\n")
    with pytest.raises(ParseError):
        read_model(p)


def test_predict_scores_applies_scale_and_pads():
    model = Model(w=[2.0, -2.0, 1.0], lam=1.0, scale_factor=2.0)
    X = sp.csr_matrix([[1.0, 1.0], [2.0, 0.0]])
    np.testing.assert_allclose(predict_scores(model, X), [0.0, 2.0])
    wide = sp.csr_matrix([[0.0, 0.0, 2.0, 9.0]])
    np.testing.assert_allclose(predict_scores(model, wide), [1.0])
