"""Binary/OVA training, decision rules, symmetries, persistence."""

import numpy as np
import pytest

from conftest import make_blobs_dataset
from logitron.classifier import (
    BinaryClassifier,
    OvaClassifier,
    accuracy_percent,
    load_model,
    predict_margin,
    predict_ova,
    save_model,
    train_binary,
    train_ova,
)
from logitron.dataio import Dataset, StandardizationStats, apply_standardizer
from logitron.errors import DegenerateDataError, ParseError, ShapeError
from logitron.loss import Family, resolve_spec
from logitron.optim import LinearModel, Objective, objective_eval

SPEC_H2 = resolve_spec(Family.H_MINUS, 0.5, -1.0)
SPEC_LOG = resolve_spec(Family.LOGISTIC_ONE, 1.0, 1.0)


def brute_force_separates(ds, lim=8.0, steps=41):
    """Oracle: some (w, b) on a coarse grid classifies every row correctly."""
    y = np.array([float(t) for t in ds.labels])
    for w0 in np.linspace(-lim, lim, steps):
        for w1 in np.linspace(-lim, lim, steps):
            for b in np.linspace(-lim, lim, steps):
                m = ds.features @ np.array([w0, w1]) + b
                if np.all(np.where(m >= 0, 1.0, -1.0) == y):
                    return True
    return False


# ---------------------------------------------------------------------------
# Binary
# ---------------------------------------------------------------------------


def test_train_binary_separable_reaches_full_accuracy(separable_binary):
    assert brute_force_separates(separable_binary)
    for spec in (SPEC_H2, SPEC_LOG, resolve_spec(Family.H_PLUS, 2.0, 1.0)):
        clf = train_binary(separable_binary, spec, lam=2.0 ** -14)
        assert accuracy_percent(clf, separable_binary) == 100.0


def test_train_binary_single_class_degenerate():
    ds = Dataset(
        "one", np.random.default_rng(0).standard_normal((5, 2)),
        np.array(["+1"] * 5, dtype=object), ("+1",),
    )
    with pytest.raises(DegenerateDataError):
        train_binary(ds, SPEC_LOG, 0.1)


def test_predict_margin_examples():
    stats = StandardizationStats.identity(2)
    clf = BinaryClassifier(LinearModel(np.zeros(2), 0.5), SPEC_LOG, 0.0, stats)
    assert predict_margin(clf, np.array([9.0, -3.0])) == 0.5
    clf = BinaryClassifier(LinearModel(np.array([1.0, -1.0]), 0.0), SPEC_LOG, 0.0, stats)
    assert predict_margin(clf, np.array([2.0, 2.0])) == 0.0
    assert clf.predict(np.array([[2.0, 2.0]]))[0] == 1.0  # sign(0) -> +1
    clf1 = BinaryClassifier(
        LinearModel(np.array([3.0]), -1.0), SPEC_LOG, 0.0, StandardizationStats.identity(1)
    )
    assert predict_margin(clf1, np.array([1.0])) == 2.0
    with pytest.raises(ShapeError):
        predict_margin(clf1, np.array([1.0, 2.0]))


def test_label_flip_symmetry(separable_binary):
    flipped = Dataset(
        separable_binary.name,
        separable_binary.features.copy(),
        np.array(["+1" if l == "-1" else "-1" for l in separable_binary.labels],
                 dtype=object),
        ("+1", "-1"),
    )
    a = train_binary(separable_binary, SPEC_H2, 0.01)
    b = train_binary(flipped, SPEC_H2, 0.01)
    # objective value is invariant under (y, w, b) -> (-y, -w, -b)
    y = np.array([float(t) for t in separable_binary.labels])
    Xs = (separable_binary.features - a.stats.mean) / a.stats.scale
    va, _, _ = objective_eval(Objective(Xs, y, SPEC_H2, 0.01), a.model)
    vb, _, _ = objective_eval(
        Objective(Xs, -y, SPEC_H2, 0.01),
        LinearModel(-a.model.w, -a.model.b),
    )
    assert va == vb
    assert accuracy_percent(a, separable_binary) == accuracy_percent(b, flipped)


def test_determinism(separable_binary):
    c1 = train_binary(separable_binary, SPEC_H2, 0.25)
    c2 = train_binary(separable_binary, SPEC_H2, 0.25)
    np.testing.assert_array_equal(c1.model.w, c2.model.w)
    assert c1.model.b == c2.model.b


def test_standardization_consistency(separable_binary):
    clf = train_binary(separable_binary, SPEC_LOG, 0.5)
    pre = apply_standardizer(clf.stats, separable_binary)
    clf_id = BinaryClassifier(
        clf.model, clf.spec, clf.lam, StandardizationStats.identity(separable_binary.n)
    )
    np.testing.assert_array_equal(
        clf.predict(separable_binary.features), clf_id.predict(pre.features)
    )


# ---------------------------------------------------------------------------
# One-vs-all
# ---------------------------------------------------------------------------


def _three_class_units():
    feats = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] * 4)
    labels = np.array(["a", "b", "c"] * 4, dtype=object)
    return Dataset("units", feats, labels, ("a", "b", "c"))


def test_train_ova_unit_vectors():
    ds = _three_class_units()
    clf = train_ova(ds, SPEC_LOG, 2.0 ** -10)
    pred = clf.predict(ds.features)
    np.testing.assert_array_equal(pred, ds.labels)
    assert predict_ova(clf, np.array([1.0, 0.0, 0.0])) == "a"


def test_ova_needs_two_classes():
    ds = Dataset("one", np.zeros((3, 1)), np.array(["x"] * 3, dtype=object), ("x",))
    with pytest.raises(DegenerateDataError):
        train_ova(ds, SPEC_LOG, 0.1)


def test_predict_ova_argmax_and_ties():
    stats = StandardizationStats.identity(1)
    spec = SPEC_LOG

    def fixed(margin):
        return BinaryClassifier(LinearModel(np.array([0.0]), margin), spec, 0.0, stats)

    clf = OvaClassifier(("c0", "c1", "c2"),
                        [fixed(0.3), fixed(0.9), fixed(-0.2)], spec, 0.0, stats)
    assert predict_ova(clf, np.array([0.0])) == "c1"
    tie = OvaClassifier(("c0", "c1", "c2"),
                        [fixed(0.4), fixed(0.4), fixed(0.4)], spec, 0.0, stats)
    assert predict_ova(tie, np.array([0.0])) == "c0"  # lowest catalog index


def test_ova_two_class_matches_binary_decision(separable_binary):
    rng = np.random.default_rng(5)
    held_out = rng.uniform(-3, 3, (40, 2))
    bin_clf = train_binary(separable_binary, SPEC_LOG, 0.1)
    ova_clf = train_ova(separable_binary, SPEC_LOG, 0.1)
    bin_pred = bin_clf.predict(held_out)
    ova_pred = ova_clf.predict(held_out)
    ova_signed = np.array([float(t) for t in ova_pred])
    margins = ova_clf.margins_matrix(held_out)
    untied = np.abs(margins[:, 0] - margins[:, 1]) > 1e-9
    np.testing.assert_array_equal(bin_pred[untied], ova_signed[untied])


def test_ova_symmetric_margins_match_sign_rule():
    # Relabeling the same binary problem as OVA yields f and (by symmetry) -f.
    ds = make_blobs_dataset("pm", 10, [[-1.5, 0.0], [1.5, 0.0]], 0.2, seed=3,
                            labels=["-1", "+1"])
    ova = train_ova(ds, SPEC_LOG, 0.1)
    m = ova.margins_matrix(ds.features)
    np.testing.assert_allclose(m[:, 0], -m[:, 1], atol=1e-12)


def test_iris_ova_train_accuracy(iris):
    clf = train_ova(iris, resolve_spec(Family.H_MINUS, 0.75, -1.0), 2.0 ** -8)
    assert accuracy_percent(clf, iris) > 90.0


def test_ova_determinism():
    ds = _three_class_units()
    a = train_ova(ds, SPEC_LOG, 0.25)
    b = train_ova(ds, SPEC_LOG, 0.25)
    for s1, s2 in zip(a.classifiers, b.classifiers):
        np.testing.assert_array_equal(s1.model.w, s2.model.w)
        assert s1.model.b == s2.model.b
    np.testing.assert_array_equal(a.predict(ds.features), b.predict(ds.features))


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def test_binary_model_round_trip(tmp_path, separable_binary):
    clf = train_binary(separable_binary, SPEC_H2, 2.0 ** -5)
    p = tmp_path / "m.txt"
    save_model(clf, p)
    back = load_model(p)
    assert isinstance(back, BinaryClassifier)
    assert back.spec == clf.spec and back.lam == clf.lam
    np.testing.assert_array_equal(back.model.w, clf.model.w)
    assert back.model.b == clf.model.b
    np.testing.assert_array_equal(back.stats.mean, clf.stats.mean)
    np.testing.assert_array_equal(back.stats.scale, clf.stats.scale)
    np.testing.assert_array_equal(
        back.predict(separable_binary.features), clf.predict(separable_binary.features)
    )


def test_ova_model_round_trip(tmp_path):
    ds = _three_class_units()
    clf = train_ova(ds, resolve_spec(Family.H_PLUS, 1.5, 0.8), 0.125)
    p = tmp_path / "ova.txt"
    save_model(clf, p)
    back = load_model(p)
    assert isinstance(back, OvaClassifier)
    assert back.catalog == clf.catalog
    for s1, s2 in zip(back.classifiers, clf.classifiers):
        np.testing.assert_array_equal(s1.model.w, s2.model.w)
        assert s1.model.b == s2.model.b
    np.testing.assert_array_equal(back.predict(ds.features), clf.predict(ds.features))


def test_model_file_rejects_garbage(tmp_path):
    p = tmp_path / "junk.txt"
    p.write_text("not a model\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_model(p)
    with pytest.raises(FileNotFoundError):
        load_model(tmp_path / "absent.txt")
