"""Binary and one-vs-all linear classifiers plus text-format persistence.

Decision rule: sign(f(x)) with sign(0) mapped to +1 (deterministic, matching
the one-vs-all tie rule of picking the first class in the catalog). Raw
features are standardized with the statistics stored at training time before
the affine map is applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataio import (
    Dataset,
    StandardizationStats,
    fit_standardizer,
    labels_to_signs,
    transform_features,
)
from .errors import DegenerateDataError, ParseError, ShapeError
from .loss import Family, LossSpec
from .optim import LinearModel, Objective, SolveReport, SolverSettings, minimize

__all__ = [
    "BinaryClassifier",
    "OvaClassifier",
    "train_binary",
    "train_ova",
    "predict_margin",
    "predict_ova",
    "accuracy_percent",
    "save_model",
    "load_model",
]


@dataclass
class BinaryClassifier:
    model: LinearModel
    spec: LossSpec
    lam: float
    stats: StandardizationStats
    report: SolveReport | None = field(default=None, repr=False, compare=False)

    def margins(self, X) -> np.ndarray:
        return self.model.margins(transform_features(self.stats, np.asarray(X, float)))

    def predict(self, X) -> np.ndarray:
        """Signs of the margins, with 0 mapped to +1."""
        return np.where(self.margins(X) >= 0.0, 1.0, -1.0)


@dataclass
class OvaClassifier:
    catalog: tuple[str, ...]
    classifiers: list[BinaryClassifier]
    spec: LossSpec
    lam: float
    stats: StandardizationStats

    def margins_matrix(self, X) -> np.ndarray:
        Xs = transform_features(self.stats, np.asarray(X, float))
        return np.column_stack([c.model.margins(Xs) for c in self.classifiers])

    def predict(self, X) -> np.ndarray:
        m = self.margins_matrix(X)
        idx = np.argmax(m, axis=1)  # argmax takes the first maximum: lowest class index
        return np.array([self.catalog[i] for i in idx], dtype=object)


def _fit(X, y, spec, lam, settings: SolverSettings):
    obj = Objective(features=X, labels=y, spec=spec, lam=lam)
    return minimize(obj, tol=settings.tol, max_iter=settings.max_iter,
                    history=settings.history)


def train_binary(
    dataset: Dataset,
    spec: LossSpec,
    lam: float,
    settings: SolverSettings = SolverSettings(),
    stats: StandardizationStats | None = None,
) -> BinaryClassifier:
    """Train on a dataset whose labels are -1/+1 tokens."""
    y = labels_to_signs(dataset)
    if np.all(y == y[0]):
        raise DegenerateDataError(
            f"dataset {dataset.name!r} has a single class ({dataset.labels[0]!r})"
        )
    if stats is None:
        stats = fit_standardizer(dataset)
    X = transform_features(stats, dataset.features)
    model, report = _fit(X, y, spec, lam, settings)
    return BinaryClassifier(model=model, spec=spec, lam=lam, stats=stats, report=report)


def train_ova(
    dataset: Dataset,
    spec: LossSpec,
    lam: float,
    settings: SolverSettings = SolverSettings(),
    stats: StandardizationStats | None = None,
) -> OvaClassifier:
    """One binary problem per catalog class (class vs rest), shared lambda."""
    if dataset.n_classes < 2:
        raise DegenerateDataError(
            f"dataset {dataset.name!r} has {dataset.n_classes} class(es); need >= 2"
        )
    if stats is None:
        stats = fit_standardizer(dataset)
    X = transform_features(stats, dataset.features)
    classifiers = []
    for cls in dataset.catalog:
        y = np.where(dataset.labels == cls, 1.0, -1.0)
        if np.all(y == y[0]):
            raise DegenerateDataError(
                f"class {cls!r} yields a vacuous one-vs-rest problem"
            )
        model, report = _fit(X, y, spec, lam, settings)
        classifiers.append(
            BinaryClassifier(model=model, spec=spec, lam=lam, stats=stats, report=report)
        )
    return OvaClassifier(
        catalog=dataset.catalog, classifiers=classifiers, spec=spec, lam=lam, stats=stats
    )


def predict_margin(clf: BinaryClassifier, x) -> float:
    """f(x) for a single feature vector (standardized with stored stats)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeError(f"expected a single feature vector, got shape {x.shape}")
    return float(clf.margins(x[None, :])[0])


def predict_ova(clf: OvaClassifier, x) -> str:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeError(f"expected a single feature vector, got shape {x.shape}")
    return clf.predict(x[None, :])[0]


def accuracy_percent(clf, dataset: Dataset) -> float:
    """Label-match accuracy in percent, using each classifier's decision rule."""
    if isinstance(clf, OvaClassifier):
        pred = clf.predict(dataset.features)
        correct = sum(p == t for p, t in zip(pred, dataset.labels))
    else:
        y = labels_to_signs(dataset)
        correct = int(np.sum(clf.predict(dataset.features) == y))
    return 100.0 * correct / dataset.N


# ---------------------------------------------------------------------------
# Persistence: versioned, self-describing text format with exact round trips.
# ---------------------------------------------------------------------------

_MAGIC = "logitron-model v1"


def _vec_line(tag: str, v: np.ndarray) -> str:
    return tag + " " + " ".join(repr(float(x)) for x in v)


def save_model(clf, path) -> None:
    lines = [_MAGIC]
    spec, lam, stats = clf.spec, clf.lam, clf.stats
    n = stats.mean.shape[0]
    if isinstance(clf, OvaClassifier):
        lines.append("kind ova")
    else:
        lines.append("kind binary")
    lines.append(f"family {spec.family.value}")
    lines.append(f"alpha {repr(spec.alpha)}")
    lines.append(f"c {repr(spec.c)}")
    lines.append(f"lambda {repr(float(lam))}")
    lines.append(f"n_features {n}")
    if isinstance(clf, OvaClassifier):
        lines.append(f"n_classes {len(clf.catalog)}")
        for cls in clf.catalog:
            lines.append(f"class {cls}")
    lines.append(_vec_line("mean", stats.mean))
    lines.append(_vec_line("scale", stats.scale))
    if isinstance(clf, OvaClassifier):
        for sub in clf.classifiers:
            lines.append(_vec_line("w", sub.model.w))
            lines.append(f"b {repr(sub.model.b)}")
    else:
        lines.append(_vec_line("w", clf.model.w))
        lines.append(f"b {repr(clf.model.b)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class _Reader:
    def __init__(self, path):
        self.path = Path(path)
        if not self.path.exists():
            raise FileNotFoundError(f"model file not found: {path}")
        self.lines = self.path.read_text(encoding="utf-8").splitlines()
        self.pos = 0

    def take(self, tag: str) -> str:
        if self.pos >= len(self.lines):
            raise ParseError(f"{self.path}: unexpected end of model file (wanted {tag!r})")
        line = self.lines[self.pos]
        self.pos += 1
        if not line.startswith(tag + " ") and line != tag:
            raise ParseError(f"{self.path}: line {self.pos}: expected {tag!r}, got {line!r}")
        return line[len(tag) + 1 :]

    def take_vec(self, tag: str, n: int) -> np.ndarray:
        parts = self.take(tag).split()
        if len(parts) != n:
            raise ParseError(f"{self.path}: {tag!r} has {len(parts)} entries, expected {n}")
        return np.array([float(p) for p in parts])


def load_model(path):
    """Read a model file back into a BinaryClassifier or OvaClassifier."""
    r = _Reader(path)
    if r.pos >= len(r.lines) or r.lines[0] != _MAGIC:
        raise ParseError(f"{path}: not a logitron model file (missing {_MAGIC!r} header)")
    r.pos = 1
    kind = r.take("kind")
    if kind not in ("binary", "ova"):
        raise ParseError(f"{path}: unknown model kind {kind!r}")
    family = Family(r.take("family"))
    alpha = float(r.take("alpha"))
    c = float(r.take("c"))
    lam = float(r.take("lambda"))
    n = int(r.take("n_features"))
    spec = LossSpec(family, alpha, c)
    if kind == "ova":
        k = int(r.take("n_classes"))
        catalog = tuple(r.take("class") for _ in range(k))
        stats = StandardizationStats(r.take_vec("mean", n), r.take_vec("scale", n))
        subs = []
        for _ in range(k):
            w = r.take_vec("w", n)
            b = float(r.take("b"))
            subs.append(
                BinaryClassifier(LinearModel(w, b), spec=spec, lam=lam, stats=stats)
            )
        return OvaClassifier(catalog=catalog, classifiers=subs, spec=spec, lam=lam, stats=stats)
    stats = StandardizationStats(r.take_vec("mean", n), r.take_vec("scale", n))
    w = r.take_vec("w", n)
    b = float(r.take("b"))
    return BinaryClassifier(LinearModel(w, b), spec=spec, lam=lam, stats=stats)
