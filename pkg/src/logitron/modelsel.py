"""k-fold cross-validated grid search over the nine submodel parameter spaces.

Submodel grids (margins are c_alpha values for hinge families, c for the
logistic families; lambda runs over 2^d, d = -14..5 by default):

    H-1: alpha in {1/5, 2/5, 3/5, 4/5},      c_alpha = -1
    H-2: alpha = 1/2,   c_alpha in {-1, -4/5, -3/5, -2/5}
    H-3: alpha = 2/3,   same margins
    H-4: alpha = 3/4,   same margins
    H+1: alpha in {6/5, 7/5, 8/5, 9/5},      c_alpha = 1
    H+2: alpha = 2,     c_alpha in {1, 4/5, 3/5, 2/5}
    H+3: alpha = 3/2,   same margins
    L-:  alpha in {4/5, 5/6, 7/8, 11/12},    c = 1
    L+:  alpha in {4/3, 5/4, 8/7, 13/12},    c = 1

plus two fixed baselines trained by the same solver: hinge0 (alpha = 0,
c_alpha = -1, the first-order hinge) and logistic (alpha = 1).

Standardization is refit inside every fold on the training folds only, so
validation rows can never leak into the statistics. Ties in mean CV accuracy
resolve to the smaller lambda first and then to the earlier grid position.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataio import Dataset, fit_standardizer, transform_features
from .errors import ConfigurationError, LogitronError, SearchFailure
from .loss import Family, LossSpec, resolve_spec
from .optim import Objective, SolverSettings, minimize

__all__ = [
    "LAMBDA_EXPONENTS_DEFAULT",
    "TABLE_GRIDS",
    "GridConfig",
    "CVCell",
    "CVResult",
    "submodel_grid",
    "all_grid_specs",
    "kfold_split",
    "stratified_kfold_split",
    "grid_search",
    "prepare_folds",
]

LAMBDA_EXPONENTS_DEFAULT: tuple[int, ...] = tuple(range(-14, 6))

_H_MARGINS_MINUS = (-1.0, -4.0 / 5.0, -3.0 / 5.0, -2.0 / 5.0)
_H_MARGINS_PLUS = (1.0, 4.0 / 5.0, 3.0 / 5.0, 2.0 / 5.0)

TABLE_GRIDS: dict[str, tuple[Family, tuple[float, ...], tuple[float, ...]]] = {
    "H-1": (Family.H_MINUS, (1 / 5, 2 / 5, 3 / 5, 4 / 5), (-1.0,)),
    "H-2": (Family.H_MINUS, (1 / 2,), _H_MARGINS_MINUS),
    "H-3": (Family.H_MINUS, (2 / 3,), _H_MARGINS_MINUS),
    "H-4": (Family.H_MINUS, (3 / 4,), _H_MARGINS_MINUS),
    "H+1": (Family.H_PLUS, (6 / 5, 7 / 5, 8 / 5, 9 / 5), (1.0,)),
    "H+2": (Family.H_PLUS, (2.0,), _H_MARGINS_PLUS),
    "H+3": (Family.H_PLUS, (3 / 2,), _H_MARGINS_PLUS),
    "L-": (Family.L_MINUS, (4 / 5, 5 / 6, 7 / 8, 11 / 12), (1.0,)),
    "L+": (Family.L_PLUS, (4 / 3, 5 / 4, 8 / 7, 13 / 12), (1.0,)),
    "hinge0": (Family.HINGE_ZERO, (0.0,), (-1.0,)),
    "logistic": (Family.LOGISTIC_ONE, (1.0,), (1.0,)),
}

SUBMODEL_TAGS = tuple(t for t in TABLE_GRIDS if t not in ("hinge0", "logistic"))


@dataclass(frozen=True)
class GridConfig:
    family: Family
    alphas: tuple[float, ...]
    margins: tuple[float, ...]
    lambda_exponents: tuple[int, ...] = LAMBDA_EXPONENTS_DEFAULT
    folds: int = 4
    seed: int = 0
    stratified: bool = False

    def __post_init__(self):
        if not self.alphas or not self.margins or not self.lambda_exponents:
            raise ConfigurationError("grid axes must be nonempty")
        if self.folds < 2:
            raise ConfigurationError(f"folds must be >= 2, got {self.folds}")


def submodel_grid(tag: str, lambda_exponents=None, folds: int = 4, seed: int = 0,
                  stratified: bool = False) -> GridConfig:
    """GridConfig for one of the named submodels (or the two baselines)."""
    if tag not in TABLE_GRIDS:
        raise ConfigurationError(
            f"unknown submodel {tag!r}; choose from {', '.join(TABLE_GRIDS)}"
        )
    family, alphas, margins = TABLE_GRIDS[tag]
    return GridConfig(
        family=family,
        alphas=alphas,
        margins=margins,
        lambda_exponents=tuple(lambda_exponents) if lambda_exponents is not None
        else LAMBDA_EXPONENTS_DEFAULT,
        folds=folds,
        seed=seed,
        stratified=stratified,
    )


def all_grid_specs(include_baselines: bool = False) -> list[LossSpec]:
    """Every (alpha, margin) combination of the nine submodels as a LossSpec."""
    out = []
    for tag, (family, alphas, margins) in TABLE_GRIDS.items():
        if not include_baselines and tag in ("hinge0", "logistic"):
            continue
        for a in alphas:
            for m in margins:
                out.append(resolve_spec(family, a, m))
    return out


@dataclass(frozen=True)
class CVCell:
    index: int
    alpha: float
    margin: float
    lam: float


@dataclass
class CVResult:
    best_spec: LossSpec
    best_lambda: float
    best_index: int
    cells: list[CVCell]
    fold_acc: np.ndarray      # (n_cells, folds) percent; NaN rows for failed cells
    mean_acc: np.ndarray      # (n_cells,) percent; NaN for failed cells
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def best_mean_accuracy(self) -> float:
        return float(self.mean_acc[self.best_index])

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            folds = self.fold_acc.shape[1]
            w.writerow(
                ["index", "alpha", "margin", "lambda"]
                + [f"acc_fold_{i}" for i in range(folds)]
                + ["mean_acc", "status"]
            )
            fail = dict(self.failures)
            for cell in self.cells:
                accs = self.fold_acc[cell.index]
                status = fail.get(cell.index, "ok")
                w.writerow(
                    [cell.index, repr(cell.alpha), repr(cell.margin), repr(cell.lam)]
                    + [("" if np.isnan(a) else repr(float(a))) for a in accs]
                    + [("" if np.isnan(self.mean_acc[cell.index])
                        else repr(float(self.mean_acc[cell.index]))), status]
                )


def kfold_split(N: int, k: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle cut into k contiguous blocks with sizes differing by <= 1."""
    if k < 2:
        raise ConfigurationError(f"k must be >= 2, got {k}")
    if N < k:
        raise ConfigurationError(f"cannot make {k} folds out of {N} rows")
    perm = np.random.default_rng(seed).permutation(N)
    base, extra = divmod(N, k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(np.sort(perm[start:start + size]))
        start += size
    return folds


def stratified_kfold_split(labels, k: int, seed: int) -> list[np.ndarray]:
    """Per-class shuffles dealt round-robin; off by default in grid_search."""
    labels = np.asarray(labels, dtype=object)
    N = labels.shape[0]
    if k < 2:
        raise ConfigurationError(f"k must be >= 2, got {k}")
    if N < k:
        raise ConfigurationError(f"cannot make {k} folds out of {N} rows")
    rng = np.random.default_rng(seed)
    buckets: list[list[int]] = [[] for _ in range(k)]
    pos = 0
    for cls in dict.fromkeys(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        for i in idx:
            buckets[pos % k].append(int(i))
            pos += 1
    return [np.sort(np.array(b, dtype=int)) for b in buckets]


@dataclass
class FoldData:
    """Per-fold training/validation arrays with fold-local standardization."""

    stats_mean: np.ndarray
    stats_scale: np.ndarray
    X_train: np.ndarray      # standardized with the fold's own stats
    labels_train: np.ndarray
    X_val: np.ndarray        # standardized with the *training* folds' stats
    labels_val: np.ndarray


def prepare_folds(dataset: Dataset, folds: list[np.ndarray]) -> list[FoldData]:
    """For each fold: fit stats on the other folds, standardize both sides."""
    out = []
    all_idx = np.arange(dataset.N)
    for val_idx in folds:
        mask = np.ones(dataset.N, dtype=bool)
        mask[val_idx] = False
        tr_idx = all_idx[mask]
        stats = fit_standardizer(dataset.features[tr_idx])
        out.append(
            FoldData(
                stats_mean=stats.mean,
                stats_scale=stats.scale,
                X_train=transform_features(stats, dataset.features[tr_idx]),
                labels_train=dataset.labels[tr_idx],
                X_val=transform_features(stats, dataset.features[val_idx]),
                labels_val=dataset.labels[val_idx],
            )
        )
    return out


def _sign_map(catalog) -> dict | None:
    """token -> +-1 map when the catalog is exactly a {-1,+1} pair, else None."""
    vals = {}
    for tok in catalog:
        try:
            v = float(tok)
        except ValueError:
            return None
        if v not in (-1.0, 1.0):
            return None
        vals[tok] = v
    return vals if len(vals) == 2 else None


def _cell_accuracy(fold: FoldData, catalog, spec: LossSpec, lam: float,
                   settings: SolverSettings) -> float:
    """Validation accuracy (percent) of one (cell, fold) training run."""
    signs = _sign_map(catalog)
    if signs is not None:
        y = np.array([signs[t] for t in fold.labels_train])
        model, _ = minimize(
            Objective(fold.X_train, y, spec, lam),
            tol=settings.tol, max_iter=settings.max_iter, history=settings.history,
        )
        pred = np.where(model.margins(fold.X_val) >= 0.0, 1.0, -1.0)
        truth = np.array([signs[t] for t in fold.labels_val])
        return 100.0 * float(np.mean(pred == truth))
    margins = np.empty((fold.X_val.shape[0], len(catalog)))
    for j, cls in enumerate(catalog):
        y = np.where(fold.labels_train == cls, 1.0, -1.0)
        model, _ = minimize(
            Objective(fold.X_train, y, spec, lam),
            tol=settings.tol, max_iter=settings.max_iter, history=settings.history,
        )
        margins[:, j] = model.margins(fold.X_val)
    pred = np.asarray(catalog, dtype=object)[np.argmax(margins, axis=1)]
    return 100.0 * float(np.mean(pred == fold.labels_val))


def _iter_cells(cfg: GridConfig) -> list[CVCell]:
    cells = []
    i = 0
    for a in cfg.alphas:
        for m in cfg.margins:
            for d in cfg.lambda_exponents:
                cells.append(CVCell(index=i, alpha=a, margin=m, lam=2.0 ** d))
                i += 1
    return cells


# Worker-side context for process pools (set once per worker via initializer).
_GRID_CTX = None


def _grid_init(ctx):
    global _GRID_CTX
    _GRID_CTX = ctx


def _grid_eval(index: int):
    return _eval_cell(_GRID_CTX, index)


def _eval_cell(ctx, index: int):
    folds, catalog, family, cells, settings = ctx
    cell = cells[index]
    try:
        spec = resolve_spec(family, cell.alpha, cell.margin)
        accs = [
            _cell_accuracy(fold, catalog, spec, cell.lam, settings) for fold in folds
        ]
        return index, accs, None
    except LogitronError as exc:
        return index, None, f"{type(exc).__name__}: {exc}"


def grid_search(
    dataset: Dataset,
    cfg: GridConfig,
    settings: SolverSettings = SolverSettings(),
    jobs: int = 1,
) -> CVResult:
    """Mean validation accuracy for every (alpha, margin, lambda) cell.

    Returns the maximizing cell; on ties the smaller lambda wins, then the
    earlier grid position. Cells whose training fails are excluded and
    reported; if every cell fails a SearchFailure is raised.
    """
    if dataset.n_classes < 2:
        raise SearchFailure(f"dataset {dataset.name!r} has fewer than two classes")
    if cfg.stratified:
        folds = stratified_kfold_split(dataset.labels, cfg.folds, cfg.seed)
    else:
        folds = kfold_split(dataset.N, cfg.folds, cfg.seed)
    fold_data = prepare_folds(dataset, folds)
    cells = _iter_cells(cfg)
    ctx = (fold_data, dataset.catalog, cfg.family, cells, settings)

    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_grid_init, initargs=(ctx,)
        ) as ex:
            raw = list(ex.map(_grid_eval, range(len(cells)),
                              chunksize=max(1, len(cells) // (4 * jobs))))
    else:
        raw = [_eval_cell(ctx, i) for i in range(len(cells))]

    fold_acc = np.full((len(cells), cfg.folds), np.nan)
    failures = []
    for index, accs, err in raw:  # raw arrives in grid order
        if err is None:
            fold_acc[index] = accs
        else:
            failures.append((index, err))
    mean_acc = fold_acc.mean(axis=1)

    best = None
    for cell in cells:
        m = mean_acc[cell.index]
        if np.isnan(m):
            continue
        key = (-m, cell.lam, cell.index)
        if best is None or key < best[0]:
            best = (key, cell)
    if best is None:
        raise SearchFailure(
            f"all {len(cells)} grid cells failed for dataset {dataset.name!r}"
        )
    cell = best[1]
    return CVResult(
        best_spec=resolve_spec(cfg.family, cell.alpha, cell.margin),
        best_lambda=cell.lam,
        best_index=cell.index,
        cells=cells,
        fold_acc=fold_acc,
        mean_acc=mean_acc,
        failures=failures,
    )
