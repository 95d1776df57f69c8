"""Multi-model, multi-dataset benchmark harness.

Protocol per (dataset, model, repetition): cross-validate on the training
side, refit on the full training side with the winning cell, score on the
held-out test side. Repetition r reuses the base seed plus r for both the
train/test split (when the task is given as one file plus a fraction) and
the CV fold shuffle. Reported accuracy is the mean over repetitions.

Summary statistics: per-model mean accuracy, Friedman mean ranks (rank 1 =
highest accuracy, ties share the average of their positional ranks,
computed only over datasets where every compared model succeeded), and
optional racc columns: accuracy minus a per-dataset reference accuracy.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .classifier import accuracy_percent, train_binary, train_ova
from .dataio import Dataset, split_train_test
from .errors import ConfigurationError, IncompleteTableError, LogitronError
from .modelsel import GridConfig, grid_search
from .optim import SolverSettings

__all__ = [
    "BenchTask",
    "ModelEntry",
    "BenchReport",
    "run_benchmark",
    "average_ranks",
    "friedman_mean_ranks",
    "racc",
    "load_reference_csv",
    "DESK_DWN_REFERENCE",
]

# Best-known reference accuracies (the per-dataset "virtual best" classifier)
# for the desk-scale subset; used as the default racc reference.
DESK_DWN_REFERENCE: dict[str, float] = {
    "acute-inflammation": 100.00,
    "acute-nephritis": 100.00,
    "breast-cancer-wisc": 97.40,
    "breast-cancer-wisc-diag": 98.20,
    "heart-hungarian": 86.60,
    "hill-valley": 74.30,
    "iris": 99.30,
    "seeds": 97.20,
    "wine": 100.00,
}


@dataclass
class BenchTask:
    """One dataset: either a fixed (train, test) pair or a file to be split."""

    name: str
    full: Dataset | None = None
    train: Dataset | None = None
    test: Dataset | None = None
    fraction: float = 0.5

    def __post_init__(self):
        fixed = self.train is not None and self.test is not None
        if fixed == (self.full is not None):
            raise ConfigurationError(
                f"task {self.name!r}: give either full+fraction or train+test"
            )

    def resolve(self, seed: int) -> tuple[Dataset, Dataset]:
        if self.full is None:
            return self.train, self.test
        return split_train_test(self.full, fraction=self.fraction, seed=seed)


@dataclass
class ModelEntry:
    """A named submodel: its CV grid (seed is overridden per repetition)."""

    name: str
    grid: GridConfig


def _fit_and_score(train: Dataset, test: Dataset, grid: GridConfig,
                   settings: SolverSettings, jobs: int) -> float:
    cv = grid_search(train, grid, settings=settings, jobs=jobs)
    binary = train.n_classes == 2 and all(
        tok in ("-1", "+1", "1", "-1.0", "1.0", "+1.0") for tok in train.catalog
    )
    if binary:
        clf = train_binary(train, cv.best_spec, cv.best_lambda, settings)
    else:
        clf = train_ova(train, cv.best_spec, cv.best_lambda, settings)
    return accuracy_percent(clf, test)


@dataclass
class BenchReport:
    dataset_names: list[str]
    model_names: list[str]
    accuracy: dict[tuple[str, str], float]              # (dataset, model) -> mean %
    rep_accuracy: dict[tuple[str, str, int], float]     # (dataset, model, rep) -> %
    mean_accuracy: dict[str, float]
    mean_ranks: dict[str, float]
    rank_datasets: list[str]                            # complete-case datasets
    racc: dict[tuple[str, str], float] = field(default_factory=dict)
    failures: list[tuple[str, str, int, str]] = field(default_factory=list)
    excluded: list[tuple[str, str]] = field(default_factory=list)

    def write_csv(self, path) -> None:
        """Long-form CSV: section,dataset,model,value."""
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["section", "dataset", "model", "value"])
            for ds in self.dataset_names:
                for m in self.model_names:
                    if (ds, m) in self.accuracy:
                        w.writerow(["accuracy", ds, m, repr(self.accuracy[(ds, m)])])
            for (ds, m), v in sorted(self.racc.items()):
                w.writerow(["racc", ds, m, repr(v)])
            for m in self.model_names:
                if m in self.mean_accuracy:
                    w.writerow(["mean_accuracy", "", m, repr(self.mean_accuracy[m])])
            for m in self.model_names:
                if m in self.mean_ranks:
                    w.writerow(["friedman_rank", "", m, repr(self.mean_ranks[m])])
            for ds, m, rep, msg in self.failures:
                w.writerow(["failure", ds, m, f"rep {rep}: {msg}"])

    def format_text(self) -> str:
        """Aligned table: datasets x models, plus summary and racc rows."""
        cols = ["dataset"] + self.model_names
        rows = []
        for ds in self.dataset_names:
            row = [ds]
            for m in self.model_names:
                v = self.accuracy.get((ds, m))
                row.append("--" if v is None else f"{v:.2f}")
            rows.append(row)
            if self.racc:
                rrow = [f"  racc({ds})"]
                for m in self.model_names:
                    v = self.racc.get((ds, m))
                    rrow.append("--" if v is None else f"{v:+.2f}")
                rows.append(rrow)
        rows.append(["<mean acc>"] + [
            f"{self.mean_accuracy[m]:.2f}" if m in self.mean_accuracy else "--"
            for m in self.model_names
        ])
        rows.append(["<friedman rank>"] + [
            f"{self.mean_ranks[m]:.2f}" if m in self.mean_ranks else "--"
            for m in self.model_names
        ])
        widths = [max(len(r[i]) for r in [cols] + rows) for i in range(len(cols))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
        for r in rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
        if self.excluded:
            lines.append("")
            lines.append("excluded (failures): " + ", ".join(
                f"{ds}/{m}" for ds, m in self.excluded
            ))
        return "\n".join(lines) + "\n"


def run_benchmark(
    tasks: list[BenchTask],
    models: list[ModelEntry],
    repetitions: int = 5,
    seed: int = 0,
    settings: SolverSettings = SolverSettings(),
    jobs: int = 1,
    reference: dict[str, float] | None = None,
    warn=lambda msg: print(f"warning: {msg}", file=sys.stderr),
) -> BenchReport:
    if not tasks or not models:
        raise ConfigurationError("need at least one dataset and one model")
    if repetitions < 1:
        raise ConfigurationError(f"repetitions must be >= 1, got {repetitions}")
    rep_acc: dict[tuple[str, str, int], float] = {}
    failures: list[tuple[str, str, int, str]] = []
    failed_pairs: set[tuple[str, str]] = set()
    for rep in range(repetitions):
        rep_seed = seed + rep
        for task in tasks:
            try:
                train, test = task.resolve(rep_seed)
            except LogitronError as exc:
                for entry in models:
                    failures.append((task.name, entry.name, rep, str(exc)))
                    failed_pairs.add((task.name, entry.name))
                warn(f"dataset {task.name!r} rep {rep}: {exc}")
                continue
            for entry in models:
                if (task.name, entry.name) in failed_pairs:
                    continue
                grid = replace(entry.grid, seed=rep_seed)
                try:
                    rep_acc[(task.name, entry.name, rep)] = _fit_and_score(
                        train, test, grid, settings, jobs
                    )
                except LogitronError as exc:
                    failures.append((task.name, entry.name, rep, str(exc)))
                    failed_pairs.add((task.name, entry.name))
                    warn(f"{task.name}/{entry.name} rep {rep} failed: {exc}")

    dataset_names = [t.name for t in tasks]
    model_names = [m.name for m in models]
    accuracy = {}
    for ds in dataset_names:
        for m in model_names:
            if (ds, m) in failed_pairs:
                continue
            vals = [rep_acc[(ds, m, r)] for r in range(repetitions)]
            accuracy[(ds, m)] = float(np.mean(vals))

    mean_accuracy = {}
    for m in model_names:
        vals = [accuracy[(ds, m)] for ds in dataset_names if (ds, m) in accuracy]
        if vals:
            mean_accuracy[m] = float(np.mean(vals))

    rank_datasets = [
        ds for ds in dataset_names
        if all((ds, m) in accuracy for m in model_names)
    ]
    mean_ranks = {}
    if rank_datasets:
        table = {ds: {m: accuracy[(ds, m)] for m in model_names} for ds in rank_datasets}
        mean_ranks = friedman_mean_ranks(table, model_names)

    racc_table = {}
    if reference is not None:
        covered = {ds: {m: accuracy[(ds, m)] for m in model_names if (ds, m) in accuracy}
                   for ds in dataset_names}
        racc_table = racc(covered, reference)

    return BenchReport(
        dataset_names=dataset_names,
        model_names=model_names,
        accuracy=accuracy,
        rep_accuracy=rep_acc,
        mean_accuracy=mean_accuracy,
        mean_ranks=mean_ranks,
        rank_datasets=rank_datasets,
        racc=racc_table,
        failures=failures,
        excluded=sorted(failed_pairs),
    )


def average_ranks(values) -> list[float]:
    """Descending ranks with tied entries sharing the average positional rank."""
    vals = [float(v) for v in values]
    order = sorted(range(len(vals)), key=lambda i: (-vals[i], i))
    ranks = [0.0] * len(vals)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and vals[order[j + 1]] == vals[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def friedman_mean_ranks(
    table: dict[str, dict[str, float]], models: list[str]
) -> dict[str, float]:
    """Column means of per-dataset descending ranks; the table must be complete."""
    gaps = [
        (ds, m) for ds, row in table.items() for m in models if m not in row
    ]
    if gaps:
        raise IncompleteTableError(
            "accuracy table is missing cells: "
            + ", ".join(f"{ds}/{m}" for ds, m in gaps)
        )
    if not table:
        raise IncompleteTableError("accuracy table has no datasets")
    sums = {m: 0.0 for m in models}
    for ds in table:
        row_ranks = average_ranks([table[ds][m] for m in models])
        for m, r in zip(models, row_ranks):
            sums[m] += r
    return {m: sums[m] / len(table) for m in models}


def racc(
    table: dict[str, dict[str, float]], reference: dict[str, float]
) -> dict[tuple[str, str], float]:
    """accuracy minus the per-dataset reference accuracy, in percentage points."""
    out = {}
    for ds, row in table.items():
        if ds not in reference:
            raise IncompleteTableError(f"reference table has no row for dataset {ds!r}")
        for m, acc in row.items():
            out[(ds, m)] = acc - reference[ds]
    return out


def load_reference_csv(path) -> dict[str, float]:
    """Two-column CSV (dataset name, accuracy); a header row is skipped if present."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"reference table not found: {path}")
    out = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) < 2:
                raise IncompleteTableError(f"{path}: line {i}: need name,accuracy")
            try:
                out[row[0].strip()] = float(row[1])
            except ValueError:
                if i == 1:
                    continue  # header
                raise IncompleteTableError(
                    f"{path}: line {i}: bad accuracy value {row[1]!r}"
                )
    return out
