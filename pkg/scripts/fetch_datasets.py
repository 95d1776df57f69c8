#!/usr/bin/env python3
"""Materialize the desk-scale benchmark datasets as CSVs under data/.

iris and wine ship with scikit-learn and are written without any network
access. The remaining four (seeds, acute-inflammation, heart-hungarian,
breast-cancer-wisc) are downloaded from the UCI archive and normalized to
the corpus layout: numeric feature columns, one label column named 'label'
last, header row included.

Preprocessing choices (documented so runs are reproducible):
  seeds                whitespace-delimited source, 7 features, class 1..3.
  acute-inflammation   UTF-16 source with decimal commas; temperature stays
                       numeric, the five yes/no symptoms map to 1/0, the
                       label is the first decision column (bladder
                       inflammation).
  heart-hungarian      processed 13-attribute file; the 'ca' column
                       (almost entirely missing) is dropped for 12 features,
                       remaining '?' cells take the column mean, the label
                       is num > 0.
  breast-cancer-wisc   original 9-feature file; the id column is dropped,
                       '?' cells take the column mean, labels are 2/4.

Usage: python scripts/fetch_datasets.py [--dest data/] [--only name ...]
"""

import argparse
import sys
import urllib.request
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

URLS = {
    "seeds": f"{UCI}/00236/seeds_dataset.txt",
    "acute-inflammation": f"{UCI}/acute/diagnosis.data",
    "heart-hungarian": f"{UCI}/heart-disease/processed.hungarian.data",
    "breast-cancer-wisc": f"{UCI}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
}


def _write(dest: Path, name: str, rows, n_features: int) -> Path:
    path = dest / f"{name}.csv"
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join([f"f{j}" for j in range(n_features)] + ["label"]) + "\n")
        for feats, label in rows:
            fh.write(",".join(repr(float(v)) for v in feats) + f",{label}\n")
    print(f"wrote {path} ({len(rows)} rows, {n_features} features)")
    return path


def write_sklearn(dest: Path, name: str) -> Path:
    from sklearn.datasets import load_iris, load_wine

    bunch = load_iris() if name == "iris" else load_wine()
    rows = [(x, str(int(y))) for x, y in zip(bunch.data, bunch.target)]
    return _write(dest, name, rows, bunch.data.shape[1])


def _fetch(url: str) -> bytes:
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def _mean_impute(rows):
    """Replace None cells by column means in place."""
    n = len(rows[0][0])
    for j in range(n):
        vals = [r[0][j] for r in rows if r[0][j] is not None]
        if not vals:
            raise RuntimeError(f"column {j} has no numeric values")
        mean = sum(vals) / len(vals)
        for feats, _ in rows:
            if feats[j] is None:
                feats[j] = mean
    return rows


def write_seeds(dest: Path) -> Path:
    raw = _fetch(URLS["seeds"]).decode("utf-8")
    rows = []
    for line in raw.splitlines():
        parts = line.split()
        if not parts:
            continue
        *feats, label = parts
        rows.append(([float(v) for v in feats], str(int(float(label)))))
    return _write(dest, "seeds", rows, 7)


def write_acute_inflammation(dest: Path) -> Path:
    raw = _fetch(URLS["acute-inflammation"])
    try:
        text = raw.decode("utf-16")
    except UnicodeDecodeError:
        text = raw.decode("latin-1")
    rows = []
    for line in text.splitlines():
        parts = line.replace(",", ".").split()
        if len(parts) != 8:
            continue
        temp = float(parts[0])
        symptoms = [1.0 if p.lower() == "yes" else 0.0 for p in parts[1:6]]
        label = "1" if parts[6].lower() == "yes" else "0"  # bladder inflammation
        rows.append(([temp] + symptoms, label))
    if len(rows) != 120:
        print(f"warning: expected 120 rows, parsed {len(rows)}", file=sys.stderr)
    return _write(dest, "acute-inflammation", rows, 6)


def write_heart_hungarian(dest: Path) -> Path:
    raw = _fetch(URLS["heart-hungarian"]).decode("utf-8")
    drop = 11  # 'ca' attribute: missing in almost every Hungarian record
    rows = []
    for line in raw.splitlines():
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 14:
            continue
        feats = [None if p == "?" else float(p) for j, p in enumerate(parts[:13]) if j != drop]
        label = "1" if float(parts[13]) > 0 else "0"
        rows.append((feats, label))
    _mean_impute(rows)
    return _write(dest, "heart-hungarian", rows, 12)


def write_breast_cancer_wisc(dest: Path) -> Path:
    raw = _fetch(URLS["breast-cancer-wisc"]).decode("utf-8")
    rows = []
    for line in raw.splitlines():
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 11:
            continue
        feats = [None if p == "?" else float(p) for p in parts[1:10]]
        rows.append((feats, parts[10]))
    _mean_impute(rows)
    return _write(dest, "breast-cancer-wisc", rows, 9)


WRITERS = {
    "iris": write_sklearn,
    "wine": write_sklearn,
    "seeds": lambda dest: write_seeds(dest),
    "acute-inflammation": lambda dest: write_acute_inflammation(dest),
    "heart-hungarian": lambda dest: write_heart_hungarian(dest),
    "breast-cancer-wisc": lambda dest: write_breast_cancer_wisc(dest),
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dest", default="data", help="output directory (default data/)")
    ap.add_argument("--only", nargs="*", choices=sorted(WRITERS), default=None)
    args = ap.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    names = args.only if args.only else list(WRITERS)
    failed = []
    for name in names:
        try:
            if name in ("iris", "wine"):
                write_sklearn(dest, name)
            else:
                WRITERS[name](dest)
        except Exception as exc:  # noqa: BLE001 - report and continue
            failed.append(name)
            print(f"could not fetch {name}: {exc}", file=sys.stderr)
    if failed:
        print(
            "missing datasets need network access to archive.ics.uci.edu: "
            + ", ".join(failed),
            file=sys.stderr,
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
