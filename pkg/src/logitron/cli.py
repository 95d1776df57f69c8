"""Command line interface: train, predict, bench, losscurve.

Every command is deterministic given --seed (env LOGITRON_SEED is the
fallback, then 0). Exit codes: 0 success; 2 usage/config errors and missing
files; 3 data/parameter errors; 4 numerical failures.

A config file (--config, key=value lines, '#' comments) can pre-set any long
flag of the chosen command; explicit flags win on conflict. List-valued keys
(e.g. data, curve) take comma-separated values.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import dataio, modelsel
from .classifier import (
    OvaClassifier,
    accuracy_percent,
    load_model,
    save_model,
    train_binary,
    train_ova,
)
from .errors import (
    ConfigurationError,
    LogitronError,
    NumericalFailure,
)
from .loss import (
    Family,
    hinge_q,
    logitron_grad,
    logitron_value,
    resolve_spec,
)
from .optim import SolverSettings

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _fraction(text: str) -> float:
    """Parse '3/4', '-4/5', '0.75' alike."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}")


def _default_seed() -> int:
    env = os.environ.get("LOGITRON_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigurationError(f"LOGITRON_SEED must be an integer, got {env!r}")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file mirroring the flags; flags win")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: $LOGITRON_SEED or 0)")


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--folds", type=int, default=4, help="CV folds (default 4)")
    p.add_argument("--lambda-exp-min", type=int, default=-14,
                   help="smallest exponent d of the 2^d lambda grid (default -14)")
    p.add_argument("--lambda-exp-max", type=int, default=5,
                   help="largest exponent d of the 2^d lambda grid (default 5)")
    p.add_argument("--stratified", action="store_true",
                   help="stratify CV folds by class (plain shuffle by default)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for CV cells")
    p.add_argument("--tol", type=float, default=1e-6, help="solver gradient tolerance")
    p.add_argument("--max-iter", type=int, default=500, help="solver iteration cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logitron",
        description="Linear classifiers with the extended-logistic loss family",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    tags = list(modelsel.TABLE_GRIDS)

    t = sub.add_parser("train", help="train one submodel (direct parameters or CV)")
    t.add_argument("--data", required=True, help="training CSV")
    t.add_argument("--label-col", default="-1",
                   help="label column index or header name (default: last)")
    t.add_argument("--model", choices=tags, default=None,
                   help="submodel tag fixing the loss family")
    t.add_argument("--alpha", type=_fraction, default=None,
                   help="model parameter alpha (fraction ok), bypasses CV over alpha")
    t.add_argument("--margin", type=_fraction, default=None,
                   help="margin: c_alpha for hinge tags, c for logistic tags")
    t.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="regularization weight; with no --cv this trains directly")
    t.add_argument("--cv", action="store_true", help="4-fold CV over the tag's grid")
    t.add_argument("--cv-report", default=None, help="write the CV cell table here")
    t.add_argument("--impute", action="store_true",
                   help="impute non-numeric feature cells with column means")
    t.add_argument("--out", default="model.txt", help="model file (default model.txt)")
    _add_grid_flags(t)
    _add_common(t)

    p = sub.add_parser("predict", help="predict labels for a feature CSV")
    p.add_argument("--model-file", required=True)
    p.add_argument("--data", required=True, help="feature CSV (no label column)")
    p.add_argument("--out", default="predictions.csv")
    p.add_argument("--with-margins", action="store_true",
                   help="append margin column(s) to the output")
    _add_common(p)

    b = sub.add_parser("bench", help="CV + test-accuracy benchmark over datasets")
    b.add_argument("--data", action="append", required=True,
                   help="dataset CSV; repeat for several datasets")
    b.add_argument("--label-col", default="-1")
    b.add_argument("--models", default=",".join(modelsel.SUBMODEL_TAGS),
                   help="comma list of submodel tags (default: all nine)")
    b.add_argument("--reps", type=int, default=5, help="repetitions (default 5)")
    b.add_argument("--test-fraction", type=float, default=0.5,
                   help="per-repetition train fraction complement (default 0.5 split)")
    b.add_argument("--reference", default=None,
                   help="racc reference: CSV path or 'builtin' for the desk table")
    b.add_argument("--impute", action="store_true")
    b.add_argument("--out", default="bench", help="output stem: <out>.csv and <out>.txt")
    _add_grid_flags(b)
    _add_common(b)

    c = sub.add_parser("losscurve", help="sample loss curves to CSV")
    c.add_argument("--curve", action="append", required=True,
                   help="curve spec: TAG[:alpha=F,margin=F], 'perceptron', "
                        "'logistic', or 'hinge:q=N'; repeatable")
    c.add_argument("--zmin", type=float, default=-5.0)
    c.add_argument("--zmax", type=float, default=5.0)
    c.add_argument("--points", type=int, default=501)
    c.add_argument("--out", default="curves.csv")
    _add_common(c)

    return parser


# ---------------------------------------------------------------------------
# Config file handling: inject config values as flags unless explicitly given.
# ---------------------------------------------------------------------------


def _read_config(path: str) -> dict[str, str]:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    out = {}
    for i, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigurationError(f"{path}: line {i}: expected key=value")
        key, value = text.split("=", 1)
        out[key.strip()] = value.strip()
    return out


_LIST_KEYS = {"data", "curve"}
_FLAG_KEYS = {"cv", "stratified", "with-margins", "impute"}


def _expand_config(argv: list[str]) -> list[str]:
    """Rewrite argv so config-file entries become flags after the subcommand."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        return argv  # let argparse report the missing value
    cfg = _read_config(argv[i + 1])
    explicit = {a for a in argv if a.startswith("--")}
    extra: list[str] = []
    for key, value in cfg.items():
        flag = f"--{key}"
        if flag in explicit or flag == "--config":
            continue
        if key in _FLAG_KEYS:
            if value.lower() in ("1", "true", "yes", "on"):
                extra.append(flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise ConfigurationError(f"config key {key!r}: boolean expected, got {value!r}")
        elif key in _LIST_KEYS:
            for item in value.split(","):
                extra.extend([flag, item.strip()])
        else:
            extra.extend([flag, value])
    # insert right after the subcommand token (first non-flag argument)
    return argv[:1] + extra + argv[1:]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _label_col(arg: str):
    try:
        return int(arg)
    except ValueError:
        return arg


def _settings(args) -> SolverSettings:
    return SolverSettings(tol=args.tol, max_iter=args.max_iter)


def _lambda_exponents(args) -> tuple[int, ...]:
    lo, hi = args.lambda_exp_min, args.lambda_exp_max
    if lo > hi:
        raise ConfigurationError(f"--lambda-exp-min {lo} exceeds --lambda-exp-max {hi}")
    return tuple(range(lo, hi + 1))


def _direct_spec(args) -> LossSpec:
    if args.model is None:
        raise ConfigurationError("direct training needs --model to fix the family")
    family, alphas, margins = modelsel.TABLE_GRIDS[args.model]
    alpha = args.alpha if args.alpha is not None else alphas[0]
    margin = args.margin if args.margin is not None else margins[0]
    return resolve_spec(family, alpha, margin)


def cmd_train(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    dataset = dataio.load_csv(args.data, label_col=_label_col(args.label_col),
                              impute_mean=args.impute)
    settings = _settings(args)
    if args.cv:
        if args.model is None:
            raise ConfigurationError("--cv needs --model to pick the grid")
        grid = modelsel.submodel_grid(
            args.model, lambda_exponents=_lambda_exponents(args),
            folds=args.folds, seed=seed, stratified=args.stratified,
        )
        if args.alpha is not None:
            grid = replace(grid, alphas=(args.alpha,))
        if args.margin is not None:
            grid = replace(grid, margins=(args.margin,))
        cv = modelsel.grid_search(dataset, grid, settings=settings, jobs=args.jobs)
        spec, lam = cv.best_spec, cv.best_lambda
        if args.cv_report:
            cv.write_csv(args.cv_report)
        print(f"cv: alpha={spec.alpha:.6g} margin="
              f"{(spec.boundary if spec.family in (Family.H_MINUS, Family.H_PLUS, Family.HINGE_ZERO) else spec.c):.6g} "
              f"lambda=2^{math.log2(lam):.0f} mean_cv_acc={cv.best_mean_accuracy:.2f}%")
    else:
        if args.lam is None:
            raise ConfigurationError("give --lambda for direct training or use --cv")
        spec, lam = _direct_spec(args), args.lam

    binary = dataset.n_classes == 2 and all(
        tok in ("-1", "+1", "1", "-1.0", "1.0", "+1.0") for tok in dataset.catalog
    )
    if binary:
        clf = train_binary(dataset, spec, lam, settings)
        rep = clf.report
    else:
        clf = train_ova(dataset, spec, lam, settings)
        rep = clf.classifiers[-1].report
    save_model(clf, args.out)
    acc = accuracy_percent(clf, dataset)
    print(f"model: family={spec.family.value} alpha={spec.alpha:.6g} c={spec.c:.6g} "
          f"lambda={lam:.6g}")
    print(f"train accuracy: {acc:.2f}%")
    print(f"solver: iterations={rep.iterations} final_grad_norm={rep.final_grad_norm:.3e} "
          f"converged={rep.converged}")
    print(f"wrote {args.out}")
    return 0


def cmd_predict(args) -> int:
    clf = load_model(args.model_file)
    X = dataio.load_feature_csv(args.data)
    out = Path(args.out)
    if X.shape[0] == 0:
        out.write_text("", encoding="utf-8")
        print(f"wrote {args.out} (0 rows)")
        return 0
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if isinstance(clf, OvaClassifier):
            pred = clf.predict(X)
            margins = clf.margins_matrix(X)
            for i, lbl in enumerate(pred):
                row = [lbl]
                if args.with_margins:
                    row += [repr(float(v)) for v in margins[i]]
                w.writerow(row)
        else:
            margins = clf.margins(X)
            pred = np.where(margins >= 0.0, 1, -1)
            for i, lbl in enumerate(pred):
                row = [int(lbl)]
                if args.with_margins:
                    row.append(repr(float(margins[i])))
                w.writerow(row)
    print(f"wrote {args.out} ({X.shape[0]} rows)")
    return 0


def cmd_bench(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    settings = _settings(args)
    exps = _lambda_exponents(args)
    tasks = []
    for path in args.data:
        ds = dataio.load_csv(path, label_col=_label_col(args.label_col),
                             impute_mean=args.impute)
        tasks.append(bench_mod.BenchTask(name=ds.name, full=ds,
                                         fraction=1.0 - args.test_fraction))
    models = []
    for tag in [t.strip() for t in args.models.split(",") if t.strip()]:
        models.append(bench_mod.ModelEntry(
            name=tag,
            grid=modelsel.submodel_grid(tag, lambda_exponents=exps, folds=args.folds,
                                        stratified=args.stratified),
        ))
    reference = None
    if args.reference == "builtin":
        reference = bench_mod.DESK_DWN_REFERENCE
    elif args.reference:
        reference = bench_mod.load_reference_csv(args.reference)
    report = bench_mod.run_benchmark(
        tasks, models, repetitions=args.reps, seed=seed, settings=settings,
        jobs=args.jobs, reference=reference,
    )
    report.write_csv(f"{args.out}.csv")
    Path(f"{args.out}.txt").write_text(report.format_text(), encoding="utf-8")
    sys.stdout.write(report.format_text())
    print(f"wrote {args.out}.csv and {args.out}.txt")
    return 0


def _parse_curve(token: str):
    """Return (curve_id, value_fn, grad_fn) for one --curve token."""
    name, _, rest = token.partition(":")
    params = {}
    if rest:
        for piece in rest.split(","):
            if "=" not in piece:
                raise ConfigurationError(f"curve {token!r}: expected key=value, got {piece!r}")
            k, v = piece.split("=", 1)
            params[k.strip()] = v.strip()

    if name == "perceptron":
        return token, (lambda z: max(0.0, -z)), (lambda z: -1.0 if z < 0.0 else 0.0)
    if name == "hinge":
        if "q" not in params:
            raise ConfigurationError("hinge curve needs q=<order>")
        q = float(Fraction(params["q"]))

        def hval(z, q=q):
            return hinge_q(q, z)

        def hgrad(z, q=q):
            if z >= 1.0:
                return 0.0 if q >= 1.0 else math.inf
            return -q * math.pow(1.0 - z, q - 1.0)

        return token, hval, hgrad
    if name in modelsel.TABLE_GRIDS:
        family, alphas, margins = modelsel.TABLE_GRIDS[name]
        alpha = float(Fraction(params["alpha"])) if "alpha" in params else alphas[0]
        margin = float(Fraction(params["margin"])) if "margin" in params else margins[0]
        spec = resolve_spec(family, alpha, margin)
        return token, (lambda z: logitron_value(spec, z)), (lambda z: logitron_grad(spec, z))
    raise ConfigurationError(
        f"unknown curve {name!r}; use a submodel tag, 'perceptron', or 'hinge:q=N'"
    )


def cmd_losscurve(args) -> int:
    if args.points < 2:
        raise ConfigurationError("--points must be at least 2")
    if not (args.zmin < args.zmax):
        raise ConfigurationError("--zmin must be below --zmax")
    curves = [_parse_curve(tok) for tok in args.curve]
    zs = np.linspace(args.zmin, args.zmax, args.points)
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["curve", "z", "value", "grad"])
        for cid, vfn, gfn in curves:
            for z in zs:
                w.writerow([cid, repr(float(z)), repr(float(vfn(z))), repr(float(gfn(z)))])
    print(f"wrote {args.out} ({len(curves)} curve(s), {args.points} points each)")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "bench": cmd_bench,
    "losscurve": cmd_losscurve,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _expand_config(argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except LogitronError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
