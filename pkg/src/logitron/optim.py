"""L2-regularized empirical risk over linear predictors, and its minimizer.

The objective is the unnormalized sum

    F(w, b) = sum_i L(y_i (<w, x_i> + b)) + lambda * ||w||^2

(no 1/N factor, and the bias is not regularized). Because the loss sum is
unnormalized, lambda scales with the dataset size; the 2^d grid used for
model selection assumes exactly this convention.

The solver is a plain L-BFGS with Armijo backtracking. Curvature pairs with
s'y <= 0 (which appear in the merely-C1 regions, alpha outside (0.5, 2)) are
skipped, and a non-descent quasi-Newton direction falls back to steepest
descent, so the method degrades gracefully to a subgradient scheme on the
alpha = 0 hinge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalFailure, ParameterError, ShapeError
from .loss import LossSpec, values_array, values_grads_array

__all__ = [
    "LinearModel",
    "Objective",
    "SolveReport",
    "SolverSettings",
    "objective_eval",
    "minimize",
]


@dataclass(frozen=True)
class SolverSettings:
    """Knobs passed down to `minimize` by the training layers."""

    tol: float = 1e-6
    max_iter: int = 500
    history: int = 10


@dataclass
class LinearModel:
    """Affine predictor f(x) = <w, x> + b."""

    w: np.ndarray
    b: float

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        self.b = float(self.b)
        if self.w.ndim != 1:
            raise ShapeError(f"w must be a vector, got shape {self.w.shape}")
        if not (np.all(np.isfinite(self.w)) and math.isfinite(self.b)):
            raise InputError("model entries must be finite")

    def margins(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.w.shape[0]:
            raise ShapeError(
                f"feature dimension {X.shape[-1]} != model dimension {self.w.shape[0]}"
            )
        return X @ self.w + self.b


@dataclass
class Objective:
    """Read-only bundle: features (N x n), labels in {-1, +1}, spec, lambda."""

    features: np.ndarray
    labels: np.ndarray
    spec: LossSpec
    lam: float

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if self.features.ndim != 2:
            raise ShapeError(f"features must be N x n, got shape {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise ShapeError(
                f"labels shape {self.labels.shape} does not match N={self.features.shape[0]}"
            )
        if self.labels.size and not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise InputError("labels must be -1 or +1")
        self.lam = float(self.lam)
        if self.lam < 0.0 or not math.isfinite(self.lam):
            raise ParameterError(f"lambda must be a finite nonnegative real, got {self.lam!r}")

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def objective_eval(obj: Objective, m: LinearModel) -> tuple[float, np.ndarray, float]:
    """Return (value, grad_w, grad_b) at the model."""
    if m.w.shape[0] != obj.dim:
        raise ShapeError(
            f"model dimension {m.w.shape[0]} != feature dimension {obj.dim}"
        )
    if obj.features.shape[0] == 0:
        value = obj.lam * float(m.w @ m.w)
        return value, 2.0 * obj.lam * m.w, 0.0
    yz = obj.labels * (obj.features @ m.w + m.b)
    vals, grads = values_grads_array(obj.spec, yz)
    gy = grads * obj.labels
    value = float(vals.sum()) + obj.lam * float(m.w @ m.w)
    grad_w = obj.features.T @ gy + 2.0 * obj.lam * m.w
    grad_b = float(gy.sum())
    return value, grad_w, grad_b


def _objective_value(obj: Objective, w: np.ndarray, b: float) -> float:
    """Value only; the line search doesn't need gradients at trial points."""
    if obj.features.shape[0] == 0:
        return obj.lam * float(w @ w)
    yz = obj.labels * (obj.features @ w + b)
    return float(values_array(obj.spec, yz).sum()) + obj.lam * float(w @ w)


@dataclass
class SolveReport:
    iterations: int
    final_objective: float
    final_grad_norm: float
    converged: bool
    objective_history: list[float] = field(default_factory=list)


def _two_loop(g: np.ndarray, s_hist: list, y_hist: list) -> np.ndarray:
    """Standard L-BFGS two-loop recursion for H*g."""
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(list(zip(s_hist, y_hist, _rhos(s_hist, y_hist)))):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(zip(s_hist, y_hist, _rhos(s_hist, y_hist)), reversed(alphas)):
        beta = rho * (y @ q)
        q += (a - beta) * s
    return q


def _rhos(s_hist, y_hist):
    return [1.0 / (s @ y) for s, y in zip(s_hist, y_hist)]


def minimize(
    obj: Objective,
    init: LinearModel | None = None,
    tol: float = 1e-6,
    max_iter: int = 500,
    history: int = 10,
    step_tol: float = 1e-14,
) -> tuple[LinearModel, SolveReport]:
    """Minimize the objective; returns the model and a solve report.

    Stops when the gradient infinity-norm over (w, b) drops to `tol`;
    otherwise after `max_iter` accepted steps, when an accepted step falls
    to `step_tol` in infinity-norm, or when the Armijo search cannot find
    any decrease. The last two are the kinked-bottom exits the alpha = 0
    subgradient runs take (reported as converged=False); the step exit also
    guards against the zero-step livelock where t*d underflows below one
    ulp of x and Armijo keeps "accepting" bitwise no-ops. The recorded
    objective sequence is nonincreasing and the procedure is deterministic.
    """
    if tol <= 0.0:
        raise ParameterError(f"tol must be positive, got {tol!r}")
    n = obj.dim
    if init is None:
        x = np.zeros(n + 1)
    else:
        if init.w.shape[0] != n:
            raise ShapeError("warm start dimension mismatch")
        x = np.concatenate([init.w, [init.b]])

    def eval_at(xv):
        f, gw, gb = objective_eval(obj, LinearModel(xv[:n], xv[n]))
        return f, np.concatenate([gw, [gb]])

    f, g = eval_at(x)
    if not (math.isfinite(f) and np.all(np.isfinite(g))):
        raise NumericalFailure(
            "objective nonfinite at the initial point", last_iterate=None
        )
    hist_f = [f]
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    converged = bool(np.max(np.abs(g), initial=0.0) <= tol)
    it = 0
    while not converged and it < max_iter:
        d = -_two_loop(g, s_hist, y_hist)
        gd = float(g @ d)
        if gd >= 0.0:  # not a descent direction; drop memory
            d = -g
            gd = float(g @ d)
            s_hist.clear()
            y_hist.clear()
        # First step along raw gradient is scaled like minFunc's 1/sum|g|.
        t = 1.0 if s_hist else min(1.0, 1.0 / max(np.sum(np.abs(g)), 1e-12))
        accepted = False
        for _ in range(60):
            x_new = x + t * d
            f_new = _objective_value(obj, x_new[:n], x_new[n])
            if not math.isfinite(f_new):
                raise NumericalFailure(
                    f"objective became nonfinite during line search (t={t!r})",
                    last_iterate=LinearModel(x[:n].copy(), x[n]),
                )
            if f_new <= f + 1e-4 * t * gd:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if np.array_equal(d, -g):
                break  # no decrease along the (sub)gradient: stalled
            s_hist.clear()
            y_hist.clear()
            continue  # retry from scratch with steepest descent
        f_new, g_new = eval_at(x_new)
        if not np.all(np.isfinite(g_new)):
            raise NumericalFailure(
                "gradient became nonfinite at an accepted step",
                last_iterate=LinearModel(x[:n].copy(), x[n]),
            )
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-10 * float(np.linalg.norm(s) * np.linalg.norm(y)):
            s_hist.append(s)
            y_hist.append(y)
            if len(s_hist) > history:
                s_hist.pop(0)
                y_hist.pop(0)
        x, f, g = x_new, f_new, g_new
        hist_f.append(f)
        it += 1
        converged = bool(np.max(np.abs(g)) <= tol)
        if not converged and float(np.max(np.abs(s))) <= step_tol:
            break  # progress below resolution: subgradient zigzag endgame

    model = LinearModel(x[:n].copy(), x[n])
    report = SolveReport(
        iterations=it,
        final_objective=f,
        final_grad_norm=float(np.max(np.abs(g), initial=0.0)),
        converged=converged,
        objective_history=hist_f,
    )
    return model, report
