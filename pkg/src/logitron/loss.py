"""The Logitron loss family: margin losses stitched from an extended logistic
core and the Perceptron loss, with first/second derivatives and closed-form
submodels.

A loss spec is a pair (alpha, c) plus a family tag. Writing b = -c_a for the
boundary of the extended-exp domain (c_a = c^(1-alpha)/(alpha-1)), the loss is

    L(z) = ext_log(c + ext_exp(-z))   where -z is inside dom(ext_exp)
         = max(0, -z)                 otherwise (the Perceptron stitch)

For alpha < 1 the stitch point b is on the positive axis (a classic margin:
the loss is exactly 0 for z >= b); for alpha > 1 it is on the negative axis
(the loss follows -z for z <= b). alpha = 1 is the plain logistic loss
log(1 + e^-z) and has no stitch. alpha = 0 is the first-order hinge
max(0, c - z).

Two evaluation routes are provided: `logitron_value` (domain-checked
extended exp) and `logitron_value_reformulated` (clipped exp plus an outer
max for alpha > 1). They are algebraically identical and are cross-checked
against each other in the test suite.

Numerics: every branch is written so that z anywhere in [-1e6, 1e6] stays
finite without overflow. The shifted argument s = c^(1-alpha) + (alpha-1) z
is formed first and powers of s are taken last; near the alpha > 1 boundary
the gradient uses the stable form -(1 + c s^(1/(alpha-1)))^(-alpha), and in
the deep Perceptron-like region (alpha < 1, z << 0) the value is computed as
-z plus a small correction via expm1/log1p instead of a difference of large
powers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParameterError
from .extmath import ExtParams, ext_exp, ext_exp_clipped, ext_log, _pow

__all__ = [
    "Family",
    "LossSpec",
    "LossEval",
    "resolve_spec",
    "logitron_value",
    "logitron_grad",
    "logitron_second",
    "logitron_value_reformulated",
    "evaluate",
    "hinge_q",
    "perceptron",
    "extended_logistic",
    "values_array",
    "grads_array",
    "values_grads_array",
]


class Family(enum.Enum):
    """Submodel families keyed by where alpha sits and what the margin means."""

    H_MINUS = "H-"        # 0 < alpha < 1, margin parameter is c_alpha < 0
    H_PLUS = "H+"         # alpha > 1, margin parameter is c_alpha > 0
    L_MINUS = "L-"        # 0 < alpha < 1, margin parameter is c itself
    L_PLUS = "L+"         # alpha > 1, margin parameter is c itself
    HINGE_ZERO = "hinge0"    # alpha = 0: first-order hinge max(0, c - z)
    LOGISTIC_ONE = "logistic"  # alpha = 1: logistic loss (c-independent)


_HINGE_FAMILIES = (Family.H_MINUS, Family.H_PLUS, Family.HINGE_ZERO)


@dataclass(frozen=True)
class LossSpec:
    """A fully resolved loss: family tag plus concrete (alpha, c)."""

    family: Family
    alpha: float
    c: float

    def __post_init__(self):
        a, c = float(self.alpha), float(self.c)
        if not (math.isfinite(a) and math.isfinite(c)):
            raise InputError(f"alpha/c must be finite, got {a!r}, {c!r}")
        if c <= 0.0:
            raise ParameterError(f"c must be strictly positive, got {c!r}")
        fam = self.family
        ok = (
            (fam is Family.H_MINUS and 0.0 < a < 1.0)
            or (fam is Family.L_MINUS and 0.0 < a < 1.0)
            or (fam is Family.H_PLUS and a > 1.0)
            or (fam is Family.L_PLUS and a > 1.0)
            or (fam is Family.HINGE_ZERO and a == 0.0)
            or (fam is Family.LOGISTIC_ONE and a == 1.0)
        )
        if not ok:
            raise ParameterError(f"alpha={a!r} inconsistent with family {fam.value}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "c", c)

    @property
    def q(self) -> float | None:
        """Hinge order 1/(1-alpha); None for the logistic branch."""
        if self.alpha == 1.0:
            return None
        return 1.0 / (1.0 - self.alpha)

    @property
    def k(self) -> int | None:
        """q rounded to an integer when it is one (within 1e-9), else None."""
        q = self.q
        if q is None:
            return None
        r = round(q)
        if r != 0 and abs(q - r) <= 1e-9 * max(1.0, abs(r)):
            return int(r)
        return None

    @property
    def c_k(self) -> float | None:
        """Companion margin constant -k c^(1/k) for integer hinge order k."""
        k = self.k
        if k is None:
            return None
        return -k * math.pow(self.c, 1.0 / k)

    @property
    def boundary(self) -> float | None:
        """c_alpha = c^(1-alpha)/(alpha-1); None for alpha = 1."""
        if self.alpha == 1.0:
            return None
        return math.pow(self.c, 1.0 - self.alpha) / (self.alpha - 1.0)

    @property
    def stitch(self) -> float | None:
        """The z where the extended-logistic core meets the Perceptron (-c_alpha)."""
        b = self.boundary
        return None if b is None else -b


@dataclass(frozen=True)
class LossEval:
    """Value, derivative, and (when alpha is in (0.5, 2)) second derivative."""

    value: float
    grad: float
    second: float | None


def resolve_spec(family: Family | str, alpha: float, margin: float) -> LossSpec:
    """Build a LossSpec from a family, alpha, and a margin value.

    For hinge families the margin is the boundary c_alpha (sign must match
    sign(alpha-1); the scale is recovered by c = ((alpha-1) margin)^(1/(1-alpha))).
    For logistic families the margin is the scale c itself.
    """
    fam = Family(family)
    a, m = float(alpha), float(margin)
    if not (math.isfinite(a) and math.isfinite(m)):
        raise InputError(f"alpha/margin must be finite, got {a!r}, {m!r}")
    if fam in _HINGE_FAMILIES:
        if a < 1.0 and m >= 0.0:
            raise ParameterError(
                f"family {fam.value} needs a negative boundary c_alpha, got {m!r}"
            )
        if a > 1.0 and m <= 0.0:
            raise ParameterError(
                f"family {fam.value} needs a positive boundary c_alpha, got {m!r}"
            )
        c = math.pow((a - 1.0) * m, 1.0 / (1.0 - a)) if a != 0.0 else -m
        return LossSpec(fam, a, c)
    if m <= 0.0:
        raise ParameterError(f"family {fam.value} needs margin c > 0, got {m!r}")
    return LossSpec(fam, a, m)


def _check_z(z: float) -> float:
    z = float(z)
    if not math.isfinite(z):
        raise InputError(f"z must be finite, got {z!r}")
    return z


def _shifted(alpha: float, c: float, z: float) -> float:
    """s = c^(1-alpha) + (alpha-1) z; nonnegative on dom(ext_exp(-z))."""
    return math.pow(c, 1.0 - alpha) + (alpha - 1.0) * z


def logitron_value(spec: LossSpec, z: float) -> float:
    """Loss value; finite and nonnegative for every finite z."""
    z = _check_z(z)
    a, c = spec.alpha, spec.c
    if a == 1.0:
        return max(0.0, -z) + math.log1p(math.exp(-abs(z)))
    if a == 0.0:
        return max(0.0, c - z)
    b = spec.stitch
    om = 1.0 - a
    if a < 1.0:
        if z > b:
            return 0.0
        s = max(0.0, _shifted(a, c, z))
        e = _pow(s, 1.0 / om)
        if z > 0.0:  # e < c: small values, evaluate the log directly
            return max(0.0, (math.pow(c + e, om) - math.pow(c, om)) / om)
        if math.isinf(e):
            return -z
        # Deep region: -z plus the (small) gap above the Perceptron line.
        # Once the gap falls below ~64 ulp of -z it is snapped to zero: the
        # value error is < 1.5e-14 relative, and pairs of deep evaluations
        # then satisfy the Lipschitz bound exactly instead of within ulp.
        g = s * math.expm1(om * math.log1p(c / e)) / om
        if g <= 64.0 * 2.220446049250313e-16 * -z:
            return -z
        return -z + g
    # alpha > 1
    if z <= b:
        return -z
    s = _shifted(a, c, z)
    rho = c * _pow(s, 1.0 / (a - 1.0))
    if math.isinf(rho):
        return 0.0
    return max(0.0, -b - s * _pow(1.0 + rho, om) / (a - 1.0))


def logitron_grad(spec: LossSpec, z: float) -> float:
    """Loss derivative; always in [-1, 0].

    alpha = 0 uses the subgradient convention -1 for z <= c (left derivative
    at the kink) and 0 beyond it.
    """
    z = _check_z(z)
    a, c = spec.alpha, spec.c
    if a == 1.0:
        t = math.exp(-abs(z))
        return -(t / (1.0 + t)) if z >= 0.0 else -1.0 / (1.0 + t)
    if a == 0.0:
        return -1.0 if z <= c else 0.0
    b = spec.stitch
    if a < 1.0:
        if z > b:
            return 0.0
        s = max(0.0, _shifted(a, c, z))
        e = _pow(s, 1.0 / (1.0 - a))
        if math.isinf(e):
            return -1.0
        return -math.pow(e / (c + e), a)
    if z <= b:
        return -1.0
    s = _shifted(a, c, z)
    rho = c * _pow(s, 1.0 / (a - 1.0))
    return -_pow(1.0 + rho, -a)


def logitron_second(spec: LossSpec, z: float) -> float | None:
    """Second derivative for alpha in (0.5, 2); None outside that range.

    Zero off the extended-logistic domain and at its boundary, matching the
    continuous extension of the interior formula
    c * alpha * e^(2 alpha - 1) / (c + e)^(alpha + 1) with e = ext_exp(-z).
    """
    a, c = spec.alpha, spec.c
    if not (0.5 < a < 2.0):
        return None
    z = _check_z(z)
    if a == 1.0:
        t = math.exp(-abs(z))
        return t / ((1.0 + t) * (1.0 + t))
    b = spec.stitch
    if (a < 1.0 and z >= b) or (a > 1.0 and z <= b):
        return 0.0
    s = max(0.0, _shifted(a, c, z))
    if s == 0.0:
        return 0.0
    log_e = math.log(s) / (1.0 - a)
    if log_e > 700.0:
        # e would overflow; c*alpha*e^(alpha-2) -> 0 since alpha < 2
        t = (a - 2.0) * log_e
        return c * a * math.exp(t) if t > -745.0 else 0.0
    if log_e < -740.0:
        return 0.0  # e underflows; exponent 2 alpha - 1 > 0 kills the product
    e = _pow(s, 1.0 / (1.0 - a))
    log_val = (
        math.log(c * a) + (2.0 * a - 1.0) * log_e - (a + 1.0) * math.log(c + e)
    )
    return math.exp(log_val) if log_val > -745.0 else 0.0


def logitron_value_reformulated(spec: LossSpec, z: float) -> float:
    """Equivalent low-complexity route: clipped exp, plus max(-z, .) for alpha > 1.

    Not defined for alpha = 1 (the clipped exp has no logistic branch).
    """
    a, c = spec.alpha, spec.c
    if a == 1.0:
        raise ParameterError("reformulated evaluation requires alpha != 1")
    z = _check_z(z)
    p = ExtParams(a, c)
    if a < 1.0:
        e = ext_exp_clipped(p, -z)
        if math.isinf(e):
            return -z  # astronomically deep; the correction is below 1 ulp
        return max(0.0, ext_log(p, c + e))
    b = spec.stitch
    if z <= b:
        # The clipped exp is +inf here and ext_log(c + inf) = c_alpha <= -z,
        # so the outer max resolves to the Perceptron value directly.
        return -z
    e = ext_exp_clipped(p, -z)
    core = -b if math.isinf(e) else ext_log(p, c + e)
    return max(-z, core)


def evaluate(spec: LossSpec, z: float) -> LossEval:
    return LossEval(
        value=logitron_value(spec, z),
        grad=logitron_grad(spec, z),
        second=logitron_second(spec, z),
    )


def hinge_q(q: float, z: float) -> float:
    """q-th order hinge (max(0, 1-z))^q for q outside [0, 1).

    For q < 0 the convention 0^q = +inf applies past the margin (returned as
    math.inf).
    """
    q = float(q)
    if 0.0 <= q < 1.0:
        raise ParameterError(f"hinge order must lie outside [0, 1), got {q!r}")
    z = _check_z(z)
    m = max(0.0, 1.0 - z)
    if m == 0.0:
        return 0.0 if q > 0.0 else math.inf
    return _pow(m, q)


def perceptron(z: float) -> float:
    """max(0, -z)."""
    return max(0.0, -float(z))


def extended_logistic(alpha: float, beta: float, c: float, z: float) -> float:
    """Two-parameter extended logistic loss ext_log_a(c + ext_exp_b(-z)).

    Evaluation only: convex for beta >= alpha, nonconvex otherwise (never
    trained here). -z must lie in dom(ext_exp_beta); at the beta > 1
    boundary the inner exp is +inf and the outer log takes its boundary
    limit (finite for alpha > 1, +inf otherwise).
    """
    z = _check_z(z)
    pa = ExtParams(alpha, c)
    pb = ExtParams(beta, c)
    e = ext_exp(pb, -z)
    if math.isinf(e):
        return pa.boundary if pa.alpha > 1.0 else math.inf
    return ext_log(pa, c + e)


# ---------------------------------------------------------------------------
# Vectorized evaluation (used by the optimizer; mirrors the scalar branches).
# ---------------------------------------------------------------------------


def _check_z_array(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise InputError("z array contains nonfinite entries")
    return z


def values_grads_array(spec: LossSpec, z) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise (L(z), L'(z)) over an array of margins."""
    z = _check_z_array(z)
    a, c = spec.alpha, spec.c
    vals = np.empty_like(z)
    grads = np.empty_like(z)

    if a == 1.0:
        t = np.exp(-np.abs(z))
        vals[...] = np.maximum(0.0, -z) + np.log1p(t)
        sig_neg = np.where(z >= 0.0, t, 1.0) / (1.0 + t)  # sigma(-z), overflow-safe
        grads[...] = -sig_neg
        return vals, grads

    if a == 0.0:
        vals[...] = np.maximum(0.0, c - z)
        grads[...] = np.where(z <= c, -1.0, 0.0)
        return vals, grads

    b = spec.stitch
    om = 1.0 - a
    com = math.pow(c, om)

    if a < 1.0:
        inside = z <= b
        vals[~inside] = 0.0
        grads[~inside] = 0.0
        zi = z[inside]
        s = np.maximum(0.0, com + (a - 1.0) * zi)
        with np.errstate(over="ignore"):
            e = np.power(s, 1.0 / om)
        big = np.isinf(e)
        near = zi > 0.0  # e < c here
        v = np.empty_like(zi)
        with np.errstate(invalid="ignore", divide="ignore"):
            ce = c + e
            v_near = (np.power(ce, om) - com) / om
            g_deep = s * np.expm1(om * np.log1p(c / e)) / om
            g_deep = np.where(g_deep <= 64.0 * 2.220446049250313e-16 * -zi,
                              0.0, g_deep)  # same deep snap as the scalar path
            v[...] = np.where(near, np.maximum(0.0, v_near), -zi + g_deep)
            v[big] = -zi[big]
            gr = -np.power(e / ce, a)
        gr[big] = -1.0
        vals[inside] = v
        grads[inside] = gr
        return vals, grads

    # alpha > 1
    per = z <= b
    vals[per] = -z[per]
    grads[per] = -1.0
    zi = z[~per]
    s = com + (a - 1.0) * zi
    with np.errstate(over="ignore"):
        rho = c * np.power(s, 1.0 / (a - 1.0))
        v = np.maximum(0.0, -b - s * np.power(1.0 + rho, om) / (a - 1.0))
        v = np.where(np.isinf(rho), 0.0, v)
        gr = -np.power(1.0 + rho, -a)
    vals[~per] = v
    grads[~per] = gr
    return vals, grads


def values_array(spec: LossSpec, z) -> np.ndarray:
    return values_grads_array(spec, z)[0]


def grads_array(spec: LossSpec, z) -> np.ndarray:
    return values_grads_array(spec, z)[1]
