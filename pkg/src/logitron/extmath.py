"""Extended logarithm / exponential kernel on restricted classification domains.

The pair of functions implemented here generalizes log/exp with a model
parameter ``alpha >= 0`` and a scale parameter ``c > 0``:

    ext_log(u) = ln(u/c)                         if alpha == 1
               = (u^(1-alpha) - c^(1-alpha)) / (1-alpha)   otherwise

    ext_exp(v) = c * e^v                         if alpha == 1
               = (c^(1-alpha) + (1-alpha) * v)^(1/(1-alpha))   otherwise

On the restricted domains below the two maps are mutually inverse bijections:

    dom(ext_log):  u > 0 (alpha >= 1),   u >= 0 (0 <= alpha < 1)
    dom(ext_exp):  all reals (alpha == 1),
                   v >= b (0 <= alpha < 1),  v < b (alpha > 1)

where ``b = c^(1-alpha) / (alpha - 1)`` is the finite boundary of the exp
domain (negative for alpha < 1, positive for alpha > 1, absent for alpha == 1).

For alpha > 1 the value at the boundary is +infinity; we return ``math.inf``
as an ordinary extended-real value rather than raising, because downstream
loss evaluation relies on the usual extended arithmetic (1/inf = 0,
a + inf = inf) to realize finite boundary limits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, InputError, ParameterError

__all__ = [
    "ExtParams",
    "DomainKind",
    "DomainSpec",
    "boundary",
    "log_domain",
    "exp_domain",
    "ext_log",
    "ext_exp",
    "ext_exp_clipped",
]


@dataclass(frozen=True)
class ExtParams:
    """Parameter pair (alpha, c) with alpha >= 0 and c > 0."""

    alpha: float
    c: float

    def __post_init__(self):
        a, c = float(self.alpha), float(self.c)
        if not (math.isfinite(a) and math.isfinite(c)):
            raise InputError(f"parameters must be finite, got alpha={a!r}, c={c!r}")
        if a < 0.0:
            raise ParameterError(f"alpha must be nonnegative, got {a!r}")
        if c <= 0.0:
            raise ParameterError(f"c must be strictly positive, got {c!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "c", c)

    @property
    def boundary(self) -> float | None:
        return boundary(self)


def boundary(p: ExtParams) -> float | None:
    """Finite boundary of dom(ext_exp): c^(1-alpha)/(alpha-1); None for alpha == 1."""
    if p.alpha == 1.0:
        return None
    return math.pow(p.c, 1.0 - p.alpha) / (p.alpha - 1.0)


class DomainKind(enum.Enum):
    ALL_REALS = "all-reals"
    POSITIVE = "positive"
    NONNEGATIVE = "nonnegative"
    AT_LEAST = "at-least"
    LESS_THAN = "less-than"


@dataclass(frozen=True)
class DomainSpec:
    """One-dimensional domain description used for membership checks."""

    kind: DomainKind
    bound: float | None = None

    def contains(self, x: float) -> bool:
        if self.kind is DomainKind.ALL_REALS:
            return True
        if self.kind is DomainKind.POSITIVE:
            return x > 0.0
        if self.kind is DomainKind.NONNEGATIVE:
            return x >= 0.0
        if self.kind is DomainKind.AT_LEAST:
            return x >= self.bound
        return x < self.bound  # LESS_THAN

    def describe(self) -> str:
        if self.kind is DomainKind.ALL_REALS:
            return "all reals"
        if self.kind is DomainKind.POSITIVE:
            return "x > 0"
        if self.kind is DomainKind.NONNEGATIVE:
            return "x >= 0"
        if self.kind is DomainKind.AT_LEAST:
            return f"x >= {self.bound!r}"
        return f"x < {self.bound!r}"


def log_domain(p: ExtParams) -> DomainSpec:
    """Domain of ext_log: positive reals for alpha >= 1, nonnegative for alpha < 1."""
    if p.alpha >= 1.0:
        return DomainSpec(DomainKind.POSITIVE)
    return DomainSpec(DomainKind.NONNEGATIVE)


def exp_domain(p: ExtParams) -> DomainSpec:
    """Domain of ext_exp: all reals (alpha=1), [b, inf) (alpha<1), (-inf, b) (alpha>1)."""
    if p.alpha == 1.0:
        return DomainSpec(DomainKind.ALL_REALS)
    b = boundary(p)
    if p.alpha < 1.0:
        return DomainSpec(DomainKind.AT_LEAST, b)
    return DomainSpec(DomainKind.LESS_THAN, b)


def _pow(base: float, expo: float) -> float:
    """float power that saturates to +inf instead of raising on overflow."""
    try:
        return math.pow(base, expo)
    except OverflowError:
        return math.inf


def _check_finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"{name} must be finite, got {x!r}")
    return x


def ext_log(p: ExtParams, u: float) -> float:
    """Evaluate the extended logarithm at ``u``.

    Strictly increasing on its domain with ext_log(c) == 0. Raises
    DomainError outside the restricted domain, InputError for nonfinite u.
    """
    u = _check_finite("u", u)
    dom = log_domain(p)
    if not dom.contains(u):
        raise DomainError(
            f"u={u!r} outside dom(ext_log) = {{{dom.describe()}}} for alpha={p.alpha!r}"
        )
    if p.alpha == 1.0:
        return math.log(u / p.c)
    om = 1.0 - p.alpha
    return (_pow(u, om) - math.pow(p.c, om)) / om


def ext_exp(p: ExtParams, v: float) -> float:
    """Evaluate the extended exponential at ``v``.

    ext_exp(0) == c, and ext_exp inverts ext_log on the restricted domains.
    For alpha > 1 the boundary point itself evaluates to +inf (returned as
    math.inf, not an error); beyond the boundary a DomainError is raised.
    """
    v = _check_finite("v", v)
    if p.alpha == 1.0:
        if v > 709.0:  # c * e^v saturates in float64
            return math.inf
        return p.c * math.exp(v)
    om = 1.0 - p.alpha
    b = boundary(p)
    s = math.pow(p.c, om) + om * v
    if p.alpha < 1.0:
        if v < b:
            raise DomainError(
                f"v={v!r} below dom(ext_exp) boundary {b!r} for alpha={p.alpha!r}"
            )
        return _pow(max(0.0, s), 1.0 / om)
    # alpha > 1: domain is v < b, with the boundary mapping to +inf.
    if v > b:
        raise DomainError(
            f"v={v!r} above dom(ext_exp) boundary {b!r} for alpha={p.alpha!r}"
        )
    if s <= 0.0:
        return math.inf
    return _pow(s, 1.0 / om)


def ext_exp_clipped(p: ExtParams, v: float) -> float:
    """Extended exponential with the argument clipped at the domain boundary.

    Evaluates (max(0, c^(1-alpha) + (1-alpha) v))^(1/(1-alpha)) for any real
    v; agrees with ext_exp on dom(ext_exp). Below the boundary this is 0 for
    alpha < 1 and +inf for alpha > 1 (extended-real 1/0 convention).
    Undefined at alpha == 1.
    """
    if p.alpha == 1.0:
        raise ParameterError("ext_exp_clipped requires alpha != 1")
    v = _check_finite("v", v)
    om = 1.0 - p.alpha
    s = max(0.0, math.pow(p.c, om) + om * v)
    if s == 0.0:
        return 0.0 if p.alpha < 1.0 else math.inf
    return _pow(s, 1.0 / om)
