"""Extended log/exp kernel: frozen example values, oracle cross-checks, and
the inverse/range/monotonicity/convexity properties on the standard grid."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from logitron.errors import DomainError, InputError, ParameterError
from logitron.extmath import (
    DomainKind,
    ExtParams,
    boundary,
    exp_domain,
    ext_exp,
    ext_exp_clipped,
    ext_log,
    log_domain,
)

# The property grid: every (alpha, c) pair exercised by the invariants.
ALPHAS = (0.0, 0.2, 0.5, 0.75, 1.0, 1.2, 1.5, 2.0, 3.0)
CS = (0.25, 0.5, 1.0, 2.0)
GRID = [ExtParams(a, c) for a in ALPHAS for c in CS]


def quad_log_oracle(p: ExtParams, u: float) -> float:
    """Independent oracle: adaptive quadrature of the defining integral."""
    val, err = quad(lambda x: x ** (-p.alpha), p.c, u, limit=200)
    assert err < 1e-6
    return val


def bisect_exp_oracle(p: ExtParams, v: float, lo: float, hi: float) -> float:
    """Independent oracle: invert ext_log by bisection on [lo, hi]."""
    f = lambda u: ext_log(p, u) - v
    assert f(lo) <= 0.0 <= f(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Example values
# ---------------------------------------------------------------------------


def test_ext_log_identity_at_c():
    assert ext_log(ExtParams(1.0, 1.0), 1.0) == 0.0
    for p in GRID:
        assert ext_log(p, p.c) == 0.0


def test_ext_log_quadrature_value():
    p = ExtParams(0.5, 1.0)
    # oracle: integral of x^(-1/2) from 1 to 4 = 2.0 (frozen)
    assert quad_log_oracle(p, 4.0) == pytest.approx(2.0, abs=1e-9)
    assert ext_log(p, 4.0) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("p,u", [(a, u) for a in [0.2, 0.8, 1.0, 1.5, 3.0]
                                 for u in [0.05, 0.7, 1.0, 3.0, 40.0]])
def test_ext_log_matches_quadrature(p, u):
    params = ExtParams(p, 0.5)
    assert ext_log(params, u) == pytest.approx(quad_log_oracle(params, u), abs=2e-6)


def test_ext_log_limit_is_boundary():
    p = ExtParams(2.0, 1.0)
    vals = [ext_log(p, u) for u in (1e3, 1e6, 1e9)]
    assert vals == sorted(vals)  # monotone convergence from below
    assert vals[-1] == pytest.approx(1.0, abs=1e-9)
    assert boundary(p) == 1.0


def test_ext_exp_examples():
    assert ext_exp(ExtParams(0.5, 1.0), 0.0) == 1.0
    p = ExtParams(2.0, 1.0)
    # oracle: ln_{2,1}(2) = 0.5, so exp_{2,1}(0.5) = 2 by bisection inversion
    assert bisect_exp_oracle(p, 0.5, 1e-6, 1e6) == pytest.approx(2.0, rel=1e-9)
    assert ext_exp(p, 0.5) == pytest.approx(2.0, rel=1e-12)
    assert ext_exp(p, 1.0) == math.inf  # value at the boundary point


def test_ext_exp_clipped_examples():
    p = ExtParams(0.5, 1.0)
    assert ext_exp_clipped(p, -3.0) == 0.0
    assert ext_exp_clipped(p, 0.0) == 1.0
    assert ext_exp_clipped(ExtParams(2.0, 1.0), 2.0) == math.inf
    with pytest.raises(ParameterError):
        ext_exp_clipped(ExtParams(1.0, 1.0), 0.0)


def test_boundary_examples():
    assert boundary(ExtParams(0.5, 1.0)) == -2.0
    assert boundary(ExtParams(2.0, 1.0)) == 1.0
    assert boundary(ExtParams(1.0, 7.0)) is None
    assert math.copysign(1.0, boundary(ExtParams(0.2, 2.0))) == -1.0
    assert math.copysign(1.0, boundary(ExtParams(3.0, 2.0))) == 1.0


# ---------------------------------------------------------------------------
# Domains and errors
# ---------------------------------------------------------------------------


def test_domain_table():
    assert log_domain(ExtParams(1.0, 1.0)).kind is DomainKind.POSITIVE
    assert log_domain(ExtParams(2.0, 1.0)).kind is DomainKind.POSITIVE
    assert log_domain(ExtParams(0.5, 1.0)).kind is DomainKind.NONNEGATIVE
    assert exp_domain(ExtParams(1.0, 1.0)).kind is DomainKind.ALL_REALS
    d = exp_domain(ExtParams(0.5, 1.0))
    assert d.kind is DomainKind.AT_LEAST and d.bound == -2.0
    d = exp_domain(ExtParams(2.0, 1.0))
    assert d.kind is DomainKind.LESS_THAN and d.bound == 1.0


def test_domain_errors():
    with pytest.raises(DomainError):
        ext_log(ExtParams(1.0, 1.0), 0.0)
    with pytest.raises(DomainError):
        ext_log(ExtParams(2.0, 1.0), -1.0)
    with pytest.raises(DomainError):
        ext_log(ExtParams(0.5, 1.0), -1e-9)
    assert ext_log(ExtParams(0.5, 1.0), 0.0) == boundary(ExtParams(0.5, 1.0))
    with pytest.raises(DomainError):
        ext_exp(ExtParams(0.5, 1.0), -2.0000001)
    with pytest.raises(DomainError):
        ext_exp(ExtParams(2.0, 1.0), 1.0000001)
    with pytest.raises(InputError):
        ext_log(ExtParams(1.0, 1.0), math.nan)
    with pytest.raises(InputError):
        ext_exp(ExtParams(1.0, 1.0), math.inf)
    with pytest.raises(ParameterError):
        ExtParams(-0.1, 1.0)
    with pytest.raises(ParameterError):
        ExtParams(1.0, 0.0)


# ---------------------------------------------------------------------------
# Grid properties
# ---------------------------------------------------------------------------


def _in_domain_u(p: ExtParams, count: int = 200) -> np.ndarray:
    # The window is chosen so float64 can meet the 1e-10 relative tolerance:
    # farther out, forming c^(1-alpha) + (1-alpha)*v cancels catastrophically
    # for alpha near 3, which no 64-bit evaluation of these formulas survives.
    u = np.logspace(-3, 2, count)
    if p.alpha < 1.0:
        u = np.concatenate([[0.0], u])
    return u


def test_inverse_round_trip_on_grid():
    for p in GRID:
        for u in _in_domain_u(p):
            v = ext_log(p, float(u))
            back = ext_exp(p, v)
            assert abs(back - u) <= 1e-10 * max(1.0, abs(u)), (p, u, back)


def test_range_identity_across_pairs():
    # Interior images of ext_exp land in dom(ext_log) for every other pair.
    for p in GRID:
        b = boundary(p)
        if p.alpha == 1.0:
            vs = np.linspace(-30.0, 30.0, 41)
        elif p.alpha < 1.0:
            vs = b + np.logspace(-6, 3, 41)
        else:
            vs = b - np.logspace(-6, 3, 41)
        outputs = [ext_exp(p, float(v)) for v in vs]
        for q in GRID:
            dom = log_domain(q)
            assert all(dom.contains(o) for o in outputs), (p, q)


def test_monotonicity_sorted_sampling():
    for p in GRID:
        u = _in_domain_u(p, 120)
        lo = [ext_log(p, float(x)) for x in u]
        assert all(a < b for a, b in zip(lo, lo[1:])), f"ext_log not increasing {p}"
        if 0.0 < p.alpha < 1.0:
            vs = np.linspace(boundary(p), boundary(p) + 50.0, 120)
            ex = [ext_exp(p, float(v)) for v in vs]
            assert all(a < b for a, b in zip(ex, ex[1:])), f"ext_exp not increasing {p}"


def _second_differences(f, xs):
    ys = np.array([f(float(x)) for x in xs])
    h = xs[1] - xs[0]
    return (ys[2:] - 2.0 * ys[1:-1] + ys[:-2]) / (h * h)


def test_convexity_second_differences():
    for p in GRID:
        # -ext_log convex on a positive window
        xs = np.linspace(0.1, 8.0, 201)
        d2 = _second_differences(lambda x: -ext_log(p, x), xs)
        assert np.all(d2 >= -1e-9), f"-ext_log not convex {p}"
        # ext_exp convex on an interior window of its domain
        if p.alpha == 1.0:
            vs = np.linspace(-4.0, 4.0, 201)
        elif p.alpha < 1.0:
            vs = np.linspace(boundary(p) + 1e-3, boundary(p) + 6.0, 201)
        else:
            vs = np.linspace(boundary(p) - 6.0, boundary(p) - 1e-3, 201)
        d2 = _second_differences(lambda v: ext_exp(p, v), vs)
        assert np.all(d2 >= -1e-9), f"ext_exp not convex {p}"


def test_clipped_agrees_with_exp_on_domain():
    for p in GRID:
        if p.alpha == 1.0:
            continue
        b = boundary(p)
        vs = b + np.logspace(-8, 2, 50) if p.alpha < 1.0 else b - np.logspace(-8, 2, 50)
        for v in vs:
            assert ext_exp_clipped(p, float(v)) == ext_exp(p, float(v))


@settings(max_examples=200, deadline=None)
@given(
    ai=st.integers(0, len(ALPHAS) - 1),
    ci=st.integers(0, len(CS) - 1),
    t=st.floats(-3.0, 2.0, allow_nan=False),
)
def test_round_trip_property(ai, ci, t):
    p = ExtParams(ALPHAS[ai], CS[ci])
    u = math.pow(10.0, t)
    back = ext_exp(p, ext_log(p, u))
    assert abs(back - u) <= 1e-10 * max(1.0, abs(u))
