import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triheun.errors import TruncationError
from triheun.maps import HeunSixParams, build_map
from triheun.oracle import integrate_canonical
from triheun.series import (
    CanonicalParams,
    Wavefunction,
    assemble_wavefunction,
    canonicalize,
    reflection_identity_residual,
    eval_series,
    eval_series_derivs,
    ode_residual,
    t1_coeffs,
    t2_coeffs,
    wronskian,
)

abg = st.tuples(*[st.floats(-3, 3, allow_nan=False)] * 3)


def test_canonicalize_examples():
    assert canonicalize(0, 0, 0).abg == (0, 0, 0)
    cp = canonicalize(1, 2, 3)
    assert cp.abg == pytest.approx((2, 2, -2))


@given(abg)
def test_canonical_roundtrip(t):
    cp = CanonicalParams.from_abg(*t)
    back = canonicalize(cp.A0, cp.A1, cp.A2)
    assert back.abg == pytest.approx(t, abs=1e-12)
    assert cp.A2 == pytest.approx(-1.5 * t[2])


def test_t1_examples():
    assert t1_coeffs(CanonicalParams.from_abg(2, 0, 0)).coeffs[2] == -1
    e = t1_coeffs(CanonicalParams.from_abg(0, 0, 0)).coeffs
    assert e[0] == 1 and e[1] == 0 and e[3] == pytest.approx(0.5)


def test_t2_examples():
    assert t2_coeffs(CanonicalParams.from_abg(0, 0, 4)).coeffs[1] == 2
    assert t2_coeffs(CanonicalParams.from_abg(6, 0, 0)).coeffs[2] == pytest.approx(-1)
    assert t2_coeffs(CanonicalParams.from_abg(0, 0, 0)).coeffs[3] == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(abg)
def test_recurrences_hold(t):
    a, b, g = t
    cp = CanonicalParams.from_abg(a, b, g)
    e = t1_coeffs(cp, 40).coeffs
    for n in range(3, 41):
        lhs = n * (n - 1) * e[n]
        rhs = (n - 1) * g * e[n - 1] - a * e[n - 2] - (b + 6 - 3 * n) * e[n - 3]
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_series_against_mpmath_taylor():
    """High-precision Taylor integration of the canonical ODE as an independent reference."""
    a, b, g = 1.0, 2.0, 3.0
    mp.mp.dps = 40
    f = lambda x, y: [y[1], (g + 3 * x**2) * y[1] - (a + (b - 3) * x) * y[0]]  # noqa: E731
    sol1 = mp.odefun(f, 0, [1, 0])
    sol2 = mp.odefun(f, 0, [0, 1])
    cp = CanonicalParams.from_abg(a, b, g)
    for rho in (0.5, 1.0, 1.4):  # odefun integrates forward only
        assert eval_series(t1_coeffs(cp), rho) == pytest.approx(float(sol1(rho)[0]), rel=1e-12)
        assert eval_series(t2_coeffs(cp), rho) == pytest.approx(float(sol2(rho)[0]), rel=1e-12)


def test_eval_at_origin():
    cp = CanonicalParams.from_abg(0.3, -0.4, 1.1)
    assert eval_series(t1_coeffs(cp), 0.0) == 1
    v, d, _ = eval_series_derivs(t2_coeffs(cp), 0.0)
    assert v == 0 and d == 1


def test_series_vs_integrator_example():
    cp = CanonicalParams.from_abg(1, 2, 3)
    y, _ = integrate_canonical(cp, 1.0, 0.0, 0.5)
    assert eval_series(t1_coeffs(cp), 0.5) == pytest.approx(y, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(abg, st.floats(-1.5, 1.5))
def test_ode_residual_small(t, rho):
    cp = CanonicalParams.from_abg(*t)
    for s in (t1_coeffs(cp), t2_coeffs(cp)):
        y, dy, d2y = eval_series_derivs(s, rho)
        assert abs(ode_residual(cp, y, dy, d2y, rho)) <= 1e-9 * (1 + abs(y) + abs(dy) + abs(d2y))


def test_wronskian_closed_form():
    """W(T1, T2) = exp(gamma rho + rho^3) by Abel's identity."""
    cp = CanonicalParams.from_abg(0.7, -1.2, 0.4)
    for rho in (-1.5, -0.5, 0.0, 0.8, 1.5):
        assert wronskian(cp, rho) == pytest.approx(math.exp(cp.gamma * rho + rho**3), rel=1e-12)


def test_truncation_error_far_out():
    cp = CanonicalParams.from_abg(1, 2, 3)
    with pytest.raises(TruncationError):
        eval_series(t1_coeffs(cp), 30.0)


def test_reflection_identity_examples():
    assert reflection_identity_residual(CanonicalParams.from_abg(1, 2, 3), 0.0) == pytest.approx(0, abs=1e-15)
    assert abs(reflection_identity_residual(CanonicalParams.from_abg(1, 2, 3), 0.3)) <= 1e-9
    assert abs(reflection_identity_residual(CanonicalParams.from_abg(0.5, 1.7, 0.0), 0.6)) <= 1e-9


def test_assemble_zero_combo():
    p = HeunSixParams(0.1, 0.2, 0.3, 1.0, 0.0, 0.0)
    assert assemble_wavefunction(p, 0.5, build_map(p), (0.0, 0.0), 1.0) == 0.0


def test_quartic_special_case():
    """b = (1, 0, 0), a = 0: rho = r, I1 = 1, psi = exp(-r^3/2) y(r)."""
    p = HeunSixParams(0, 0, 0, 1, 0, 0)
    m = build_map(p)
    E = 0.8
    cp = CanonicalParams.from_six(p, E)
    for r in (0.2, 0.9, 1.4):
        psi = assemble_wavefunction(p, E, m, (1.0, 0.0), r)
        assert psi == pytest.approx(math.exp(-(r**3) / 2) * eval_series(t1_coeffs(cp), r), rel=1e-14)


def test_wavefunction_class_matches_function():
    p = HeunSixParams(0.3, -0.2, 0.5, 1.0, 0.5, 1.0)
    m = build_map(p)
    w = Wavefunction(p, 0.4, m, (0.6, -0.3))
    for r in (0.1, 0.5, 1.0):
        assert w(r) == pytest.approx(assemble_wavefunction(p, 0.4, m, (0.6, -0.3), r), rel=1e-13)
