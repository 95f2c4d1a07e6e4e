import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from triheun.errors import SingularPoint, UnsupportedFamily
from triheun.maps import CaseTag, HeunSixParams, build_map
from triheun.oracle import fd_schwarzian
from triheun.potential import (
    Family,
    critical_points,
    descartes_counts,
    family_coefficients,
    positive_roots,
    schwarzian_via_I1,
    sign_changes,
    v_eff,
    v_eff_rho,
    v_eff_rho_schwarzian,
    zeroing_choice,
)
from triheun.validate import random_family, random_params, rho_window


def test_v1_zeroing_example():
    p = HeunSixParams(9, 45 / 2, 63 / 4, 1, 2, 1)
    m = build_map(p)
    assert v_eff(p, m, 0.0) == pytest.approx(-39 / 4, abs=1e-12)
    for r in (0.3, 1.0, 4.0):
        closed = -3 / (4 * (1 + 2 * r) ** 2) - 9 * math.sqrt(1 + 2 * r) + 4.5 * r
        assert v_eff(p, m, r) == pytest.approx(closed, rel=1e-12)
    c = family_coefficients(p, m.tag, m).coeffs
    assert (c["c0"], c["c1"], c["c2"]) == pytest.approx((0, 0, 0), abs=1e-12)
    assert (c["c3"], c["c4"], c["c5"]) == pytest.approx((-0.75, -9, 4.5))


def test_v3_zero_choice():
    p = HeunSixParams(0, 0, 0, 0, 0, 1)
    m = build_map(p)
    for r in (0.5, 2.0):
        assert v_eff(p, m, r) == pytest.approx(-3 / (16 * r * r) + 4.5 * r, rel=1e-13)


def test_v5_list():
    p = HeunSixParams(0, 0, 0.7, 0, 1, 0)
    u = family_coefficients(p, CaseTag.Linear_b0b2Zero).coeffs
    assert u["u0"] == 0
    assert u["u2"] == pytest.approx(-5 / 36)
    assert u["u4"] == pytest.approx(81 / 16)


def test_v4_zeroing_at_b0_zero():
    p = HeunSixParams(0, 0, 0, 0, 1, 0)
    assert zeroing_choice(CaseTag.Linear_b2Zero, 0.0, 1.0, 0.0) == (0.0, 0.0, 0.0)
    v = family_coefficients(p, CaseTag.Linear_b0b2Zero).coeffs
    assert v["u4"] == pytest.approx(81 / 16)


@pytest.mark.parametrize("tag", [CaseTag.DeltaZero_b1Pos, CaseTag.DeltaZero_b1Neg, CaseTag.DeltaZero_b0b1Zero, CaseTag.Linear_b2Zero, CaseTag.Linear_b0b2Zero])
def test_family_matches_general_formula(tag):
    rng = np.random.default_rng(11)
    for _ in range(10):
        p = random_params(tag, rng, a_scale=3.0)
        m = build_map(p)
        fam = family_coefficients(p, m.tag, m)
        for r in (1e-3, 0.1, 1.0, 7.0, 100.0):
            g = v_eff(p, m, r)
            assert fam(r) == pytest.approx(g, rel=1e-9, abs=1e-9)


def test_unsupported_family():
    p = HeunSixParams(0, 0, 0, 1, 0, 1)
    with pytest.raises(UnsupportedFamily):
        family_coefficients(p, build_map(p).tag)


def test_structural_coefficients():
    b2, b1 = 1.7, 0.9
    c = family_coefficients(HeunSixParams(0.1, 0.2, 0.3, 1.0, 2 * math.sqrt(b2), b2), CaseTag.DeltaZero_b1Pos).coeffs
    assert c["c3"] == pytest.approx(-3 * b2 / 4)
    assert c["c5"] == pytest.approx(9 / (2 * b2 * math.sqrt(b2)))
    e = family_coefficients(HeunSixParams(0.1, 0.2, 0.3, 0, 0, b2), CaseTag.DeltaZero_b0b1Zero).coeffs
    assert e["e3"] == pytest.approx(-3 / 16)
    v = family_coefficients(HeunSixParams(0.1, 0.2, 0.3, 0.4, b1, 0), CaseTag.Linear_b2Zero).coeffs
    assert v["v2"] == pytest.approx(-5 / 36)


def test_rational_form_symbolic():
    """The explicit rational form equals -I0/I1 - S/2 with S from the Schwarzian."""
    rho, a0, a1, a2, b0, b1, b2 = sp.symbols("rho a0 a1 a2 b0 b1 b2")
    I0 = a0 + a1 * rho + a2 * rho**2 - sp.Rational(9, 4) * rho**4
    I1 = b0 + b1 * rho + b2 * rho**2
    # S(rho(r)) with rho' = I1^(-1/2); rho''/rho' = -I1'/(2 I1^(3/2)) etc. expressed in rho
    d = lambda f: sp.diff(f, rho) / sp.sqrt(I1)  # noqa: E731  d/dr
    r1 = 1 / sp.sqrt(I1)
    r2 = d(r1)
    r3 = d(r2)
    S = r3 / r1 - sp.Rational(3, 2) * (r2 / r1) ** 2
    num = 12 * b2**2 * rho**2 + 12 * b1 * b2 * rho + 5 * b1**2 - 8 * b0 * b2
    diff = sp.simplify(-I0 / I1 - S / 2 - (-I0 / I1 - num / (16 * I1**3)))
    assert diff == 0


@settings(max_examples=50, deadline=None)
@given(tag=st.sampled_from(list(CaseTag)), seed=st.integers(0, 10**6), frac=st.floats(0.0, 1.0))
def test_two_forms_agree(tag, seed, frac):
    p = random_params(tag, np.random.default_rng(seed), a_scale=3.0)
    m = build_map(p)
    a, b = rho_window(m)
    rho = a + frac * (b - a)
    v1, v2 = v_eff_rho(p, rho), v_eff_rho_schwarzian(p, rho)
    assert v1 == pytest.approx(v2, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("b", [(0.0, 1.0, 0.0), (0.5, 1.3, 0.0), (1.0, 0.0, 0.0), (1.0, 2.0, 1.0), (1.0, 0.0, 1.0)])
def test_schwarzian_fd(b):
    p = HeunSixParams(0, 0, 0, *b)
    m = build_map(p)
    for r in (0.5, 1.0, 2.0):
        rho = m.inverse(r)
        assert fd_schwarzian(m, r) == pytest.approx(schwarzian_via_I1(p, rho), rel=1e-5, abs=1e-5)


def test_constant_map_schwarzian_zero():
    p = HeunSixParams(0, 0, 0, 1, 0, 0)
    assert schwarzian_via_I1(p, 0.7) == 0
    assert abs(fd_schwarzian(build_map(p), 1.0)) < 1e-6


def test_singular_point():
    with pytest.raises(SingularPoint):
        v_eff_rho(HeunSixParams(0, 0, 0, 0, 1, 0), 0.0)


# ------------------------------------------------------------------ critical points


@pytest.mark.parametrize("coeffs, n", [([1, -1, 1], 2), ([1, 1, 1], 0), ([-1, 0, 0, 1], 1), ([1, 0, -3, 0, 2], 2)])
def test_sign_changes(coeffs, n):
    assert sign_changes(coeffs) == n


def test_descartes_counts():
    assert descartes_counts(4) == {4, 2, 0}
    assert descartes_counts(3) == {3, 1}


def test_positive_roots_vs_numpy():
    """Coefficients are low-to-high; compare with numpy's companion-matrix roots."""
    rng = np.random.default_rng(5)
    for _ in range(50):
        c = rng.normal(size=rng.integers(2, 8))
        ours = positive_roots(c)
        ref = sorted(z.real for z in np.polynomial.polynomial.polyroots(c) if abs(z.imag) < 1e-7 and z.real > 1e-9)
        assert len(ours) == len(ref)
        assert np.allclose(ours, ref, atol=1e-8)


def test_v3_no_extrema():
    p = HeunSixParams(2.0, 1.5, 0.3, 0, 0, 1)
    rep = critical_points(family_coefficients(p, CaseTag.DeltaZero_b0b1Zero))
    assert rep.sign_changes == 0 and rep.roots == ()


def test_v5_no_positive_root():
    p = HeunSixParams(2.0, 0.4, -1.0, 0, 1.3, 0)
    rep = critical_points(family_coefficients(p, CaseTag.Linear_b0b2Zero))
    assert rep.roots == ()


@pytest.mark.parametrize("kind", ["V1", "V3", "V4", "V5"])
def test_critical_points_are_extrema(kind):
    rng = np.random.default_rng(17)
    for _ in range(20):
        fam = random_family(rng, kind)
        rep = critical_points(fam)
        assert len(rep.roots) in rep.possible_counts
        for r, cls in zip(rep.roots, rep.classification):
            h = 1e-6 * (1 + r)
            d = (fam(r + h) - fam(r - h)) / (2 * h)
            assert abs(d) < 1e-4 * (1 + abs(fam(r)) / r)
            assert cls in ("min", "max", "inflection")


def test_critical_points_dense_sampling():
    rng = np.random.default_rng(3)
    rs = np.geomspace(1e-3, 1e2, 6000)
    for kind in ("V1", "V3", "V4", "V5"):
        for _ in range(10):
            fam = random_family(rng, kind)
            rep = critical_points(fam)
            v = np.array([fam(x) for x in rs])
            turns = int(np.sum(np.sign(np.diff(v))[1:] != np.sign(np.diff(v))[:-1]))
            inside = [x for x in rep.roots if 1.2e-3 < x < 0.99e2]
            assert turns == len(inside)


def test_family_enum():
    assert {f.value for f in Family} >= {"V1", "V3", "V4", "V5"}
