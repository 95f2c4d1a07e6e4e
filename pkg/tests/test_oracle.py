import math

import numpy as np
import pytest

from triheun.errors import CutoffTooSmall
from triheun.maps import HeunSixParams, build_map
from triheun.oracle import (
    ShootingProblem,
    canonical_rhs,
    quartic_level_constant,
    quartic_level_estimate,
    fd_residual,
    fd_schwarzian,
    integrate_canonical,
    integrate_ode,
    shoot_spectrum,
    spectrum_of_sampled,
)
from triheun.potential import schwarzian_via_I1
from triheun.series import CanonicalParams, eval_series, t1_coeffs


def sine_rhs(t, z):
    return [z[1], -z[0]]


def test_sine():
    tr = integrate_ode(sine_rhs, [0.0, 1.0], (0.0, math.pi / 2))
    assert tr.y[0, -1] == pytest.approx(1.0, abs=1e-9)
    assert tr(1.0)[0] == pytest.approx(math.sin(1.0), abs=1e-9)


def test_tolerance_controls_error():
    errs = [abs(integrate_ode(sine_rhs, [0, 1], (0, 20.0), tol).y[0, -1] - math.sin(20.0)) for tol in (1e-6, 1e-9, 1e-12)]
    assert errs[0] > errs[1] > errs[2]


def test_tolerance_range_enforced():
    with pytest.raises(ValueError):
        integrate_ode(sine_rhs, [0, 1], (0, 1), tol=1e-15)


def test_canonical_integration_matches_series():
    cp = CanonicalParams.from_abg(1, 2, 3)
    y, _ = integrate_canonical(cp, 1.0, 0.0, 0.5)
    assert y == pytest.approx(eval_series(t1_coeffs(cp), 0.5), abs=1e-8)
    assert integrate_canonical(cp, 2.0, -1.0, 0.0) == (2.0, -1.0)


def test_normal_form_trajectory():
    """v = e^f T1 solves v'' = Omega v when integrated from its own initial data."""
    cp = CanonicalParams.from_abg(0.5, -1.0, 0.8)
    tr = integrate_ode(lambda x, z: [z[1], cp.omega(x) * z[0]], [1.0, -0.4], (0.0, 1.0), 1e-12)
    f = lambda x: -0.4 * x - 0.5 * x**3  # noqa: E731
    for x in (0.25, 0.7, 1.0):
        assert tr(x)[0] == pytest.approx(math.exp(f(x)) * eval_series(t1_coeffs(cp), x), rel=1e-7)


def test_canonical_rhs_shape():
    assert canonical_rhs(CanonicalParams.from_abg(0, 0, 0))(1.0, [1.0, 0.0]) == [0.0, 3.0]


def test_fd_residual_sine():
    grid = np.linspace(0.5, 3.0, 40)
    rep = fd_residual(math.sin, lambda x: 0.0, 1.0, grid, h=1e-2)
    assert rep.residual_max <= 1e-8
    assert "40 points" in rep.grid


def test_fd_residual_detects_wrong_energy():
    grid = np.linspace(0.5, 3.0, 40)
    assert fd_residual(math.sin, lambda x: 0.0, 1.5, grid).residual_max > 0.1
    # h0 flips the sign of E - V
    assert fd_residual(math.sinh, lambda x: 0.0, 1.0, grid, "h0", h=1e-2).residual_max <= 1e-8
    with pytest.raises(ValueError):
        fd_residual(math.sin, lambda x: 0.0, 1.0, grid, "other")


def test_fd_schwarzian_linear_and_b2_zero():
    assert abs(fd_schwarzian(build_map(HeunSixParams(0, 0, 0, 2.0, 0, 0)), 1.0)) < 1e-6
    p = HeunSixParams(0, 0, 0, 0.5, 1.3, 0)
    m = build_map(p)
    for r in (0.4, 1.5):
        assert fd_schwarzian(m, r) == pytest.approx(schwarzian_via_I1(p, m.inverse(r)), abs=1e-5)


def test_quartic_level_constant_value():
    assert quartic_level_constant() == pytest.approx(3 * math.gamma(0.75) ** 2 / math.sqrt(2 * math.pi))
    assert quartic_level_estimate(8, quartic=8.0) == pytest.approx(2 * quartic_level_estimate(8))


def test_harmonic_sanity():
    """spectrum_of_sampled on x^2 gives 1, 3, 5."""
    levels = spectrum_of_sampled(lambda x: x * x, -8.0, 8.0, 3)
    assert levels == pytest.approx([1, 3, 5], abs=1e-5)


def test_pure_quartic_levels():
    levels = shoot_spectrum(ShootingProblem(), 6)
    assert levels[0] > 0
    assert np.all(np.diff(levels) > 0)


def test_cutoff_independence():
    base = shoot_spectrum(ShootingProblem(a2=1.0), 5, check_cutoff=True)
    wide = shoot_spectrum(ShootingProblem(a2=1.0, L=6.0), 5)
    assert wide == pytest.approx(base, rel=1e-6)


def test_cutoff_too_small():
    with pytest.raises(CutoffTooSmall):
        shoot_spectrum(ShootingProblem(L=1.0), 5)


def test_quartic_level_ratio_trend():
    levels = shoot_spectrum(ShootingProblem(quartic=1.0), 21)
    ratios = [levels[n] / quartic_level_estimate(n) for n in (5, 10, 20)]
    assert abs(ratios[-1] - 1) < 0.1
    assert abs(ratios[0] - 1) > abs(ratios[1] - 1) > abs(ratios[2] - 1)
