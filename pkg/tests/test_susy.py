import numpy as np
import pytest

from triheun.errors import NodeSingularity
from triheun.series import CanonicalParams, eval_series_derivs, t1_coeffs
from triheun.susy import (
    Superpotential,
    factorization_residual,
    ground_state_energy_check,
    parity_residual,
    partner_potentials,
    riccati_residual,
    superpotential,
    zero_mode_residual,
)

FIG = CanonicalParams.from_abg(0.0, -1.0, -2.0)


def test_value_at_origin():
    cp = CanonicalParams.from_abg(0.4, 1.3, 0.9)
    assert superpotential(Superpotential(cp), 0.0) == pytest.approx(-0.45)
    assert Superpotential(CanonicalParams.from_abg(0, 0, 0))(0.0) == 0


def test_c1_zero_closed_form():
    cp = CanonicalParams.from_abg(0.4, 1.3, 0.9)
    w = Superpotential(cp)
    for x in (-1.0, 0.3, 1.2):
        t, dt, _ = eval_series_derivs(t1_coeffs(cp), x)
        assert w(x) == pytest.approx(-(0.9 + 3 * x * x) / 2 + dt / t, rel=1e-12)


@pytest.mark.parametrize("c1", [0.0, 0.5, -0.5, 1.0])
def test_riccati_on_grid(c1):
    w = Superpotential(FIG, c1)
    for x in np.linspace(-1.0, 1.0, 21):
        try:
            assert abs(riccati_residual(w, x)) <= 1e-8
        except NodeSingularity:
            continue


def test_riccati_example_points():
    assert abs(riccati_residual(Superpotential(FIG), 1.0)) <= 1e-8
    assert abs(riccati_residual(Superpotential(FIG, 1.0), 0.5)) <= 1e-8


def test_node_raises():
    w = Superpotential(CanonicalParams.from_abg(0.0, 0.0, 0.0), c1=-1.0)
    nodes = w.nodes()
    assert nodes, "c1 = -1 with even T1 must vanish at rho = 0"
    with pytest.raises(NodeSingularity):
        w(nodes[0])


def test_partners():
    cp = CanonicalParams.from_abg(1.1, -0.6, 0.3)
    w = Superpotential(cp)
    for x in (-0.8, 0.0, 0.9):
        vm, vp = partner_potentials(w, x)
        W, dW = w.value_and_derivative(x)
        assert vp == pytest.approx(cp.omega(x), rel=1e-10, abs=1e-10)
        assert vm == pytest.approx(cp.omega(x) - 2 * dW, rel=1e-10, abs=1e-10)


def test_partner_gap_at_origin():
    """With c1 = 0, W'(0) = T1''(0) = -alpha, so V- - V+ = 2 alpha at 0."""
    for a in (0.0, 0.7, -1.3):
        vm, vp = partner_potentials(Superpotential(CanonicalParams.from_abg(a, -1.0, -2.0)), 0.0)
        assert vm - vp == pytest.approx(2 * a, abs=1e-12)


def test_zero_mode_and_factorization():
    cp = CanonicalParams.from_abg(0.0, 0.0, 0.0)
    w = Superpotential(cp)
    for x in np.linspace(-1.2, 1.2, 7):
        assert abs(zero_mode_residual(w, x)) <= 1e-8
        assert factorization_residual(w, x) <= 1e-7


@pytest.mark.parametrize("x", [0.2, 0.7, 1.3])
def test_parity(x):
    assert abs(parity_residual(CanonicalParams.from_abg(0.8, 1.7, 0.0), x)) <= 1e-10
    with pytest.raises(ValueError):
        parity_residual(FIG, x)


def test_ground_state_report():
    rep = ground_state_energy_check(Superpotential(FIG))
    if rep.nodes:
        assert rep.lowest_h_minus is None and rep.unbroken_indicated is False
    else:
        assert rep.lowest_h_minus is not None
        assert rep.unbroken_indicated == (abs(rep.lowest_h_minus) < 1e-4)
