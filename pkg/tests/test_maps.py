import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from triheun.errors import DomainError, InfeasibleCase, InvalidParams
from triheun.maps import (
    CaseTag,
    HeunSixParams,
    InversionMode,
    build_map,
    classify,
    forward_map,
    inverse_map,
    map_asymptotic,
    sample_r,
)
from triheun.validate import random_params, rho_window


def P(b0, b1, b2, a=(0.0, 0.0, 0.0)):
    return HeunSixParams(*a, b0, b1, b2)


@pytest.mark.parametrize(
    "b, tag",
    [
        ((1, 2, 1), CaseTag.DeltaZero_b1Pos),
        ((1, -2, 1), CaseTag.DeltaZero_b1Neg),
        ((0, 0, 1), CaseTag.DeltaZero_b0b1Zero),
        ((1, 0, 1), CaseTag.DeltaNeg_b2Pos),
        ((-1, 0, 1), CaseTag.DeltaPos_b2Pos),
        ((1, 0, -1), CaseTag.DeltaPos_b2Neg),
        ((1, 1, 0), CaseTag.Linear_b2Zero),
        ((0, 1, 0), CaseTag.Linear_b0b2Zero),
        ((1, 0, 0), CaseTag.Constant_b1b2Zero),
    ],
)
def test_classify_table(b, tag):
    assert classify(P(*b)) is tag


@pytest.mark.parametrize("b", [(-1, 0, -1), (0, 0, -1), (1, -1, 0), (-1, 0, 0), (0, 0, -2)])
def test_infeasible(b):
    with pytest.raises(InfeasibleCase):
        classify(P(*b))


def test_invalid_params():
    with pytest.raises(InvalidParams):
        P(0, 0, 0)
    with pytest.raises(InvalidParams):
        HeunSixParams(math.nan, 0, 0, 1, 0, 0)
    with pytest.raises(InvalidParams):
        HeunSixParams.from_sequence([1, 2, 3])


def test_delta_stored():
    p = P(0.3, 1.7, 2.2)
    assert p.delta == 1.7**2 - 4 * 0.3 * 2.2


def test_forward_examples():
    assert forward_map(build_map(P(1, 2, 1)), 0.0) == 0.0
    assert forward_map(build_map(P(0, 1, 0)), 1.0) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert forward_map(build_map(P(1, 0, 1)), 0.0) == pytest.approx(0.0, abs=1e-15)


def test_inverse_examples():
    assert inverse_map(build_map(P(1, 2, 1)), 0.0) == 0.0
    assert inverse_map(build_map(P(0, 0, 1)), 2.0) == pytest.approx(2.0, abs=1e-15)
    assert inverse_map(build_map(P(0, 1, 0)), 2.0 / 3.0) == pytest.approx(1.0, abs=1e-14)


def test_inverse_mode():
    assert build_map(P(1, 0, 1)).inversion_mode is InversionMode.MonotoneRootFind
    assert build_map(P(0, 1, 0)).inversion_mode is InversionMode.ClosedForm


def test_domain_errors():
    m = build_map(P(1, 0, -1))
    with pytest.raises(DomainError):
        inverse_map(m, m.r_domain[1] * 1.01)
    with pytest.raises(DomainError):
        inverse_map(build_map(P(1, 0, 1)), -1.0)


@pytest.mark.parametrize("seed, tag", list(enumerate(CaseTag)))
def test_forward_matches_quadrature(seed, tag):
    """r(rho) equals the integral of sqrt(I1) from the anchor."""
    rng = np.random.default_rng(seed)
    p = random_params(tag, rng)
    m = build_map(p)
    a, b = rho_window(m)
    for rho in np.linspace(a, b, 5):
        ref, _ = quad(lambda x: math.sqrt(max(p.i1(x), 0.0)), m.anchor, rho, epsabs=1e-13, epsrel=1e-12)
        assert forward_map(m, rho) == pytest.approx(ref, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("tag", list(CaseTag))
def test_i1_positive_and_monotone(tag):
    rng = np.random.default_rng(7)
    m = build_map(random_params(tag, rng))
    rs = sample_r(m, 50, hi=50.0)
    rhos = np.array([inverse_map(m, r) for r in rs])
    assert np.all(np.diff(rhos) > 0)
    assert all(m.params.i1(x) > 0 for x in rhos)


def test_asymptotic_examples():
    m = build_map(P(0, 0, 1))
    assert map_asymptotic(m, 50.0) == pytest.approx(10.0)
    assert abs(inverse_map(m, 50.0) - 10.0) / 10.0 < 0.05
    m = build_map(P(0, 1, 0))
    assert map_asymptotic(m, 1e3) == pytest.approx(inverse_map(m, 1e3), rel=1e-14)
    m = build_map(P(1, 2, 1))
    ratios = [map_asymptotic(m, r) / inverse_map(m, r) for r in (1e2, 1e4, 1e6)]
    assert abs(ratios[-1] - 1) < abs(ratios[0] - 1)


def test_asymptotic_bounded_case_small_r():
    m = build_map(P(1, 0, -1))
    errs = [abs(map_asymptotic(m, r) - inverse_map(m, r)) for r in (1e-2, 1e-4, 1e-6)]
    assert errs[2] < errs[1] < errs[0]


feasible = st.sampled_from(list(CaseTag))


@settings(max_examples=60, deadline=None)
@given(tag=feasible, seed=st.integers(0, 10**6), frac=st.floats(0.0, 1.0))
def test_roundtrip_property(tag, seed, frac):
    m = build_map(random_params(tag, np.random.default_rng(seed)))
    a, b = rho_window(m)
    rho = a + frac * (b - a)
    assert inverse_map(m, forward_map(m, rho)) == pytest.approx(rho, rel=1e-10, abs=1e-10)
