import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triheun.qes import w_sequence
from triheun.recurrence import (
    abel_prediction,
    birkhoff_eval,
    birkhoff_expansion,
    casoratian,
    companion_matrix,
    limit_check,
    log_abs_w,
    plateau,
    propagate,
    w_from_initial,
)
from triheun.series import CanonicalParams


def test_first_step_matches_w3():
    a, b, g = 0.7, 1.9, -0.6
    cp = CanonicalParams.from_abg(a, b, g)
    z1 = propagate(cp, 1)[1].Z
    assert z1[2] == pytest.approx((g**3 - 2 * a * g - (b - 3)) / 6)


@settings(max_examples=25, deadline=None)
@given(st.tuples(*[st.floats(-3, 3)] * 3))
def test_propagate_matches_w_sequence(t):
    cp = CanonicalParams.from_abg(*t)
    w = w_sequence(cp, 22)
    states = propagate(cp, 20)
    assert [s.Z[0] for s in states] == list(w[:21])


def test_companion_matrix_step():
    cp = CanonicalParams.from_abg(1.1, -0.3, 0.4)
    states = propagate(cp, 6)
    for n in range(6):
        assert companion_matrix(cp, n) @ states[n].Z == pytest.approx(states[n + 1].Z, rel=1e-14)


def test_trivial_sequence():
    cp = CanonicalParams.from_abg(0, 3, 0)
    zs = [s.Z for s in propagate(cp, 5)]
    assert list(zs[0]) == [1, 0, 0]
    assert all(not np.any(z) for z in zs[1:])
    assert limit_check(cp, 200) == 0


@pytest.mark.parametrize("abg", [(1, 2, 3), (0, -1, -2)])
def test_limit_check_superexponential(abg):
    assert limit_check(CanonicalParams.from_abg(*abg), 200) <= 1e-30


def test_rescaled_log_matches_direct():
    cp = CanonicalParams.from_abg(1, 2, 3)
    _, logs = log_abs_w(cp, 60)
    w = w_sequence(cp, 61)
    for n in range(0, 61, 7):
        if w[n] != 0:
            assert logs[n] == pytest.approx(math.log(abs(w[n])), rel=1e-10, abs=1e-10)


def test_rescaling_survives_underflow():
    sign, logs = log_abs_w(CanonicalParams.from_abg(1, 2, 3), 900)
    assert np.all(np.isfinite(logs[1:]))
    assert logs[-1] < -700  # far past the double range


def test_casoratian_identity_basis():
    cp = CanonicalParams.from_abg(0.3, 1.2, -0.8)
    sols = [w_from_initial(cp, e, 10) for e in np.eye(3)]
    direct, predicted = casoratian(cp, sols, 0)
    assert direct == pytest.approx(1.0) and predicted == pytest.approx(1.0)


def test_casoratian_vanishes_at_beta_three():
    assert abel_prediction(CanonicalParams.from_abg(0.4, 3.0, 1.0), 1) == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_casoratian_random(seed):
    rng = np.random.default_rng(seed)
    cp = CanonicalParams.from_abg(*rng.uniform(-3, 3, 3))
    sols = [w_from_initial(cp, rng.normal(size=3), 20) for _ in range(3)]
    for n in (1, 3, 8, 15):
        direct, predicted = casoratian(cp, sols, n)
        assert direct == pytest.approx(predicted, rel=1e-10)


def test_casoratian_argument_checks():
    cp = CanonicalParams.from_abg(0, 0, 0)
    with pytest.raises(ValueError):
        casoratian(cp, [[1, 0, 0]] * 2, 0)
    with pytest.raises(ValueError):
        casoratian(cp, [[1, 0, 0, 0]] * 3, 5)


def test_birkhoff_leading_term():
    cp = CanonicalParams.from_abg(0, 0, 0)
    for n in (12, 50, 200):
        expected = (3 * math.e / n) ** (n / 3) * n ** (-5 / 6)
        assert abs(birkhoff_eval(cp, 0, n, terms=0)) == pytest.approx(expected, rel=1e-10)


def test_birkhoff_c1():
    assert birkhoff_expansion(CanonicalParams.from_abg(1, 0, 0)).c1 == pytest.approx(9 ** (-1 / 3))


def test_birkhoff_variants_differ_only_in_higher_terms():
    cp = CanonicalParams.from_abg(1.0, 2.0, 3.0)
    c, p = birkhoff_expansion(cp), birkhoff_expansion(cp, variant="legacy")
    assert c.c1 == p.c1
    assert c.c2 != p.c2
    with pytest.raises(ValueError):
        birkhoff_expansion(cp, variant="other")
    with pytest.raises(ValueError):
        birkhoff_expansion(cp, branch=3)


def test_birkhoff_argument_checks():
    cp = CanonicalParams.from_abg(1, 2, 3)
    with pytest.raises(ValueError):
        birkhoff_eval(cp, 0, 5)
    with pytest.raises(ValueError):
        birkhoff_eval(cp, 0, 20, terms=4)


@pytest.mark.parametrize("abg", [(1, 2, 3), (0.5, -1, 2.5), (-1, 1, 3.5)])
def test_plateau_drift(abg):
    rep = plateau(CanonicalParams.from_abg(*abg))
    assert rep.drift < 0.02
    assert rep.constant != 0


def test_more_terms_flatten_the_plateau():
    cp = CanonicalParams.from_abg(1, 2, 3)
    drifts = [plateau(cp, terms=k).drift for k in (0, 3)]
    assert drifts[1] < drifts[0]


def test_abel_prediction_large_n():
    """Past n = 170 the factorial no longer fits a double; compare with a log-gamma evaluation."""
    cp = CanonicalParams.from_abg(0.2, 1.7, 0.5)
    assert abel_prediction(cp, 250) == 0.0  # true value ~ e^-1000, below the double range
    for n in (10, 120, 180):
        val = abel_prediction(cp, n)
        log_prod = sum(math.log(abs(cp.beta - 3 * k)) for k in range(1, n + 1))
        ref = math.log(2 * (n + 2)) - 2 * math.lgamma(n + 3) + log_prod
        assert math.isfinite(val) and val != 0
        assert math.log(abs(val)) == pytest.approx(ref, rel=1e-12)
