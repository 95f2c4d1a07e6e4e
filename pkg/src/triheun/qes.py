"""Quasi-exact (polynomial) solutions of the canonical equation.

A degree-N polynomial solution needs beta = 3(N+1) and the vanishing of the
determinant of the (N+1)x(N+1) banded matrix D_{N+1}. Rows of that matrix are
the coefficient recurrence

    (beta - 3n) w_{n-1} + alpha w_n - gamma (n+1) w_{n+1} + (n+1)(n+2) w_{n+2} = 0

for n = 0..N with w_{N+1} = w_{N+2} = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from . import _accel
from .errors import BetaMismatch, NoNontrivialSolution, NormalizationError, QuasiExactUnavailable
from .series import CanonicalParams

N_CAP = 50
BETA_TOL = 1e-12

# Constraint polynomials for N = 0..4, {(power of alpha, power of gamma): coefficient}.
TABULATED = {
    0: {(1, 0): 1},
    1: {(2, 0): 1, (0, 1): 3},
    2: {(3, 0): 1, (1, 1): 12, (0, 0): 36},
    3: {(4, 0): 1, (2, 1): 30, (1, 0): 216, (0, 2): 81},
    4: {(5, 0): 1, (3, 1): 60, (2, 0): 756, (1, 2): 576, (0, 1): 5184},
}


@dataclass(frozen=True)
class QESCondition:
    N: int
    beta_required: float
    constraint_poly: dict

    def __call__(self, alpha: float, gamma: float) -> float:
        return eval_bivariate(self.constraint_poly, alpha, gamma)

    def gamma_poly(self, alpha: float) -> np.ndarray:
        """Coefficients (low to high) of the constraint as a polynomial in gamma at fixed alpha."""
        deg = max(j for (_, j) in self.constraint_poly)
        c = np.zeros(deg + 1)
        for (i, j), v in self.constraint_poly.items():
            c[j] += float(v) * alpha**i
        return c


@dataclass(frozen=True)
class HeunPolynomial:
    N: int
    coeffs: np.ndarray  # w_0..w_N, low to high, w_N = 1
    params: CanonicalParams

    def __call__(self, rho):
        return P.polyval(rho, self.coeffs)

    def derivs(self, rho):
        c1 = P.polyder(self.coeffs)
        c2 = P.polyder(self.coeffs, 2)
        return P.polyval(rho, self.coeffs), P.polyval(rho, c1), P.polyval(rho, c2)

    def ode_residual_coeffs(self) -> np.ndarray:
        """Coefficients of p'' - (gamma + 3 rho^2) p' + (alpha + (beta - 3) rho) p."""
        a, b, g = self.params.abg
        p = self.coeffs
        out = P.polyadd(P.polyder(p, 2), -P.polymul([g, 0.0, 3.0], P.polyder(p)))
        return P.polyadd(out, P.polymul([a, b - 3.0], p))


def eval_bivariate(poly: dict, alpha: float, gamma: float) -> float:
    return sum(float(c) * alpha**i * gamma**j for (i, j), c in poly.items())


def energy_eigenvalue(a1: float, b1: float, N: int) -> float:
    """E_N = (3(N+1) - a1) / b1."""
    if b1 == 0:
        raise QuasiExactUnavailable("b1 = 0: the QES energy formula needs b1 != 0")
    return (3.0 * (N + 1) - a1) / b1


def _entry(N: int, i: int, j: int, alpha, gamma):
    if j == i - 1:
        return 3 * (N + 1 - i)
    if j == i:
        return alpha
    if j == i + 1:
        if isinstance(gamma, dict):
            return {k: -(i + 1) * v for k, v in gamma.items()}
        return -(i + 1) * gamma
    if j == i + 2:
        return (i + 1) * (i + 2)
    return 0


def qes_matrix(params: CanonicalParams, N: int) -> np.ndarray:
    a, _, g = params.abg
    return np.array([[float(_entry(N, i, j, a, g)) for j in range(N + 1)] for i in range(N + 1)])


def _minors(N: int, alpha, gamma, mul, add, one):
    """Leading principal minors of D_{N+1} by the banded Hessenberg recurrence."""
    D = [one]
    for k in range(1, N + 2):
        i = k - 1
        v = mul(_entry(N, i, i, alpha, gamma), D[k - 1])
        if k >= 2:
            t = mul(mul(_entry(N, i - 1, i, alpha, gamma), _entry(N, i, i - 1, alpha, gamma)), D[k - 2])
            v = add(v, mul(-1, t))
        if k >= 3:
            t = mul(
                mul(mul(_entry(N, i - 2, i, alpha, gamma), _entry(N, i - 1, i - 2, alpha, gamma)),
                    _entry(N, i, i - 1, alpha, gamma)),
                D[k - 3],
            )
            v = add(v, t)
        D.append(v)
    return D


# sparse bivariate polynomials in (alpha, gamma) with exact rational coefficients
def _bp(x):
    if isinstance(x, dict):
        return x
    return {(0, 0): Fraction(x)} if x != 0 else {}


def _bp_add(x, y):
    x, y = _bp(x), _bp(y)
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + v
        if out[k] == 0:
            del out[k]
    return out


def _bp_mul(x, y):
    x, y = _bp(x), _bp(y)
    out: dict = {}
    for (i1, j1), v1 in x.items():
        for (i2, j2), v2 in y.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, 0) + v1 * v2
    return {k: v for k, v in out.items() if v != 0}


def determinant_polynomial(N: int) -> dict:
    """det D_{N+1} as an exact polynomial in (alpha, gamma)."""
    alpha = {(1, 0): Fraction(1)}
    gamma = {(0, 1): Fraction(1)}
    return _minors(N, alpha, gamma, _bp_mul, _bp_add, {(0, 0): Fraction(1)})[-1]


def qes_constraint(N: int) -> QESCondition:
    if N < 0 or N > N_CAP:
        raise ValueError(f"N must be in [0, {N_CAP}]")
    poly = TABULATED[N] if N in TABULATED else determinant_polynomial(N)
    return QESCondition(N, 3.0 * (N + 1), dict(poly))


def _check_beta(params: CanonicalParams, N: int) -> None:
    if abs(params.beta - 3.0 * (N + 1)) > BETA_TOL * max(1.0, abs(params.beta)):
        raise BetaMismatch(f"beta={params.beta} but degree {N} needs beta={3 * (N + 1)}")


def determinant_condition(params: CanonicalParams, N: int) -> float:
    """det D_{N+1}(alpha, gamma); zero iff a degree-N polynomial solution exists."""
    _check_beta(params, N)
    a, _, g = params.abg
    return float(_minors(N, a, g, lambda x, y: x * y, lambda x, y: x + y, 1.0)[-1])


def _back_substitute(params: CanonicalParams, N: int) -> tuple[np.ndarray, float, float]:
    a, _, g = params.abg
    w = np.zeros(N + 3)
    w[N] = 1.0
    for n in range(N, 0, -1):
        w[n - 1] = -(a * w[n] - g * (n + 1) * w[n + 1] + (n + 1) * (n + 2) * w[n + 2]) / (3.0 * (N + 1 - n))
    row0 = a * w[0] - g * w[1] + 2.0 * w[2]
    scale = abs(a * w[0]) + abs(g * w[1]) + 2.0 * abs(w[2])
    return w[: N + 1], row0, scale


def build_polynomial(params: CanonicalParams, N: int, rtol: float = 1e-8) -> HeunPolynomial:
    """Monic degree-N solution on the constraint curve."""
    _check_beta(params, N)
    w, row0, scale = _back_substitute(params, N)
    if abs(row0) > rtol * max(scale, 1.0):
        raise NoNontrivialSolution(f"first recurrence row leaves residual {row0:.3e}; det D_{N + 1} is not zero")
    if w[N] == 0:
        raise NormalizationError("leading coefficient vanished")
    return HeunPolynomial(N, w, params)


def w_sequence(params: CanonicalParams, n_max: int, initial: tuple[float, float] | None = None) -> np.ndarray:
    """w_0..w_{n_max} of the third-order difference equation.

    Default start w0 = 1, w1 = gamma, w2 = (gamma^2 - alpha)/2. A custom
    ``initial=(w0, w1)`` keeps the coupling w2 = (gamma w1 - alpha w0)/2 from the
    first recurrence row.
    """
    a, b, g = params.abg
    if initial is None:
        w0, w1 = 1.0, g
    else:
        w0, w1 = map(float, initial)
    w2 = (g * w1 - a * w0) / 2.0
    return _accel.w_recurrence(a, b, g, w0, w1, w2, int(n_max))


def constraint_gammas(N: int, alpha: float) -> list[float]:
    """Real gamma values with (alpha, gamma) on the degree-N constraint curve."""
    cond = qes_constraint(N)
    c = cond.gamma_poly(alpha)
    c = np.trim_zeros(c, "b")
    if len(c) <= 1:
        return []
    roots = P.polyroots(c)
    out = []
    for z in roots:
        if abs(z.imag) <= 1e-9 * max(1.0, abs(z)):
            gam = float(z.real)
            # polish by Newton on the real polynomial
            dc = P.polyder(c)
            for _ in range(3):
                d = P.polyval(gam, dc)
                if d == 0:
                    break
                gam -= P.polyval(gam, c) / d
            out.append(gam)
    return sorted(out)


def on_curve(N: int, alpha: float, root: int = 0, gamma: float = 0.0) -> CanonicalParams:
    """Canonical parameters on the degree-N curve with the given alpha.

    For N = 0 the curve is alpha = 0 and ``gamma`` is free.
    """
    if N == 0:
        if alpha != 0:
            raise ValueError("degree 0 requires alpha = 0")
        return CanonicalParams.from_abg(0.0, 3.0, gamma)
    gams = constraint_gammas(N, alpha)
    if not gams:
        raise NoNontrivialSolution(f"no real gamma on the N={N} curve at alpha={alpha}")
    return CanonicalParams.from_abg(alpha, 3.0 * (N + 1), gams[root % len(gams)])


def _w0_on_branch(N: int, alpha: float, k: int) -> float:
    gams = constraint_gammas(N, alpha)
    if k >= len(gams):
        return math.nan
    w, _, _ = _back_substitute(CanonicalParams.from_abg(alpha, 3.0 * (N + 1), gams[k]), N)
    return float(w[0])


def vanishing_constant_points(N: int, alpha_range: tuple[float, float] = (-12.0, 12.0), samples: int = 481) -> list[CanonicalParams]:
    """Curve points whose polynomial has p(0) = 0.

    These polynomials vanish at the origin of rho, which selects the recessive
    branch of the radial problem when rho is proportional to r^(2/3).
    """
    if N == 0:
        return []
    out = []
    alphas = np.linspace(*alpha_range, samples)
    n_branches = max(j for (_, j) in qes_constraint(N).constraint_poly)
    for k in range(n_branches):
        vals = [_w0_on_branch(N, a, k) for a in alphas]
        for a0, a1, f0, f1 in zip(alphas, alphas[1:], vals, vals[1:]):
            if math.isnan(f0) or math.isnan(f1):
                continue
            if f0 == 0:
                root = a0
            elif f0 * f1 < 0 and abs(f0) + abs(f1) < 1e6:
                try:
                    root = brentq(lambda a: _w0_on_branch(N, a, k), a0, a1, xtol=1e-14)
                except ValueError:
                    continue
            else:
                continue
            g = constraint_gammas(N, root)
            if k < len(g):
                out.append(CanonicalParams.from_abg(root, 3.0 * (N + 1), g[k]))
    return out
