"""Independent numerical checks: adaptive integration, finite differences and shooting.

Nothing here uses the Taylor series, the recurrence or the closed forms, so
every comparison against those modules is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.special import gamma as gamma_fn

from . import _accel
from .errors import ConvergenceError, CutoffTooSmall, StepUnderflow
from .maps import CoordinateMap, inverse_map
from .series import CanonicalParams

TOL_RANGE = (1e-13, 1e-6)


# ------------------------------------------------------------------ integration


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    sol: Callable

    def __call__(self, t):
        return self.sol(t)


def integrate_ode(rhs, y0: Sequence[float], span: tuple[float, float], tol: float = 1e-11, dense: bool = True) -> Trajectory:
    """DOP853 integration with rtol = atol = tol (tol limited to [1e-13, 1e-6])."""
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise ValueError(f"tol={tol} outside {TOL_RANGE}")
    res = solve_ivp(rhs, span, np.asarray(y0, dtype=float), method="DOP853", rtol=tol, atol=tol, dense_output=dense)
    if res.status != 0:
        msg = res.message or ""
        if "step size" in msg.lower():
            raise StepUnderflow(msg)
        raise ConvergenceError(msg)
    return Trajectory(res.t, res.y, res.sol)


def canonical_rhs(params: CanonicalParams):
    """y'' = (gamma + 3 rho^2) y' - (alpha + (beta - 3) rho) y as a first-order system."""
    a, b, g = params.abg

    def rhs(rho, z):
        return [z[1], (g + 3.0 * rho * rho) * z[1] - (a + (b - 3.0) * rho) * z[0]]

    return rhs


def normal_form_rhs(params: CanonicalParams):
    """v'' = Omega(rho) v."""

    def rhs(rho, z):
        return [z[1], params.omega(rho) * z[0]]

    return rhs


def integrate_canonical(params: CanonicalParams, y0: float, dy0: float, rho: float, tol: float = 1e-12) -> tuple[float, float]:
    """(y, y') at rho from initial data at 0."""
    if rho == 0:
        return float(y0), float(dy0)
    tr = integrate_ode(canonical_rhs(params), [y0, dy0], (0.0, float(rho)), tol, dense=False)
    return float(tr.y[0, -1]), float(tr.y[1, -1])


# ------------------------------------------------------------------ finite differences


@dataclass(frozen=True)
class OracleReport:
    residual_max: float
    grid: str
    comparison: tuple | None = None
    passed: bool | None = None
    detail: dict = field(default_factory=dict)


def fd_second(fn, x: float, h: float) -> float:
    """Fourth-order central second derivative."""
    return (-fn(x + 2 * h) + 16.0 * fn(x + h) - 30.0 * fn(x) + 16.0 * fn(x - h) - fn(x - 2 * h)) / (12.0 * h * h)


def fd_residual(psi, potential, E: float, grid, convention: str = "sh1", h=None) -> OracleReport:
    """max |psi'' + s (E - V) psi| / max |psi| over ``grid``.

    The step ``h`` is a number, a callable of x, or None for 1e-3 |x|
    (relative, since the potentials blow up like r^-2 at the origin).

    ``convention="sh1"`` takes s = +1 (psi'' + (E - V) psi = 0); ``"h0"`` takes
    s = -1 (psi'' + (V - E) psi = 0).
    """
    if convention not in ("sh1", "h0"):
        raise ValueError("convention must be 'sh1' or 'h0'")
    s = 1.0 if convention == "sh1" else -1.0
    grid = np.asarray(grid, dtype=float)
    vals = np.array([abs(psi(x)) for x in grid])
    scale = float(np.max(vals)) if np.max(vals) > 0 else 1.0
    worst = 0.0
    for x in grid:
        if h is None:
            hx = 1e-3 * max(abs(x), 0.03)
        else:
            hx = h(x) if callable(h) else h
        d2 = fd_second(psi, x, hx)
        res = abs(d2 + s * (E - potential(x)) * psi(x))
        worst = max(worst, res)
    return OracleReport(
        worst / scale, f"{len(grid)} points in [{grid.min():.6g}, {grid.max():.6g}]", detail={"convention": convention}
    )


def fd_schwarzian(cmap: CoordinateMap, r: float, h: float | None = None) -> float:
    """rho'''/rho' - 3/2 (rho''/rho')^2 from central differences of the inverse map."""
    r = float(r)
    if h is None:
        h = 1e-3 * max(r, 1e-3) if r < 1.0 else 1e-3 * r**0.5
    f = lambda x: inverse_map(cmap, x)  # noqa: E731
    fm2, fm1, f0, fp1, fp2 = f(r - 2 * h), f(r - h), f(r), f(r + h), f(r + 2 * h)
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    d3 = (-fm2 + 2 * fm1 - 2 * fp1 + fp2) / (2 * h**3)
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def fd_map_derivative(cmap: CoordinateMap, r: float, h: float | None = None) -> float:
    """d rho / d r by a fourth-order central difference."""
    if h is None:
        h = 1e-4 * max(r, 1e-2)
    f = lambda x: inverse_map(cmap, x)  # noqa: E731
    return (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h)


# ------------------------------------------------------------------ shooting on the line


def quartic_level_constant() -> float:
    """3 Gamma(3/4)^2 / sqrt(2 pi)."""
    return 3.0 * gamma_fn(0.75) ** 2 / math.sqrt(2.0 * math.pi)


def quartic_level_estimate(n: float, quartic: float = 1.0) -> float:
    """Large-n approximation of the n-th level of -v'' + quartic * rho^4 v.

    For unit quartic coefficient this is [3 Gamma(3/4)^2 / sqrt(2 pi) n]^(4/3);
    rescaling rho turns a general coefficient into the factor quartic^(1/3).
    """
    return quartic ** (1.0 / 3.0) * (quartic_level_constant() * n) ** (4.0 / 3.0)


@dataclass(frozen=True)
class ShootingProblem:
    """-v'' + P(rho) v = E v on [-L, L] with P = q rho^4 - a2 rho^2 - a1 rho - a0, q = 9/4 by default."""

    a0: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    L: float | None = None
    h: float = 2e-3
    quartic: float = 2.25

    def P(self, rho):
        return self.quartic * rho**4 - self.a2 * rho**2 - self.a1 * rho - self.a0

    @property
    def potential(self):
        return self.P


def _tail_action(P, E: float, start: float, stop: float, n: int = 400) -> float:
    xs = np.linspace(start, stop, n)
    k = np.sqrt(np.maximum(P(xs) - E, 0.0))
    trap = np.trapezoid if hasattr(np, "trapezoid") else np.trapz
    return abs(float(trap(k, xs)))


def choose_cutoff(P, E_max: float, action: float = 40.0) -> tuple[float, float]:
    """(left, right) cutoffs with P >= 3 E_max and a WKB tail action of at least ``action``."""
    target = 3.0 * max(E_max, 1.0)
    out = []
    for sgn in (-1.0, 1.0):
        x = 1.0
        while P(sgn * x) < target or _tail_action(P, E_max, sgn * _turning(P, E_max, sgn), sgn * x) < action:
            x *= 1.1
            if x > 1e3:
                raise CutoffTooSmall("could not place the cutoff")
        out.append(sgn * x)
    return out[0], out[1]


def _turning(P, E: float, sgn: float) -> float:
    x = 0.0
    step = 0.05
    while P(sgn * x) < E:
        x += step
    return x


def _nodes(kk: np.ndarray, h: float) -> int:
    return int(_accel.numerov_nodes(kk, h)[0])


@dataclass(frozen=True)
class ShootingGrid:
    x: np.ndarray
    Pv: np.ndarray
    h: float
    m: int


def make_grid(P, lo: float, hi: float, h: float) -> ShootingGrid:
    n = int(math.ceil((hi - lo) / h)) + 1
    x = np.linspace(lo, hi, n)
    Pv = np.asarray(P(x), dtype=float)
    m = int(np.argmin(Pv))
    m = min(max(m, 2), n - 3)
    return ShootingGrid(x, Pv, float(x[1] - x[0]), m)


def eigenvalues_on_grid(g: ShootingGrid, n_levels: int, E_floor: float | None = None) -> list[float]:
    """Lowest eigenvalues of -v'' + P v on the grid with Dirichlet ends.

    Levels are bracketed by the node count of the left sweep and then refined
    with brentq on the normalized matching Casoratian.
    """
    lo = float(np.min(g.Pv)) if E_floor is None else E_floor
    count = lambda E: _nodes(E - g.Pv, g.h)  # noqa: E731
    hi = lo + 1.0
    while count(hi) < n_levels:
        hi = lo + 2.0 * (hi - lo)
        if hi - lo > 1e12:
            raise ConvergenceError("could not bracket the requested levels")
    out = []
    for n in range(n_levels):
        a, b = lo, hi
        # narrow [a, b] by node-count bisection; the fixed number of halvings also
        # moves a off the previous level, which is itself a zero of the matching function
        for _ in range(200):
            if count(a) == n and count(b) == n + 1:
                break
            mid = 0.5 * (a + b)
            if count(mid) <= n:
                a = mid
            else:
                b = mid
        for _ in range(20):
            mid = 0.5 * (a + b)
            if count(mid) <= n:
                a = mid
            else:
                b = mid
        f = lambda E: _accel.numerov_match(E - g.Pv, g.h, g.m)  # noqa: E731
        fa, fb = f(a), f(b)
        if fa * fb > 0:
            for _ in range(200):
                mid = 0.5 * (a + b)
                if count(mid) <= n:
                    a = mid
                else:
                    b = mid
                if b - a < 1e-13 * max(1.0, abs(b)):
                    break
            out.append(0.5 * (a + b))
        else:
            out.append(brentq(f, a, b, xtol=1e-14, rtol=1e-15, maxiter=200))
        lo = out[-1]
    return out


def shoot_spectrum(problem: ShootingProblem, n_levels: int, check_cutoff: bool = False) -> list[float]:
    """First ``n_levels`` eigenvalues of the quartic boundary problem."""
    if n_levels < 1:
        return []
    P = problem.P
    guess = 1.5 * quartic_level_estimate(n_levels + 0.5, problem.quartic) + abs(problem.a0) + abs(problem.a2) ** 2 + abs(problem.a1) ** 1.33 + 5.0
    if problem.L is None:
        lo, hi = choose_cutoff(P, guess)
    else:
        lo, hi = -problem.L, problem.L
        if min(P(lo), P(hi)) < guess:
            raise CutoffTooSmall(f"P(+-L) = {min(P(lo), P(hi)):.4g} below the level estimate {guess:.4g}")
    levels = eigenvalues_on_grid(make_grid(P, lo, hi, problem.h), n_levels)
    if check_cutoff:
        wider = eigenvalues_on_grid(make_grid(P, 1.25 * lo, 1.25 * hi, problem.h), n_levels)
        if abs(wider[-1] - levels[-1]) > 1e-6 * max(1.0, abs(levels[-1])):
            raise CutoffTooSmall("top level moves when the cutoff grows")
    return levels


def spectrum_of_sampled(potential, lo: float, hi: float, n_levels: int, h: float = 2e-3) -> list[float]:
    """Dirichlet levels of -v'' + V v on [lo, hi] for an arbitrary vectorized V."""
    return eigenvalues_on_grid(make_grid(potential, lo, hi, h), n_levels)


# ------------------------------------------------------------------ radial shooting


def frobenius_start(s: float, terms: dict, E: float, r0: float, kmax: int = 200) -> tuple[float, float]:
    """(psi, psi') at r0 for psi'' = (V - E) psi with V = sum_j c_j r^(p_j).

    ``terms`` maps an integer shift k (powers r^(-2 + 2k/3)) to its coefficient;
    the shift-0 entry is the r^-2 coefficient that fixes the exponent s. The
    energy enters through the shift-3 (constant) entry.
    """
    u = dict(terms)
    u[3] = u.get(3, 0.0) - E
    c = [1.0]
    for k in range(1, kmax):
        e = s + 2.0 * k / 3.0
        denom = e * (e - 1.0) - u.get(0, 0.0)
        rhs = sum(coef * c[k - j] for j, coef in u.items() if j > 0 and k - j >= 0)
        if abs(denom) < 1e-12:
            if abs(rhs) > 1e-12:
                raise ConvergenceError("logarithmic Frobenius case")
            c.append(0.0)
        else:
            c.append(rhs / denom)
    val = sum(ck * r0 ** (s + 2.0 * k / 3.0) for k, ck in enumerate(c))
    der = sum(ck * (s + 2.0 * k / 3.0) * r0 ** (s + 2.0 * k / 3.0 - 1.0) for k, ck in enumerate(c))
    return val, der


def radial_shoot(
    potential,
    frob_terms: dict,
    s: float,
    E_bracket: tuple[float, float],
    R: float,
    r0: float = 0.05,
    tol: float = 1e-12,
) -> float:
    """Eigenvalue in ``E_bracket`` of psi'' = (V(r) - E) psi, psi ~ r^s at 0, psi(R) = 0."""

    def end_value(E):
        y0 = frobenius_start(s, frob_terms, E, r0)
        rhs = lambda r, z: [z[1], (potential(r) - E) * z[0]]  # noqa: E731
        tr = integrate_ode(rhs, y0, (r0, R), tol, dense=False)
        return float(tr.y[0, -1] / max(1.0, np.max(np.abs(tr.y[0]))))

    a, b = E_bracket
    fa, fb = end_value(a), end_value(b)
    if fa * fb > 0:
        raise ConvergenceError(f"no sign change of psi(R) over E in {E_bracket}")
    return brentq(end_value, a, b, xtol=1e-12, rtol=1e-13)
