"""Supersymmetric factorization of L_T = -d^2/drho^2 + Omega(rho).

With v = e^f T1(alpha, beta, gamma; rho) + c1 e^-f T1(alpha, -beta, gamma; -rho)
and f = -gamma rho/2 - rho^3/2, both terms solve L_T v = 0, and
W = v'/v = (1/6) [e^f F(rho) - c1 e^-f F~(-rho)] / [e^f T1 + c1 e^-f T1~(-rho)]
with F = -3 (gamma + 3 rho^2) T1 + 6 T1'. Then W' + W^2 = Omega and
L_T = (d + W)(-d + W).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import NodeSingularity
from .oracle import integrate_ode, spectrum_of_sampled
from .series import DEFAULT_ORDER, CanonicalParams, SeriesSolution, eval_series_derivs, t1_coeffs

NODE_EXCLUSION = 1e-3


@dataclass
class Superpotential:
    params: CanonicalParams
    c1: float = 0.0
    series_order: int = DEFAULT_ORDER
    domain: tuple[float, float] = (-1.5, 1.5)
    _t1: SeriesSolution = field(init=False, repr=False)
    _t1m: SeriesSolution = field(init=False, repr=False)
    _nodes: list | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        a, b, g = self.params.abg
        self._t1 = t1_coeffs(self.params, self.series_order)
        self._t1m = t1_coeffs(CanonicalParams.from_abg(a, -b, g), self.series_order)

    def omega(self, rho):
        return self.params.omega(rho)

    def f(self, rho: float) -> float:
        return -0.5 * self.params.gamma * rho - 0.5 * rho**3

    # ---- pieces, all scaled by e^-f to keep magnitudes moderate
    def _parts(self, rho: float):
        """(D, D', D'', N) with v = e^f D, v' = e^f D', v'' = e^f D'' and N = 6 D'."""
        g = self.params.gamma
        fp = -0.5 * (g + 3.0 * rho * rho)
        fpp = -3.0 * rho
        t, dt, d2t = eval_series_derivs(self._t1, rho)
        if self.c1:
            u, du, d2u = eval_series_derivs(self._t1m, -rho)
            k = self.c1 * math.exp(-2.0 * self.f(rho))
        else:
            u = du = d2u = 0.0
            k = 0.0
        # v = e^f t + c1 e^-f u(-rho) = e^f [t + k u]
        F = -3.0 * (g + 3.0 * rho * rho) * t + 6.0 * dt
        Ft = -3.0 * (g + 3.0 * rho * rho) * u + 6.0 * du  # F~ evaluated at -rho
        D = t + k * u
        N = F - k * Ft
        # derivatives of e^f t and e^-f u(-rho), divided by e^f
        v1p = fp * t + dt
        v1pp = (fpp + fp * fp) * t + 2.0 * fp * dt + d2t
        v2p = k * (-fp * u - du)
        v2pp = k * ((-fpp + fp * fp) * u + 2.0 * fp * du + d2u)
        return D, v1p + v2p, v1pp + v2pp, N

    def nodes(self) -> list[float]:
        """Zeros of the denominator on ``domain`` (sign changes on a refinement grid)."""
        if self._nodes is None:
            lo, hi = self.domain
            xs = np.linspace(lo, hi, 1201)
            ds = [self._parts(x)[0] for x in xs]
            out = []
            for x0, x1, d0, d1 in zip(xs, xs[1:], ds, ds[1:]):
                if d0 == 0:
                    out.append(float(x0))
                elif d0 * d1 < 0:
                    out.append(brentq(lambda x: self._parts(x)[0], x0, x1, xtol=1e-14))
            self._nodes = out
        return self._nodes

    def _guard(self, rho: float, D: float, scale: float) -> None:
        if D == 0 or abs(D) <= 1e-14 * scale:
            raise NodeSingularity(f"denominator vanishes at rho={rho}")
        lo, hi = self.domain
        if lo <= rho <= hi:
            for x in self.nodes():
                if abs(rho - x) < NODE_EXCLUSION:
                    raise NodeSingularity(f"rho={rho} within {NODE_EXCLUSION} of the node at {x}")

    def value(self, rho: float) -> float:
        rho = float(rho)
        D, Dp, _, N = self._parts(rho)
        self._guard(rho, D, abs(N) + 1.0)
        return N / (6.0 * D)

    def value_and_derivative(self, rho: float) -> tuple[float, float]:
        rho = float(rho)
        D, Dp, Dpp, N = self._parts(rho)
        self._guard(rho, D, abs(N) + 1.0)
        W = N / (6.0 * D)
        # W = v'/v, so W' = v''/v - W^2 with v''/v = Dpp/D after the common e^f cancels
        return W, Dpp / D - W * W

    def __call__(self, rho: float) -> float:
        return self.value(rho)


def superpotential(w: Superpotential, rho: float) -> float:
    return w.value(rho)


def riccati_residual(w: Superpotential, rho: float) -> float:
    """W' + W^2 - Omega with W' from differentiated series."""
    W, dW = w.value_and_derivative(rho)
    return dW + W * W - w.omega(rho)


def partner_potentials(w: Superpotential, rho: float) -> tuple[float, float]:
    """(V-, V+) = (W^2 - W', W^2 + W')."""
    W, dW = w.value_and_derivative(rho)
    return W * W - dW, W * W + dW


def zero_mode_residual(w: Superpotential, rho: float) -> float:
    """(L_T v)/|v| for v = e^f T1 + c1 e^-f T1~, scaled by 1 + |Omega|."""
    D, _, Dpp, _ = w._parts(rho)
    # L_T v = -v'' + Omega v; common factor e^f removed
    return (-Dpp + w.omega(rho) * D) / ((1.0 + abs(w.omega(rho))) * max(abs(D), 1e-300))


def factorization_residual(w: Superpotential, rho: float) -> float:
    """(d + W)(-d + W) phi - L_T phi for phi = e^f T1, relative to |L_T phi| + |phi|.

    Expanded, (d + W)(-d + W) phi = -phi'' + (W' + W^2) phi; W and W' come
    from the series, the left side is compared against -phi'' + Omega phi.
    """
    W, dW = w.value_and_derivative(rho)
    g = w.params.gamma
    fp = -0.5 * (g + 3.0 * rho * rho)
    fpp = -3.0 * rho
    t, dt, d2t = eval_series_derivs(w._t1, rho)
    phi = t
    phi_pp = (fpp + fp * fp) * t + 2.0 * fp * dt + d2t
    lhs = -phi_pp + (dW + W * W) * phi
    rhs = -phi_pp + w.omega(rho) * phi
    return abs(lhs - rhs) / (abs(rhs) + abs(phi) + abs(phi_pp))


def parity_residual(params: CanonicalParams, rho: float, c1: float = 0.0) -> float:
    """W(-rho; alpha, beta) + W(rho; alpha, -beta) for gamma = 0."""
    if params.gamma != 0:
        raise ValueError("the parity relation holds for gamma = 0")
    a, b, _ = params.abg
    w1 = Superpotential(params, c1)
    w2 = Superpotential(CanonicalParams.from_abg(a, -b, 0.0), c1)
    return w1(-rho) + w2(rho)


@dataclass(frozen=True)
class GroundStateReport:
    nodes: tuple
    normalizable: bool
    tail_ratio: float
    lowest_h_minus: float | None
    unbroken_indicated: bool | None
    interval: tuple


def _riccati_branch(w: Superpotential, start: float, W0: float, stop: float):
    """Integrate W' = Omega - W^2 from ``start`` toward ``stop``."""
    tr = integrate_ode(lambda x, z: [w.omega(x) - z[0] ** 2], [W0], (start, stop), 1e-11)
    return tr


def ground_state_energy_check(w: Superpotential, domain: tuple[float, float] = (-4.0, 4.0), h: float = 2e-3) -> GroundStateReport:
    """Numerical evidence on whether H- = -d^2 + W^2 - W' has a zero-energy ground state.

    The candidate zero mode is 1/v = exp(-int W). W is continued to the whole
    interval by integrating the Riccati equation from rho = 0, then
    V- = 2 W^2 - Omega is handed to the Dirichlet shooting solver.
    """
    lo, hi = domain
    nodes = tuple(_all_nodes(w, lo, hi))
    if nodes:
        return GroundStateReport(nodes, False, math.inf, None, False, (lo, hi))
    W0 = w.value(0.0)
    right = _riccati_branch(w, 0.0, W0, hi)
    left = _riccati_branch(w, 0.0, W0, lo)

    def W_of(x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, right.sol(np.clip(x, 0, hi))[0], left.sol(np.clip(x, lo, 0))[0])

    # log|1/v| = -int_0^x W
    xs = np.linspace(lo, hi, 4001)
    Ws = W_of(xs)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (Ws[1:] + Ws[:-1]) * np.diff(xs))])
    i0 = int(np.argmin(np.abs(xs)))
    logz = -(cum - cum[i0])
    tail_ratio = float(math.exp(max(logz[0], logz[-1]) - np.max(logz)))
    normalizable = tail_ratio < 1e-8
    vminus = lambda x: 2.0 * W_of(x) ** 2 - w.omega(np.asarray(x))  # noqa: E731
    lowest = spectrum_of_sampled(vminus, lo, hi, 1, h)[0]
    unbroken = abs(lowest) < 1e-4
    return GroundStateReport(nodes, normalizable, tail_ratio, lowest, unbroken, (lo, hi))


def _all_nodes(w: Superpotential, lo: float, hi: float) -> list[float]:
    """Poles of W on [lo, hi]: zeros of v from the normal-form integration."""
    a = w.params
    D0, Dp0, _, _ = w._parts(0.0)
    # v = e^f D; v(0) = D0, v'(0) = Dp0 (e^f = 1 at 0)
    out = []
    for stop in (lo, hi):
        tr = integrate_ode(lambda x, z: [z[1], a.omega(x) * z[0]], [D0, Dp0], (0.0, stop), 1e-11)
        ys = tr.y[0]
        for i in range(len(ys) - 1):
            if ys[i] * ys[i + 1] < 0:
                out.append(float(brentq(lambda x: tr.sol(x)[0], tr.t[i], tr.t[i + 1])))
    return sorted(out)
