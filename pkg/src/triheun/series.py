"""Canonical triconfluent Heun form and its Taylor solutions.

The canonical equation is

    y'' - (gamma + 3 rho^2) y' + [alpha + (beta - 3) rho] y = 0,

reached from v'' + (A0 + A1 rho + A2 rho^2 - 9/4 rho^4) v = 0 through
v = exp(A2 rho / 3 - rho^3 / 2) y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _accel
from .errors import TruncationError
from .maps import CoordinateMap, HeunSixParams, inverse_map

SERIES_EPS = 1e-16
HARD_CAP = 500
DEFAULT_ORDER = 120


@dataclass(frozen=True)
class CanonicalParams:
    A0: float
    A1: float
    A2: float
    alpha: float
    beta: float
    gamma: float
    energy_split: Optional[tuple] = None

    @classmethod
    def from_abg(cls, alpha: float, beta: float, gamma: float) -> "CanonicalParams":
        A2 = -1.5 * gamma
        return cls(alpha - A2 * A2 / 9.0, beta, A2, float(alpha), float(beta), float(gamma))

    @classmethod
    def from_six(cls, params: HeunSixParams, E: float) -> "CanonicalParams":
        A0, A1, A2 = params.canonical_A(E)
        c = canonicalize(A0, A1, A2)
        return replace(c, energy_split=(params.as_tuple(), float(E)))

    def with_beta(self, beta: float) -> "CanonicalParams":
        return CanonicalParams.from_abg(self.alpha, beta, self.gamma)

    @property
    def abg(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)

    def omega(self, rho):
        """-A0 - A1 rho - A2 rho^2 + 9/4 rho^4, i.e. minus the Bose invariant."""
        return -self.A0 - self.A1 * rho - self.A2 * rho**2 + 2.25 * rho**4

    def prefactor_exponent(self, rho):
        """A2 rho/3 - rho^3/2 (equals -gamma rho/2 - rho^3/2)."""
        return self.A2 * rho / 3.0 - 0.5 * rho**3


def canonicalize(A0: float, A1: float, A2: float) -> CanonicalParams:
    alpha = A0 + A2 * A2 / 9.0
    beta = A1
    gamma = -2.0 * A2 / 3.0
    return CanonicalParams(float(A0), float(A1), float(A2), alpha, beta, gamma)


@dataclass(frozen=True)
class SeriesSolution:
    """Truncated coefficient stream. ``shift`` is 0 for T1 and 1 for T2."""

    kind: str
    coeffs: np.ndarray
    params: CanonicalParams

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def shift(self) -> int:
        return 1 if self.kind == "T2" else 0

    def __call__(self, rho: float) -> float:
        return eval_series(self, rho)


def t1_coeffs(params: CanonicalParams, n_max: int = DEFAULT_ORDER) -> SeriesSolution:
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    a, b, g = params.abg
    return SeriesSolution("T1", _accel.t1_coefficients(a, b, g, int(n_max)), params)


def t2_coeffs(params: CanonicalParams, n_max: int = DEFAULT_ORDER) -> SeriesSolution:
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    a, b, g = params.abg
    return SeriesSolution("T2", _accel.t2_coefficients(a, b, g, int(n_max)), params)


def _regenerate(s: SeriesSolution, n_max: int) -> SeriesSolution:
    if s.kind == "T1":
        return t1_coeffs(s.params, n_max)
    if s.kind == "T2":
        return t2_coeffs(s.params, n_max)
    return s


def eval_series_derivs(s: SeriesSolution, rho: float) -> tuple[float, float, float]:
    """(y, y', y'') at rho from term-wise differentiated series."""
    rho = float(rho)
    val, d1, d2, _, ok = _accel.series_eval(s.coeffs, s.shift, rho, SERIES_EPS)
    if ok:
        return val, d1, d2
    if s.order < HARD_CAP and s.kind in ("T1", "T2"):
        s = _regenerate(s, HARD_CAP)
        val, d1, d2, _, ok = _accel.series_eval(s.coeffs, s.shift, rho, SERIES_EPS)
        if ok:
            return val, d1, d2
    raise TruncationError(f"{s.kind} series not converged at rho={rho} within {s.order + 1} terms")


def eval_series(s: SeriesSolution, rho: float) -> float:
    return eval_series_derivs(s, rho)[0]


def ode_residual(params: CanonicalParams, y: float, dy: float, d2y: float, rho: float) -> float:
    return d2y - (params.gamma + 3.0 * rho * rho) * dy + (params.alpha + (params.beta - 3.0) * rho) * y


def wronskian(params: CanonicalParams, rho: float, n_max: int = DEFAULT_ORDER) -> float:
    y1, d1, _ = eval_series_derivs(t1_coeffs(params, n_max), rho)
    y2, d2, _ = eval_series_derivs(t2_coeffs(params, n_max), rho)
    return y1 * d2 - d1 * y2


def assemble_wavefunction(
    params: HeunSixParams,
    E: float,
    cmap: CoordinateMap,
    combo: tuple[float, float],
    r: float,
    n_max: int = DEFAULT_ORDER,
) -> float:
    """psi(r) = I1^(1/4) exp(A2 rho/3 - rho^3/2) [c1 T1(rho) + c2 T2(rho)], rho = rho(r)."""
    c1, c2 = combo
    rho = inverse_map(cmap, r)
    if c1 == 0 and c2 == 0:
        return 0.0
    cp = CanonicalParams.from_six(params, E)
    y = 0.0
    if c1:
        y += c1 * eval_series(t1_coeffs(cp, n_max), rho)
    if c2:
        y += c2 * eval_series(t2_coeffs(cp, n_max), rho)
    i1 = max(params.i1(rho), 0.0)
    return i1**0.25 * math.exp(cp.prefactor_exponent(rho)) * y


class Wavefunction:
    """Callable psi(r) with the coefficient streams built once."""

    def __init__(self, params: HeunSixParams, E: float, cmap: CoordinateMap, combo, n_max: int = DEFAULT_ORDER):
        self.params = params
        self.E = float(E)
        self.cmap = cmap
        self.c1, self.c2 = combo
        self.cp = CanonicalParams.from_six(params, E)
        self._t1 = t1_coeffs(self.cp, n_max)
        self._t2 = t2_coeffs(self.cp, n_max)

    def y(self, rho: float) -> float:
        out = 0.0
        if self.c1:
            out += self.c1 * eval_series(self._t1, rho)
        if self.c2:
            out += self.c2 * eval_series(self._t2, rho)
        return out

    def of_rho(self, rho: float) -> float:
        i1 = max(self.params.i1(rho), 0.0)
        return i1**0.25 * math.exp(self.cp.prefactor_exponent(rho)) * self.y(rho)

    def __call__(self, r: float) -> float:
        return self.of_rho(inverse_map(self.cmap, r))


def prefactor(params: HeunSixParams, E: float, cmap: CoordinateMap, r: float) -> float:
    """The factor multiplying y in the assembled wavefunction."""
    rho = inverse_map(cmap, r)
    cp = CanonicalParams.from_six(params, E)
    return max(params.i1(rho), 0.0) ** 0.25 * math.exp(cp.prefactor_exponent(rho))


def reflection_identity_residual(params: CanonicalParams, rho: float, n_max: int = DEFAULT_ORDER) -> float:
    """gamma T2(a,b,g;rho) + T1(a,b,g;rho) - exp(rho^3 + gamma rho) T1(a,-b,g;-rho)."""
    a, b, g = params.abg
    lhs = g * eval_series(t2_coeffs(params, n_max), rho) + eval_series(t1_coeffs(params, n_max), rho)
    mirrored = CanonicalParams.from_abg(a, -b, g)
    rhs = math.exp(rho**3 + g * rho) * eval_series(t1_coeffs(mirrored, n_max), -rho)
    return lhs - rhs
