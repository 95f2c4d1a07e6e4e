"""Third-order difference equation for the w-coefficients and its asymptotics.

    w_{n+3} + pi1(n) w_{n+2} + pi2(n) w_{n+1} + pi3(n) w_n = 0,
    pi1 = -gamma/(n+3),  pi2 = alpha/((n+2)(n+3)),  pi3 = (beta - 3(n+1))/((n+2)(n+3)).

Solutions decay like (3e/n)^(n/3); the three formal Birkhoff series differ by
the cube roots of unity applied to n^(1/3).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import _accel
from .series import CanonicalParams

CBRT3 = 3.0 ** (1.0 / 3.0)
CBRT9 = 9.0 ** (1.0 / 3.0)
# Abel's formula W_n = sign^n * prod(...) * W_0 holds with sign = -1 per step,
# i.e. det A(n) = -pi3(n). Checked against direct determinants.
ABEL_SIGN = 1.0


def pis(params: CanonicalParams, n: int) -> tuple[float, float, float]:
    a, b, g = params.abg
    return (-g / (n + 3.0), a / ((n + 2.0) * (n + 3.0)), (b - 3.0 * (n + 1.0)) / ((n + 2.0) * (n + 3.0)))


def companion_matrix(params: CanonicalParams, n: int) -> np.ndarray:
    p1, p2, p3 = pis(params, n)
    return np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-p3, -p2, -p1]])


@dataclass(frozen=True)
class CompanionState:
    """Z_n = (w_n, w_{n+1}, w_{n+2}) times exp(log_scale)."""

    n: int
    Z: np.ndarray
    log_scale: float = 0.0

    @property
    def w(self) -> float:
        return float(self.Z[0]) * math.exp(self.log_scale)


def initial_state(params: CanonicalParams) -> np.ndarray:
    a, _, g = params.abg
    return np.array([1.0, g, (g * g - a) / 2.0])


def propagate(
    params: CanonicalParams,
    n_max: int,
    z0: Sequence[float] | None = None,
    rescale: bool = False,
) -> list[CompanionState]:
    """States Z_0..Z_{n_max} under Z_{n+1} = A(n) Z_n.

    Without rescaling the arithmetic is the same as the w-recurrence kernel, so
    the first components agree bitwise. With ``rescale`` each state is divided
    by its largest entry and the logarithm of the factor is carried separately,
    which keeps ratios meaningful long after the raw values underflow.
    """
    z = np.array(initial_state(params) if z0 is None else z0, dtype=float)
    a, b, g = params.abg
    states = [CompanionState(0, z.copy(), 0.0)]
    log_s = 0.0
    for n in range(n_max):
        pi1 = -g / (n + 3.0)
        pi2 = a / ((n + 2.0) * (n + 3.0))
        pi3 = (b - 3.0 * (n + 1.0)) / ((n + 2.0) * (n + 3.0))
        nxt = -pi1 * z[2] - pi2 * z[1] - pi3 * z[0]
        z = np.array([z[1], z[2], nxt])
        if rescale:
            m = float(np.max(np.abs(z)))
            if m > 0 and (m < 1e-100 or m > 1e100):
                z = z / m
                log_s += math.log(m)
        states.append(CompanionState(n + 1, z.copy(), log_s))
    return states


def log_abs_w(params: CanonicalParams, n_max: int, z0=None) -> tuple[np.ndarray, np.ndarray]:
    """(sign(w_n), log|w_n|) for n = 0..n_max, computed with rescaling."""
    states = propagate(params, n_max, z0, rescale=True)
    sign = np.array([np.sign(s.Z[0]) for s in states])
    with np.errstate(divide="ignore"):
        logs = np.array([math.log(abs(s.Z[0])) + s.log_scale if s.Z[0] != 0 else -np.inf for s in states])
    return sign, logs


def w_from_initial(params: CanonicalParams, z0: Sequence[float], n_max: int) -> np.ndarray:
    a, b, g = params.abg
    return _accel.w_recurrence(a, b, g, float(z0[0]), float(z0[1]), float(z0[2]), int(n_max))


def abel_prediction(params: CanonicalParams, n: int, W0: float = 1.0) -> float:
    """W_n = 2 (-1)^n (n+2) / ((n+2)!)^2 * prod_{k=1..n} (beta - 3k) * W_0."""
    b = params.beta
    # running ratio prod (beta - 3k) / ((n+2)!)^2; the factorial alone overflows a double near n = 170
    r = 0.25
    for k in range(1, n + 1):
        r *= (b - 3.0 * k) / ((k + 2.0) * (k + 2.0))
    sign = (-1.0) ** n * ABEL_SIGN**n
    return sign * 2.0 * (n + 2) * r * W0


def casoratian(params: CanonicalParams, solutions: Sequence[Sequence[float]], n: int) -> tuple[float, float]:
    """(direct Casorati determinant at n, Abel prediction scaled by the direct W_0)."""
    sols = [np.asarray(s, dtype=float) for s in solutions]
    if len(sols) != 3:
        raise ValueError("need three solutions")
    if any(len(s) < n + 3 for s in sols):
        raise ValueError(f"solutions must extend to index {n + 2}")
    M = np.array([[s[n + i] for s in sols] for i in range(3)])
    M0 = np.array([[s[i] for s in sols] for i in range(3)])
    W0 = float(np.linalg.det(M0))
    return float(np.linalg.det(M)), abel_prediction(params, n, W0)


def limit_check(params: CanonicalParams, n_max: int) -> float:
    """max |w_n| over the last tenth of 0..n_max (default initial data)."""
    a, b, g = params.abg
    w = _accel.w_recurrence(a, b, g, 1.0, g, (g * g - a) / 2.0, int(n_max))
    start = max(0, n_max - max(1, n_max // 10) + 1)
    return float(np.max(np.abs(w[start:])))


# ------------------------------------------------------------------ Birkhoff


@dataclass(frozen=True)
class BirkhoffExpansion:
    c1: float
    c2: float
    c3: float
    theta: float
    alpha1: float
    branch: int = 0
    mu0: float = -1.0 / 3.0
    lam: float = CBRT3
    rho_tilde: int = 3
    beta_tilde: float = 1.0 / 3.0
    variant: str = "corrected"

    def log_leading(self, n: float) -> complex:
        """log of (3e/n)^(n/3) n^theta e^{phase} e^{rotated gamma term}."""
        gamma = self.alpha1 * CBRT3
        base = (n / 3.0) * math.log(3.0 * math.e / n) + self.theta * math.log(n)
        g_term = gamma * (n / 3.0) ** (1.0 / 3.0)
        if self.branch == 0:
            return complex(base + g_term)
        if self.branch == 1:
            return base - 2j * math.pi * n / 3.0 - 0.5 * (1 - 1j * math.sqrt(3.0)) * g_term
        return base - 4j * math.pi * n / 3.0 - 0.5 * (1 + 1j * math.sqrt(3.0)) * g_term

    def correction(self, n: float, terms: int) -> complex:
        x = n ** (-1.0 / 3.0)
        s3 = math.sqrt(3.0)
        if self.branch == 0:
            k1, k2 = 1.0, 1.0
        elif self.branch == 1:
            k1, k2 = -(1 + 1j * s3) / 2, -(1 - 1j * s3) / 2
        else:
            k1, k2 = -(1 - 1j * s3) / 2, -(1 + 1j * s3) / 2
        out = 1.0 + 0j
        if terms >= 1:
            out += k1 * self.c1 * x
        if terms >= 2:
            out += k2 * self.c2 * x * x
        if terms >= 3:
            out += self.c3 / n
        return out


def birkhoff_expansion(
    params: CanonicalParams, branch: int = 0, variant: Literal["corrected", "legacy"] = "corrected"
) -> BirkhoffExpansion:
    """Coefficients of the Birkhoff series.

    ``variant="legacy"`` keeps an older c2 normalization 1/(2 9^(1/3)) and an
    older gamma*c1 coefficient in c3. The default uses the values
    obtained by substituting the series back into the recurrence to O(n^-1):
    c2 carries 1/(2 81^(1/3)) and the gamma*c1 coefficient of c3 is
    -12 9^(1/3).
    """
    if branch not in (0, 1, 2):
        raise ValueError("branch must be 0, 1 or 2")
    a, b, g = params.abg
    q = a - g * g / 6.0
    c1 = q / CBRT9
    if variant == "legacy":
        c2 = (g * (1 - b / 3.0) + q * q) / (2.0 * CBRT9)
        k = 8.0 * 1089.0 ** (1.0 / 3.0) - 36.0 * CBRT9
    elif variant == "corrected":
        c2 = (g * (1 - b / 3.0) + q * q) / (2.0 * 81.0 ** (1.0 / 3.0))
        k = -12.0 * CBRT9
    else:
        raise ValueError(f"unknown variant {variant!r}")
    c3 = (-108.0 * c1**3 + 324.0 * c1 * c2 + k * g * c1 + 12.0 * a * g + 6.0 * b * b + 18.0 * b - 2.0 * g**3 - 81.0) / 324.0
    if variant == "legacy":
        # the older bracket has no separate alpha*gamma term
        c3 -= 12.0 * a * g / 324.0
    return BirkhoffExpansion(c1, c2, c3, -5.0 / 6.0 - b / 9.0, g / CBRT3, branch, variant=variant)


def birkhoff_eval(
    params: CanonicalParams, branch: int, n: int, terms: int = 3, variant: str = "corrected"
) -> complex:
    if n < 10:
        raise ValueError("the Birkhoff series is evaluated for n >= 10")
    if not 0 <= terms <= 3:
        raise ValueError("terms must be in 0..3")
    ex = birkhoff_expansion(params, branch, variant)
    return cmath.exp(ex.log_leading(n)) * ex.correction(n, terms)


def birkhoff_log(params: CanonicalParams, branch: int, n: int, terms: int = 3, variant: str = "corrected") -> complex:
    """Complex log of the Birkhoff series, usable past the double range."""
    ex = birkhoff_expansion(params, branch, variant)
    return ex.log_leading(n) + cmath.log(ex.correction(n, terms))


@dataclass(frozen=True)
class PlateauReport:
    constant: float
    drift: float
    ratios: np.ndarray
    window: tuple[int, int]


def plateau(
    params: CanonicalParams,
    window: tuple[int, int] = (100, 300),
    terms: int = 3,
    variant: str = "corrected",
    z0=None,
) -> PlateauReport:
    """Ratio w_n / B_0(n) over a window; constant from the median, drift as max relative deviation."""
    lo, hi = window
    sign, logs = log_abs_w(params, hi, z0)
    ns = np.arange(lo, hi + 1)
    ratios = np.empty(len(ns))
    ex = birkhoff_expansion(params, 0, variant)
    for i, n in enumerate(ns):
        corr = ex.correction(float(n), terms).real
        lb = ex.log_leading(float(n)).real + math.log(abs(corr))
        ratios[i] = sign[n] * np.sign(corr) * math.exp(logs[n] - lb)
    const = float(np.median(ratios))
    drift = float(np.max(np.abs(ratios / const - 1.0))) if const != 0 else math.inf
    return PlateauReport(const, drift, ratios, (lo, hi))
