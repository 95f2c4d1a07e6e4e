"""Closed-form radial states and the series evaluators behind them.

Sign convention. The closed forms here solve psi'' + (V - E) psi = 0 (``"h0"``),
with the centrifugal terms -3/(16 r^2) and -5/(36 r^2) fixing the Bessel and
Whittaker indices. The radial Schroedinger form psi'' + (E - V) psi = 0 is
``"sh1"``; the two differ by V -> -V.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

from scipy.special import gamma as cgamma

from .errors import TruncationError
from .maps import HeunSixParams

BESSEL_CAP = 30.0
WHITTAKER_CAP = 40.0
EPS = 1e-17
MAX_TERMS = 2000

NU_V3 = math.sqrt(7.0) / 6.0
MU_V4 = math.sqrt(14.0) / 12.0


def _csum(terms) -> complex:
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def _converged(terms, partial) -> bool:
    return len(terms) >= 3 and all(abs(t) <= EPS * max(abs(partial), 1e-300) for t in terms[-3:])


# ------------------------------------------------------------------ Bessel


@dataclass(frozen=True)
class BesselSpec:
    nu: float
    scale: float = 1.0
    kind: Literal["J", "Y"] = "J"


def bessel_j_derivs(nu: float, x: float) -> tuple[float, float]:
    """(J_nu(x), J_nu'(x)) from the ascending series; nu may be negative but not a negative integer."""
    if x <= 0:
        raise ValueError("x must be positive")
    if x > BESSEL_CAP:
        raise TruncationError(f"x={x} beyond the series cap {BESSEL_CAP}")
    if nu < 0 and float(nu).is_integer():
        raise ValueError("negative integer orders are not supported")
    h = 0.5 * x
    t = h**nu / math.gamma(nu + 1.0)
    vals, ders = [], []
    for k in range(MAX_TERMS):
        vals.append(t)
        ders.append(t * (2 * k + nu) / x)
        s = math.fsum(vals)
        if k >= 2 and all(abs(v) <= EPS * max(abs(s), 1e-300) for v in vals[-3:]):
            return s, math.fsum(ders)
        t = -t * h * h / ((k + 1) * (k + 1 + nu))
    raise TruncationError("Bessel series did not converge")


def bessel_j(nu: float, x: float) -> float:
    return bessel_j_derivs(nu, x)[0]


def bessel_y_derivs(nu: float, x: float) -> tuple[float, float]:
    """Y_nu = (J_nu cos(nu pi) - J_-nu) / sin(nu pi) for non-integer nu."""
    if float(nu).is_integer():
        raise ValueError("the connection formula needs a non-integer order")
    jp, djp = bessel_j_derivs(nu, x)
    jm, djm = bessel_j_derivs(-nu, x)
    c, s = math.cos(nu * math.pi), math.sin(nu * math.pi)
    return (jp * c - jm) / s, (djp * c - djm) / s


def bessel_eval(spec: BesselSpec, x: float) -> float:
    arg = spec.scale * x
    if spec.kind == "J":
        return bessel_j_derivs(spec.nu, arg)[0]
    if spec.kind == "Y":
        return bessel_y_derivs(spec.nu, arg)[0]
    raise ValueError(f"unknown Bessel kind {spec.kind!r}")


# ------------------------------------------------------------------ Kummer and Whittaker


def kummer_derivs(a: complex, b: complex, z: complex) -> tuple[complex, complex, complex]:
    """(M, M', M'') of Kummer's function 1F1(a; b; z) by term-wise summation."""
    if abs(z) > WHITTAKER_CAP:
        raise TruncationError(f"|z|={abs(z)} beyond the series cap {WHITTAKER_CAP}")
    t = 1.0 + 0j
    v, d1, d2 = [], [], []
    for k in range(MAX_TERMS):
        v.append(t)
        if z != 0:
            d1.append(t * k / z)
            d2.append(t * k * (k - 1) / (z * z))
        s = _csum(v)
        if k >= 3 and _converged(v, s):
            if z == 0:
                return s, a / b, a * (a + 1) / (b * (b + 1))
            return s, _csum(d1), _csum(d2)
        t = t * (a + k) / (b + k) * z / (k + 1)
        if z == 0:
            return 1.0 + 0j, a / b, a * (a + 1) / (b * (b + 1))
    raise TruncationError("Kummer series did not converge")


def kummer(a: complex, b: complex, z: complex) -> complex:
    return kummer_derivs(a, b, z)[0]


@dataclass(frozen=True)
class WhittakerSpec:
    kappa: complex
    mu: float
    kind: Literal["M", "W"] = "M"


def whittaker_m_derivs(kappa: complex, mu: float, z: complex) -> tuple[complex, complex, complex]:
    """(M, M', M'') with M_{kappa,mu}(z) = e^(-z/2) z^(mu+1/2) 1F1(mu - kappa + 1/2; 1 + 2 mu; z)."""
    if z == 0:
        raise ValueError("z must be nonzero")
    p = mu + 0.5
    K, K1, K2 = kummer_derivs(p - kappa, 1.0 + 2.0 * mu, z)
    g = cmath.exp(-0.5 * z + p * cmath.log(z))
    q = p / z - 0.5
    g1 = g * q
    g2 = g * (q * q - p / (z * z))
    return g * K, g1 * K + g * K1, g2 * K + 2.0 * g1 * K1 + g * K2


def whittaker_w_derivs(kappa: complex, mu: float, z: complex) -> tuple[complex, complex, complex]:
    """W from the two M solutions; 2 mu must not be an integer."""
    if float(2 * mu).is_integer():
        raise ValueError("2 mu must be non-integer")
    Mp = whittaker_m_derivs(kappa, mu, z)
    Mm = whittaker_m_derivs(kappa, -mu, z)
    cp = complex(cgamma(-2.0 * mu) / cgamma(0.5 - mu - kappa))
    cm = complex(cgamma(2.0 * mu) / cgamma(0.5 + mu - kappa))
    return tuple(cp * x + cm * y for x, y in zip(Mp, Mm))


def whittaker_eval(spec: WhittakerSpec, z: complex) -> complex:
    if spec.kind == "M":
        return whittaker_m_derivs(spec.kappa, spec.mu, z)[0]
    if spec.kind == "W":
        return whittaker_w_derivs(spec.kappa, spec.mu, z)[0]
    raise ValueError(f"unknown Whittaker kind {spec.kind!r}")


def whittaker_ode_residual(kappa: complex, mu: float, z: complex, kind: str = "M") -> complex:
    """W'' + (-1/4 + kappa/z + (1/4 - mu^2)/z^2) W, relative to |W|."""
    f = whittaker_m_derivs if kind == "M" else whittaker_w_derivs
    w, _, w2 = f(kappa, mu, z)
    return (w2 + (-0.25 + kappa / z + (0.25 - mu * mu) / (z * z)) * w) / max(abs(w), 1e-300)


# ------------------------------------------------------------------ states


def e4_of(b2: float) -> float:
    return 9.0 / (2.0 * b2**1.5)


def zero_energy_state(params: HeunSixParams, C1: float, C2: float, r: float) -> float:
    """sqrt(r) [C1 J_nu(k r^(3/2)) + C2 Y_nu(k r^(3/2))], nu = sqrt7/6, k = 2 sqrt(e4)/3.

    Requires a0 = a1 = a2 = 0 and b0 = b1 = 0 < b2.
    """
    if any(v != 0 for v in (params.a0, params.a1, params.a2, params.b0, params.b1)) or params.b2 <= 0:
        raise ValueError("zero-energy Bessel state needs a = 0, b0 = b1 = 0 and b2 > 0")
    if r <= 0:
        raise ValueError("r must be positive")
    if C1 == 0 and C2 == 0:
        return 0.0
    x = 2.0 * math.sqrt(e4_of(params.b2)) / 3.0 * r**1.5
    out = 0.0
    if C1:
        out += C1 * bessel_j_derivs(NU_V3, x)[0]
    if C2:
        out += C2 * bessel_y_derivs(NU_V3, x)[0]
    return math.sqrt(r) * out


def v3_zero_energy_potential(b2: float):
    e4 = e4_of(b2)
    return lambda r: -3.0 / (16.0 * r * r) + e4 * r


def v5_of(b1: float) -> float:
    return 81.0 / (16.0 * b1 * b1)


KappaConvention = Literal["v5", "sqrt5"]


def whittaker_kappa(E: float, v0: float, b1: float, convention: KappaConvention = "v5") -> complex:
    """i (E - v0) / (4 d) with d = sqrt(v5) (``"v5"``) or d = sqrt(5) (``"sqrt5"``)."""
    d = math.sqrt(v5_of(b1)) if convention == "v5" else math.sqrt(5.0)
    return 1j * (E - v0) / (4.0 * d)


def v4_reduced_state(
    b1: float,
    E: float,
    C1: complex,
    C2: complex,
    r: float,
    v0: float = 0.0,
    convention: KappaConvention = "v5",
) -> complex:
    """State of V = v0 - 5/(36 r^2) + v5 r^2 at energy E under the h0 convention.

    r^(-1/2) [C1 M_{kappa,mu}(i sqrt(v5) r^2) + C2 W_{kappa,mu}(same)], mu = sqrt14/12;
    at E = v0 the Bessel form sqrt(r) [C1 J_mu(sqrt(v5) r^2 / 2) + C2 Y_mu(same)].
    """
    if r <= 0:
        raise ValueError("r must be positive")
    if C1 == 0 and C2 == 0:
        return 0j
    v5 = v5_of(b1)
    if E == v0:
        x = 0.5 * math.sqrt(v5) * r * r
        out = 0j
        if C1:
            out += C1 * bessel_j_derivs(MU_V4, x)[0]
        if C2:
            out += C2 * bessel_y_derivs(MU_V4, x)[0]
        return math.sqrt(r) * out
    kappa = whittaker_kappa(E, v0, b1, convention)
    z = 1j * math.sqrt(v5) * r * r
    out = 0j
    if C1:
        out += C1 * whittaker_m_derivs(kappa, MU_V4, z)[0]
    if C2:
        out += C2 * whittaker_w_derivs(kappa, MU_V4, z)[0]
    return out / math.sqrt(r)


def v4_reduced_potential(b1: float, v0: float = 0.0):
    v5 = v5_of(b1)
    return lambda r: v0 - 5.0 / (36.0 * r * r) + v5 * r * r


def resolve_kappa_convention(b1: float, E: float, v0: float = 0.0, grid=None) -> tuple[str, dict]:
    """Pick the kappa normalization whose Whittaker state has the smaller FD residual."""
    from .oracle import fd_residual  # local import keeps the module graph acyclic

    if grid is None:
        grid = [0.3 + 0.017 * i for i in range(100)]
    V = v4_reduced_potential(b1, v0)
    scores = {}
    for conv in ("v5", "sqrt5"):
        re = fd_residual(lambda r: v4_reduced_state(b1, E, 1.0, 0.0, r, v0, conv).real, V, E, grid, "h0")
        im = fd_residual(lambda r: v4_reduced_state(b1, E, 1.0, 0.0, r, v0, conv).imag, V, E, grid, "h0")
        scores[conv] = max(re.residual_max, im.residual_max)
    return min(scores, key=scores.get), scores
