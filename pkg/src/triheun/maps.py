"""Six-parameter class, case classification and the coordinate map rho <-> r.

The map solves ``rho'(r) = 1/sqrt(I1(rho))`` with ``I1 = b0 + b1 rho + b2 rho^2``.
Every case provides a closed-form ``r(rho)``; the inverse is closed-form where
the quadratic/linear structure allows it and a bracketed root search otherwise.
Additive constants are fixed so the finite lower end of the rho-interval maps
to r = 0 (or, when that end is -inf, so the vertex of I1 maps to r = 0).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, InfeasibleCase, InvalidParams

ROOT_RTOL = 1e-12
ROOT_MAXITER = 200
_ZERO_REL = 1e-12


class CaseTag(enum.Enum):
    DeltaNeg_b2Pos = "DeltaNeg_b2Pos"
    DeltaZero_b1Pos = "DeltaZero_b1Pos"
    DeltaZero_b1Neg = "DeltaZero_b1Neg"
    DeltaZero_b0b1Zero = "DeltaZero_b0b1Zero"
    DeltaPos_b2Pos = "DeltaPos_b2Pos"
    DeltaPos_b2Neg = "DeltaPos_b2Neg"
    Linear_b2Zero = "Linear_b2Zero"
    Linear_b0b2Zero = "Linear_b0b2Zero"
    Constant_b1b2Zero = "Constant_b1b2Zero"


class InversionMode(enum.Enum):
    ClosedForm = "ClosedForm"
    MonotoneRootFind = "MonotoneRootFind"


@dataclass(frozen=True)
class HeunSixParams:
    """Coefficients of I0 = a0 + a1 rho + a2 rho^2 - 9/4 rho^4 and I1 = b0 + b1 rho + b2 rho^2."""

    a0: float
    a1: float
    a2: float
    b0: float
    b1: float
    b2: float

    def __post_init__(self):
        vals = (self.a0, self.a1, self.a2, self.b0, self.b1, self.b2)
        if not all(math.isfinite(float(v)) for v in vals):
            raise InvalidParams(f"non-finite parameter in {vals}")
        if self.b0 == 0 and self.b1 == 0 and self.b2 == 0:
            raise InvalidParams("b0, b1, b2 all vanish: I1 is identically zero")

    @classmethod
    def from_sequence(cls, values) -> "HeunSixParams":
        vals = [float(v) for v in values]
        if len(vals) != 6:
            raise InvalidParams(f"expected 6 values a0,a1,a2,b0,b1,b2, got {len(vals)}")
        return cls(*vals)

    @property
    def delta(self) -> float:
        return self.b1 * self.b1 - 4.0 * self.b0 * self.b2

    def as_tuple(self) -> tuple[float, ...]:
        return (self.a0, self.a1, self.a2, self.b0, self.b1, self.b2)

    def i0(self, rho):
        return self.a0 + self.a1 * rho + self.a2 * rho**2 - 2.25 * rho**4

    def i1(self, rho):
        return self.b0 + self.b1 * rho + self.b2 * rho**2

    def i1_prime(self, rho):
        return self.b1 + 2.0 * self.b2 * rho

    def canonical_A(self, E: float) -> tuple[float, float, float]:
        """A_i = a_i + E b_i."""
        return (self.a0 + E * self.b0, self.a1 + E * self.b1, self.a2 + E * self.b2)


def _is_zero_delta(p: HeunSixParams) -> bool:
    scale = p.b1 * p.b1 + 4.0 * abs(p.b0 * p.b2)
    return abs(p.delta) <= _ZERO_REL * scale


def classify(params: HeunSixParams) -> CaseTag:
    """Case tag from the sign pattern of (b0, b1, b2, Delta).

    Raises InfeasibleCase when I1 cannot be positive on an interval on which
    rho grows with r over a half-line or a bounded interval starting at r = 0.
    """
    b0, b1, b2 = params.b0, params.b1, params.b2
    if b2 > 0:
        if _is_zero_delta(params):
            if b1 > 0:
                return CaseTag.DeltaZero_b1Pos
            if b1 < 0:
                return CaseTag.DeltaZero_b1Neg
            return CaseTag.DeltaZero_b0b1Zero
        if params.delta < 0:
            return CaseTag.DeltaNeg_b2Pos
        return CaseTag.DeltaPos_b2Pos
    if b2 < 0:
        if params.delta > 0 and not _is_zero_delta(params):
            return CaseTag.DeltaPos_b2Neg
        raise InfeasibleCase(f"b2={b2} < 0 with Delta={params.delta} <= 0: I1 is never positive on an interval")
    if b1 > 0:
        return CaseTag.Linear_b0b2Zero if b0 == 0 else CaseTag.Linear_b2Zero
    if b1 < 0:
        raise InfeasibleCase("b2 = 0 with b1 < 0: I1 > 0 only for rho < -b0/b1, where r(rho) cannot start at 0 and increase")
    if b0 > 0:
        return CaseTag.Constant_b1b2Zero
    raise InfeasibleCase(f"I1 = {b0} is not positive")


@dataclass(frozen=True)
class CoordinateMap:
    """Realization of rho(r) for one parameter set.

    ``rho_domain`` and ``r_domain`` are the closed-at-the-anchor intervals
    actually used; ``anchor`` is the rho value mapped to r = 0.
    """

    params: HeunSixParams
    tag: CaseTag
    rho_domain: tuple[float, float]
    r_domain: tuple[float, float]
    inversion_mode: InversionMode
    anchor: float
    covers_half_line: bool
    roots: tuple[float, ...] = field(default=())

    def i1(self, rho):
        return self.params.i1(rho)

    def forward(self, rho: float) -> float:
        return forward_map(self, rho)

    def inverse(self, r: float) -> float:
        return inverse_map(self, r)

    def rho_grid(self, r) -> np.ndarray:
        return np.array([inverse_map(self, float(x)) for x in np.atleast_1d(r)])


def _i1_roots(p: HeunSixParams) -> tuple[float, float]:
    sq = math.sqrt(p.delta)
    x = (-p.b1 - sq) / (2.0 * p.b2)
    y = (-p.b1 + sq) / (2.0 * p.b2)
    return (min(x, y), max(x, y))


def build_map(params: HeunSixParams) -> CoordinateMap:
    """Classify and construct the coordinate map of a parameter set."""
    tag = classify(params)
    b0, b1, b2 = params.b0, params.b1, params.b2
    inf = math.inf
    if tag is CaseTag.DeltaNeg_b2Pos:
        anchor = -b1 / (2.0 * b2)
        return CoordinateMap(params, tag, (anchor, inf), (0.0, inf), InversionMode.MonotoneRootFind, anchor, True)
    if tag is CaseTag.DeltaZero_b1Pos:
        return CoordinateMap(params, tag, (0.0, inf), (0.0, inf), InversionMode.ClosedForm, 0.0, True)
    if tag is CaseTag.DeltaZero_b1Neg:
        anchor = 2.0 * math.sqrt(b0 / b2)
        return CoordinateMap(params, tag, (anchor, inf), (0.0, inf), InversionMode.ClosedForm, anchor, True)
    if tag is CaseTag.DeltaZero_b0b1Zero:
        return CoordinateMap(params, tag, (0.0, inf), (0.0, inf), InversionMode.ClosedForm, 0.0, True)
    if tag is CaseTag.DeltaPos_b2Pos:
        rho1, rho2 = _i1_roots(params)
        return CoordinateMap(
            params, tag, (rho2, inf), (0.0, inf), InversionMode.MonotoneRootFind, rho2, True, (rho1, rho2)
        )
    if tag is CaseTag.DeltaPos_b2Neg:
        rho1, rho2 = _i1_roots(params)
        # total length: integral of sqrt(I1) over (rho1, rho2) = pi Delta / (8 (-b2)^(3/2))
        r_max = math.pi * params.delta / (8.0 * (-b2) ** 1.5)
        return CoordinateMap(
            params, tag, (rho1, rho2), (0.0, r_max), InversionMode.MonotoneRootFind, rho1, False, (rho1, rho2)
        )
    if tag is CaseTag.Linear_b2Zero or tag is CaseTag.Linear_b0b2Zero:
        anchor = -b0 / b1
        return CoordinateMap(params, tag, (anchor, inf), (0.0, inf), InversionMode.ClosedForm, anchor, True)
    # Constant
    return CoordinateMap(params, tag, (0.0, inf), (0.0, inf), InversionMode.ClosedForm, 0.0, True)


def _check_rho(m: CoordinateMap, rho: float) -> None:
    lo, hi = m.rho_domain
    slack_lo = 1e-14 * (1.0 + abs(lo))
    slack_hi = 1e-14 * (1.0 + abs(hi)) if math.isfinite(hi) else 0.0
    if math.isnan(rho) or rho < lo - slack_lo or rho > hi + slack_hi:
        raise DomainError(f"rho={rho} outside {m.rho_domain} for case {m.tag.value}")


def _check_r(m: CoordinateMap, r: float) -> None:
    lo, hi = m.r_domain
    if math.isnan(r) or r < lo or r > hi * (1.0 + 1e-14):
        raise DomainError(f"r={r} outside {m.r_domain} for case {m.tag.value}")


def _forward_unchecked(m: CoordinateMap, rho: float) -> float:
    p = m.params
    b0, b1, b2 = p.b0, p.b1, p.b2
    tag = m.tag
    if tag is CaseTag.DeltaNeg_b2Pos:
        i1 = max(p.i1(rho), 0.0)
        d = p.delta
        return 0.5 * (rho + b1 / (2.0 * b2)) * math.sqrt(i1) - d / (8.0 * b2 * math.sqrt(b2)) * math.asinh(
            (2.0 * b2 * rho + b1) / math.sqrt(-d)
        )
    if tag is CaseTag.DeltaZero_b1Pos:
        return 0.5 * math.sqrt(b2) * rho * rho + math.sqrt(b0) * rho
    if tag is CaseTag.DeltaZero_b1Neg:
        return 0.5 * math.sqrt(b2) * rho * rho - math.sqrt(b0) * rho
    if tag is CaseTag.DeltaZero_b0b1Zero:
        return 0.5 * math.sqrt(b2) * rho * rho
    if tag is CaseTag.DeltaPos_b2Pos:
        i1 = max(p.i1(rho), 0.0)
        d = p.delta
        arg = 2.0 * math.sqrt(b2 * i1) + 2.0 * b2 * rho + b1
        return 0.5 * (rho + b1 / (2.0 * b2)) * math.sqrt(i1) - d / (8.0 * b2 * math.sqrt(b2)) * (
            math.log(arg) - 0.5 * math.log(d)
        )
    if tag is CaseTag.DeltaPos_b2Neg:
        i1 = max(p.i1(rho), 0.0)
        d = p.delta
        u = min(1.0, max(-1.0, (2.0 * b2 * rho + b1) / math.sqrt(d)))
        return 0.5 * (rho + b1 / (2.0 * b2)) * math.sqrt(i1) + d / (8.0 * b2 * math.sqrt(-b2)) * (
            math.asin(u) - 0.5 * math.pi
        )
    if tag is CaseTag.Linear_b2Zero or tag is CaseTag.Linear_b0b2Zero:
        return 2.0 / (3.0 * b1) * max(b1 * rho + b0, 0.0) ** 1.5
    return rho * math.sqrt(b0)


def forward_map(m: CoordinateMap, rho: float) -> float:
    """r(rho) on the map's rho-interval."""
    rho = float(rho)
    _check_rho(m, rho)
    return _forward_unchecked(m, rho)


def _upper_bracket(m: CoordinateMap, r: float) -> float:
    lo = m.rho_domain[0]
    step = max(1.0, abs(lo), map_asymptotic(m, r) - lo)
    hi = lo + step
    for _ in range(200):
        if _forward_unchecked(m, hi) >= r:
            return hi
        step *= 2.0
        hi = lo + step
    raise ConvergenceError(f"could not bracket rho for r={r}")


def inverse_map(m: CoordinateMap, r: float) -> float:
    """rho(r); closed form where available, bracketed root search otherwise."""
    r = float(r)
    _check_r(m, r)
    p = m.params
    b0, b1, b2 = p.b0, p.b1, p.b2
    tag = m.tag
    if tag is CaseTag.DeltaZero_b1Pos:
        return (-math.sqrt(b0) + math.sqrt(b0 + 2.0 * math.sqrt(b2) * r)) / math.sqrt(b2)
    if tag is CaseTag.DeltaZero_b1Neg:
        return (math.sqrt(b0) + math.sqrt(b0 + 2.0 * math.sqrt(b2) * r)) / math.sqrt(b2)
    if tag is CaseTag.DeltaZero_b0b1Zero:
        return math.sqrt(2.0 * r / math.sqrt(b2))
    if tag is CaseTag.Linear_b2Zero or tag is CaseTag.Linear_b0b2Zero:
        return -b0 / b1 + (1.5 * b1 * r) ** (2.0 / 3.0) / b1
    if tag is CaseTag.Constant_b1b2Zero:
        return r / math.sqrt(b0)
    lo = m.rho_domain[0]
    if r == 0.0:
        return lo
    if tag is CaseTag.DeltaPos_b2Neg:
        hi = m.rho_domain[1]
        if r >= m.r_domain[1]:
            return hi
    else:
        hi = _upper_bracket(m, r)
    g = lambda x: _forward_unchecked(m, x) - r  # noqa: E731
    try:
        root = brentq(g, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=ROOT_MAXITER)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    return root


def map_asymptotic(m: CoordinateMap, r: float) -> float:
    """Leading approximant of rho(r).

    Large r for the unbounded cases. For b2 < 0 the image is the bounded
    interval r_domain, and the approximant is the expansion about the starting
    root rho1 (valid as r -> 0+).
    """
    p = m.params
    b0, b1, b2 = p.b0, p.b1, p.b2
    tag = m.tag
    r = float(r)
    if tag is CaseTag.DeltaPos_b2Neg:
        rho1, rho2 = m.roots
        return rho1 + (1.5 * r) ** (2.0 / 3.0) / (abs(b2) * (rho2 - rho1)) ** (1.0 / 3.0)
    if b2 > 0:
        return math.sqrt(2.0 * max(r, 0.0) / math.sqrt(b2))
    if tag is CaseTag.Constant_b1b2Zero:
        return r / math.sqrt(b0)
    return (1.5 * b1 * max(r, 0.0)) ** (2.0 / 3.0) / b1


def sample_r(m: CoordinateMap, count: int, lo_frac: float = 1e-6, hi: float | None = None) -> np.ndarray:
    """Log-spaced r values strictly inside r_domain."""
    r_lo, r_hi = m.r_domain
    if math.isfinite(r_hi):
        top = r_hi * (1.0 - 1e-6)
        bottom = r_hi * lo_frac
    else:
        top = 1e4 if hi is None else hi
        bottom = max(lo_frac, r_lo)
    return np.geomspace(bottom, top, count)
