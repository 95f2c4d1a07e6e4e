"""Effective potential of the radial problem and its named special families.

With rho'(r) = I1(rho)^(-1/2) the radial equation psi'' + (E - V) psi = 0 has

    V_eff(r) = -I0/I1 - S/2,   S = (5 I1'^2 - 4 I1 I1'') / (8 I1^3),

where S is the Schwarzian derivative of rho(r) and primes on I1 are rho
derivatives. Expanding S gives the explicit polynomial numerator used by
:func:`v_eff_rho`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError, SingularPoint, UnsupportedFamily
from .maps import CaseTag, CoordinateMap, HeunSixParams, inverse_map

SINGULAR_TOL = 1e-14
ROOT_XTOL = 1e-10


@dataclass(frozen=True)
class BoseSplit:
    """I0 and I1 coefficient triples; the quartic term of I0 is fixed at -9/4."""

    i0_coeffs: tuple[float, float, float]
    i1_coeffs: tuple[float, float, float]

    @classmethod
    def from_params(cls, p: HeunSixParams) -> "BoseSplit":
        return cls((p.a0, p.a1, p.a2), (p.b0, p.b1, p.b2))

    def i0(self, rho):
        a0, a1, a2 = self.i0_coeffs
        return a0 + a1 * rho + a2 * rho**2 - 2.25 * rho**4

    def i1(self, rho):
        b0, b1, b2 = self.i1_coeffs
        return b0 + b1 * rho + b2 * rho**2


def _check_i1(i1: float, rho: float) -> None:
    if abs(i1) < SINGULAR_TOL * (1.0 + rho * rho):
        raise SingularPoint(f"I1 vanishes at rho={rho}")


def schwarzian_via_I1(params: HeunSixParams, rho: float) -> float:
    """Schwarzian of rho(r) expressed through I1 and its rho-derivatives."""
    rho = float(rho)
    i1 = params.i1(rho)
    _check_i1(i1, rho)
    d1 = params.i1_prime(rho)
    d2 = 2.0 * params.b2
    return (5.0 * d1 * d1 - 4.0 * i1 * d2) / (8.0 * i1**3)


def v_eff_rho_schwarzian(params: HeunSixParams, rho: float) -> float:
    """-I0/I1 - S/2 at a given rho."""
    i1 = params.i1(rho)
    _check_i1(i1, rho)
    return -params.i0(rho) / i1 - 0.5 * schwarzian_via_I1(params, rho)


def v_eff_rho(params: HeunSixParams, rho: float) -> float:
    """Explicit rational form of the effective potential at a given rho."""
    rho = float(rho)
    b0, b1, b2 = params.b0, params.b1, params.b2
    i1 = params.i1(rho)
    _check_i1(i1, rho)
    num = 12.0 * b2 * b2 * rho * rho + 12.0 * b1 * b2 * rho + 5.0 * b1 * b1 - 8.0 * b0 * b2
    return -params.i0(rho) / i1 - num / (16.0 * i1**3)


def v_eff(params: HeunSixParams, cmap: CoordinateMap, r: float) -> float:
    """Effective potential at radius r."""
    r = float(r)
    lo, hi = cmap.r_domain
    if math.isnan(r) or r < lo or r > hi:
        raise DomainError(f"r={r} outside {cmap.r_domain}")
    return v_eff_rho(params, inverse_map(cmap, r))


class Family(enum.Enum):
    V1 = "V1"
    V2variant = "V2variant"
    V3 = "V3"
    V4 = "V4"
    V5 = "V5"
    General = "General"


_TAG_FAMILY = {
    CaseTag.DeltaZero_b1Pos: Family.V1,
    CaseTag.DeltaZero_b1Neg: Family.V2variant,
    CaseTag.DeltaZero_b0b1Zero: Family.V3,
    CaseTag.Linear_b2Zero: Family.V4,
    CaseTag.Linear_b0b2Zero: Family.V5,
}


@dataclass(frozen=True)
class PotentialFamily:
    family: Family
    coeffs: dict
    params: HeunSixParams
    cmap: CoordinateMap | None = field(default=None, compare=False)

    def __call__(self, r):
        return self.evaluate(r)

    def evaluate(self, r: float) -> float:
        r = float(r)
        c = self.coeffs
        f = self.family
        if f in (Family.V1, Family.V2variant):
            k = "c" if f is Family.V1 else "d"
            s = math.sqrt(self.params.b0 + 2.0 * math.sqrt(self.params.b2) * r)
            return (
                c[k + "0"]
                + c[k + "1"] / s
                + c[k + "2"] / s**2
                + c[k + "3"] / s**4
                + c[k + "4"] * s
                + c[k + "5"] * r
            )
        if r <= 0:
            if f is Family.General:
                return v_eff(self.params, self.cmap, r)
            raise SingularPoint(f"{f.value} is singular at r=0")
        if f is Family.V3:
            return c["e0"] + c["e1"] / math.sqrt(r) + c["e2"] / r + c["e3"] / r**2 + c["e4"] * r
        if f is Family.V4:
            t = r ** (2.0 / 3.0)
            return c["v0"] + c["v1"] / t + c["v2"] / r**2 + c["v3"] * t + c["v4"] * t * t + c["v5"] * r * r
        if f is Family.V5:
            t = r ** (2.0 / 3.0)
            return c["u0"] + c["u1"] / t + c["u2"] / r**2 + c["u3"] * t + c["u4"] * r * r
        return v_eff(self.params, self.cmap, r)

    def growth_coefficient(self) -> float:
        """Coefficient of the leading power at large r (r for V1-V3, r^2 for V4, V5)."""
        f = self.family
        key = {Family.V1: "c5", Family.V2variant: "d5", Family.V3: "e4", Family.V4: "v5", Family.V5: "u4"}
        if f not in key:
            raise UnsupportedFamily("general potentials have no tabulated growth coefficient")
        return self.coeffs[key[f]]


def _c_coeffs(a0, a1, a2, b0, b2):
    sb0, sb2 = math.sqrt(b0), math.sqrt(b2)
    return {
        "0": 63.0 * b0 / (4.0 * b2 * b2) - a2 / b2,
        "1": 2.0 * a2 * sb0 / b2 - a1 / sb2 - 9.0 * b0 * sb0 / (b2 * b2),
        "2": -a0 + a1 * sb0 / sb2 + 9.0 * b0 * b0 / (4.0 * b2 * b2) - a2 * b0 / b2,
        "3": -0.75 * b2,
        "4": -9.0 * sb0 / (b2 * b2),
        "5": 9.0 / (2.0 * b2 * sb2),
    }


def _d_coeffs(a0, a1, a2, b0, b2):
    c = _c_coeffs(a0, a1, a2, b0, b2)
    sb0, sb2 = math.sqrt(b0), math.sqrt(b2)
    return {
        "0": c["0"],
        "1": -2.0 * a2 * sb0 / b2 - a1 / sb2 + 9.0 * b0 * sb0 / (b2 * b2),
        # the a0 term enters with the same sign as in the c-list
        "2": -a0 - a1 * sb0 / sb2 + 9.0 * b0 * b0 / (4.0 * b2 * b2) - a2 * b0 / b2,
        "3": c["3"],
        "4": -c["4"],
        "5": c["5"],
    }


def family_coefficients(params: HeunSixParams, tag: CaseTag, cmap: CoordinateMap | None = None) -> PotentialFamily:
    """Named coefficient list of the special family belonging to ``tag``."""
    if tag not in _TAG_FAMILY:
        raise UnsupportedFamily(f"case {tag.value} has no named potential family")
    fam = _TAG_FAMILY[tag]
    a0, a1, a2, b0, b1, b2 = params.as_tuple()
    if fam is Family.V1:
        coeffs = {"c" + k: v for k, v in _c_coeffs(a0, a1, a2, b0, b2).items()}
    elif fam is Family.V2variant:
        coeffs = {"d" + k: v for k, v in _d_coeffs(a0, a1, a2, b0, b2).items()}
    elif fam is Family.V3:
        coeffs = {
            "e0": -a2 / b2,
            "e1": -a1 / (math.sqrt(2.0) * b2**0.75),
            "e2": -a0 / (2.0 * math.sqrt(b2)),
            "e3": -3.0 / 16.0,
            "e4": 9.0 / (2.0 * b2 * math.sqrt(b2)),
        }
    elif fam is Family.V4:
        q = b0 / b1
        k = (2.0 / (3.0 * b1)) ** (2.0 / 3.0)
        coeffs = {
            "v0": -a1 / b1 + 2.0 * a2 * b0 / b1**2 - 9.0 * b0**3 / b1**4,
            "v1": k * (a1 * q - a0 - a2 * q * q + 2.25 * q**4),
            "v2": -5.0 / 36.0,
            "v3": (1.5 / b1) ** (2.0 / 3.0) * b1 ** (-2.0 / 3.0) * (13.5 * q * q - a2),
            "v4": -(3.0 ** (10.0 / 3.0)) * b0 / (2.0 ** (4.0 / 3.0) * b1 ** (8.0 / 3.0)),
            "v5": 81.0 / (16.0 * b1 * b1),
        }
    else:
        coeffs = {
            "u0": -a1 / b1,
            "u1": -a0 * np.cbrt(4.0 / (9.0 * b1 * b1)),
            "u2": -5.0 / 36.0,
            "u3": -a2 * np.cbrt(9.0 / (4.0 * b1**4)),
            "u4": 81.0 / (16.0 * b1 * b1),
        }
    return PotentialFamily(fam, {k: float(v) for k, v in coeffs.items()}, params, cmap)


def general_family(params: HeunSixParams, cmap: CoordinateMap) -> PotentialFamily:
    return PotentialFamily(Family.General, {}, params, cmap)


def zeroing_choice(tag: CaseTag, b0: float, b1: float, b2: float) -> tuple[float, float, float]:
    """(a0, a1, a2) that remove the constant and the two lowest inverse terms."""
    if tag is CaseTag.DeltaZero_b1Pos:
        q = b0 / b2
        return 9.0 * q * q, 22.5 * q**1.5, 15.75 * q
    if tag is CaseTag.DeltaZero_b1Neg:
        q = b0 / b2
        return 9.0 * q * q, -22.5 * q**1.5, 15.75 * q
    if tag in (CaseTag.Linear_b2Zero, CaseTag.Linear_b0b2Zero):
        q = b0 / b1
        return 6.75 * q**4, 18.0 * q**3, 13.5 * q * q
    if tag is CaseTag.DeltaZero_b0b1Zero:
        return 0.0, 0.0, 0.0
    raise UnsupportedFamily(f"no zeroing choice for {tag.value}")


# ---------------------------------------------------------------- critical points


@dataclass(frozen=True)
class CriticalPointReport:
    sign_changes: int
    possible_counts: frozenset
    roots: tuple
    classification: tuple
    polynomial: tuple = ()
    variable: str = ""


def sign_changes(coeffs) -> int:
    """Sign changes of a coefficient list, zeros skipped."""
    signs = [np.sign(c) for c in coeffs if c != 0]
    return int(sum(1 for x, y in zip(signs, signs[1:]) if x != y))


def descartes_counts(n: int) -> frozenset:
    return frozenset(range(n % 2, n + 1, 2))


def cauchy_bound(coeffs) -> float:
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    return 1.0 + float(np.max(np.abs(c[:-1] / c[-1]))) if len(c) > 1 else 0.0


def _bisect(f, lo, hi, flo):
    while hi - lo > ROOT_XTOL * (1.0 + abs(lo)):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def positive_roots(coeffs, lo: float = 0.0) -> list[float]:
    """Real roots in (lo, Cauchy bound) of a polynomial given low-to-high.

    The interval is split at the roots of the derivative so that the
    polynomial is monotone on each piece; every sign change then brackets
    exactly one root.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if len(c) <= 1:
        return []
    hi = max(cauchy_bound(c), lo) + 1.0
    f = lambda x: P.polyval(x, c)  # noqa: E731
    knots = [lo] + [x for x in positive_roots(P.polyder(c), lo) if lo < x < hi] + [hi]
    out = []
    for a, b in zip(knots, knots[1:]):
        fa, fb = f(a), f(b)
        if fa == 0 and a > lo and (not out or abs(out[-1] - a) > ROOT_XTOL * (1 + a)):
            out.append(a)
        if fa * fb < 0:
            out.append(_bisect(f, a, b, fa))
    return out


def _critical_polynomial(fam: PotentialFamily):
    """(coefficients low-to-high, variable shift, back-map) for each family."""
    c = fam.coeffs
    f = fam.family
    if f in (Family.V1, Family.V2variant):
        k = "c" if f is Family.V1 else "d"
        b0, b2 = fam.params.b0, fam.params.b2
        sb0, sb2 = math.sqrt(b0), math.sqrt(b2)
        # in s = sqrt(b0 + 2 sqrt(b2) r), shifted to t = s - sqrt(b0) so t > 0 <=> r > 0
        s_poly = np.array([-4.0 * c[k + "3"], 0.0, -2.0 * c[k + "2"], -c[k + "1"], 0.0, c[k + "4"], c[k + "5"] / sb2])
        coeffs = _compose_shift(s_poly, sb0)
        return coeffs, "t = sqrt(I1) - sqrt(b0)", lambda t: ((t + sb0) ** 2 - b0) / (2.0 * sb2)
    if f is Family.V3:
        poly = [-4.0 * c["e3"], 0.0, -2.0 * c["e2"], -c["e1"], 0.0, 0.0, 2.0 * c["e4"]]
        return np.array(poly), "tau = r^(1/2)", lambda t: t * t
    if f is Family.V4:
        poly = [-3.0 * c["v2"], 0.0, -c["v1"], 0.0, c["v3"], 2.0 * c["v4"], 3.0 * c["v5"]]
        return np.array(poly), "tau = r^(2/3)", lambda t: t**1.5
    if f is Family.V5:
        poly = [-3.0 * c["u2"], -c["u1"], c["u3"], 3.0 * c["u4"]]
        return np.array(poly), "tau = r^(4/3)", lambda t: t**0.75
    raise UnsupportedFamily("critical points are tabulated only for the named families")


def _compose_shift(coeffs, shift: float) -> np.ndarray:
    """Coefficients of p(t + shift), low to high."""
    out = np.zeros(1)
    for ck in coeffs[::-1]:
        out = P.polyadd(P.polymul(out, [shift, 1.0]), [ck])
    return np.asarray(out, dtype=float)


def classify_extremum(fn, r: float) -> str:
    h = 1e-5 * (1.0 + r)
    lo = r - h if r - h > 0 else r * 0.5
    h_eff = r - lo
    v0, vm, vp = fn(r), fn(r - h_eff), fn(r + h_eff)
    d2 = (vp - 2.0 * v0 + vm) / (h_eff * h_eff)
    noise = 1e3 * np.finfo(float).eps * (abs(vp) + abs(v0) + abs(vm)) / (h_eff * h_eff)
    if d2 > noise:
        return "min"
    if d2 < -noise:
        return "max"
    return "inflection"


def critical_points(family: PotentialFamily) -> CriticalPointReport:
    """Positive critical points of a named family via its critical-point polynomial."""
    poly, var, back = _critical_polynomial(family)
    n = sign_changes(poly)
    taus = positive_roots(poly)
    rs = tuple(sorted(float(back(t)) for t in taus if t > 0))
    cls = tuple(classify_extremum(family.evaluate, r) for r in rs)
    return CriticalPointReport(n, descartes_counts(n), rs, cls, tuple(float(x) for x in poly), var)
