"""Oracle suite: each check measures one property and compares it with a threshold.

Checks are sized by arguments so the command-line ``validate`` run can stay
quick while the acceptance tests use the full sizes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import NodeSingularity
from .maps import CaseTag, HeunSixParams, build_map, forward_map, inverse_map
from .series import CanonicalParams


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    detail: dict = field(default_factory=dict)


def _result(name, value, threshold, detail=None, passed=None):
    ok = bool(value <= threshold) if passed is None else bool(passed)
    return CheckResult(name, float(value), float(threshold), ok, detail or {})


# ------------------------------------------------------------------ parameter generators


def random_params(tag: CaseTag, rng: np.random.Generator, a_scale: float = 1.0) -> HeunSixParams:
    """A random parameter set realizing ``tag``."""
    a0, a1, a2 = rng.uniform(-a_scale, a_scale, 3)
    u = lambda lo, hi: float(rng.uniform(lo, hi))  # noqa: E731
    if tag is CaseTag.DeltaNeg_b2Pos:
        b2, b1 = u(0.5, 2), u(-1, 1)
        b0 = b1 * b1 / (4 * b2) + u(0.1, 1)
    elif tag is CaseTag.DeltaZero_b1Pos:
        b2, b1 = u(0.5, 2), u(0.3, 1.5)
        b0 = b1 * b1 / (4 * b2)
    elif tag is CaseTag.DeltaZero_b1Neg:
        b2, b1 = u(0.8, 2), -u(0.3, 1.2)
        b0 = b1 * b1 / (4 * b2)
    elif tag is CaseTag.DeltaZero_b0b1Zero:
        b0, b1, b2 = 0.0, 0.0, u(0.5, 2)
    elif tag is CaseTag.DeltaPos_b2Pos:
        b2, b1, b0 = u(0.5, 2), u(-1, 1), -u(0.1, 1)
    elif tag is CaseTag.DeltaPos_b2Neg:
        b2, b1, b0 = -u(0.5, 2), u(-1, 1), u(0.5, 2)
    elif tag is CaseTag.Linear_b2Zero:
        b2, b1, b0 = 0.0, u(0.5, 2), u(-1, 1) or 0.5
    elif tag is CaseTag.Linear_b0b2Zero:
        b0, b1, b2 = 0.0, u(0.5, 2), 0.0
    else:
        b0, b1, b2 = u(0.5, 2), 0.0, 0.0
    return HeunSixParams(a0, a1, a2, b0, b1, b2)


def rho_window(cmap, width: float = 1.5) -> tuple[float, float]:
    """A rho interval inside the domain, clear of the endpoint where I1 vanishes."""
    lo, hi = cmap.rho_domain
    if math.isfinite(hi):
        span = hi - lo
        return lo + 0.05 * span, hi - 0.05 * span
    if cmap.tag is CaseTag.Constant_b1b2Zero:
        return 0.2 * width, width
    return lo + 0.2 * width, lo + width


def r_grid(cmap, count: int) -> np.ndarray:
    a, b = rho_window(cmap)
    return np.array([forward_map(cmap, x) for x in np.linspace(a, b, count)])


# ------------------------------------------------------------------ checks


def check_pipeline_closure(n_sets: int = 20, grid_points: int = 200, seed: int = 0) -> list[CheckResult]:
    """Assembled wavefunctions solve psi'' + (E - V_eff) psi = 0 on random feasible sets of every case."""
    from .oracle import fd_residual
    from .potential import v_eff
    from .series import Wavefunction

    rng = np.random.default_rng(seed)
    tags = list(CaseTag)
    worst, per_tag = 0.0, {}
    t0 = time.perf_counter()
    for i in range(n_sets):
        tag = tags[i % len(tags)]
        p = random_params(tag, rng)
        m = build_map(p)
        E = float(rng.uniform(-1, 1))
        combo = tuple(rng.uniform(-1, 1, 2))
        psi = Wavefunction(p, E, m, combo)
        grid = r_grid(m, grid_points)
        V = lambda r: v_eff(p, m, r)  # noqa: E731
        r_hi = m.r_domain[1]
        # local length: distance to an endpoint or the WKB scale, whichever is shorter
        step = lambda r: 3e-3 * min(r, r_hi - r, 1.0 / math.sqrt(1.0 + abs(V(r) - E)))  # noqa: E731
        rep = fd_residual(psi, V, E, grid, "sh1", step)
        worst = max(worst, rep.residual_max)
        per_tag[tag.value] = max(per_tag.get(tag.value, 0.0), rep.residual_max)
    elapsed = time.perf_counter() - t0
    return [
        _result("pipeline_closure.fd_residual", worst, 1e-6, per_tag),
        _result("pipeline_closure.runtime_s", elapsed, 60.0),
    ]


def qes_radial_instances(n_max: int = 4):
    """(N, HeunSixParams) radial QES instances with b = (0, 1, 0) and a vanishing constant term."""
    from .qes import vanishing_constant_points

    out = []
    for N in range(1, n_max + 1):
        for cp in vanishing_constant_points(N):
            a2 = -1.5 * cp.gamma
            out.append((N, HeunSixParams(cp.alpha - a2 * a2 / 9.0, 0.0, a2, 0.0, 1.0, 0.0)))
    return out


def check_qes(n_max: int = 4, n_radial: int = 3, seed: int = 1) -> list[CheckResult]:
    """Polynomial eigenfunctions on the constraint curves and radial shooting of their energies."""
    from .maps import build_map
    from .oracle import radial_shoot
    from .potential import family_coefficients, v_eff
    from .qes import build_polynomial, constraint_gammas, energy_eigenvalue, on_curve

    rng = np.random.default_rng(seed)
    coeff_res, e_err = 0.0, 0.0
    for N in range(n_max + 1):
        alpha = float(rng.uniform(-2, 2))
        for k in range(len(constraint_gammas(N, alpha))):
            cp = on_curve(N, alpha, root=k)
            poly = build_polynomial(cp, N)
            coeff_res = max(coeff_res, float(np.max(np.abs(poly.ode_residual_coeffs()))))
        a1, b1 = float(rng.uniform(-2, 2)), float(rng.uniform(0.5, 3))
        E = energy_eigenvalue(a1, b1, N)
        e_err = max(e_err, abs((a1 + E * b1) - 3 * (N + 1)))
    shoot = []
    for N, p in qes_radial_instances(n_max)[:n_radial]:
        m = build_map(p)
        u = family_coefficients(p, m.tag, m).coeffs
        EN = energy_eigenvalue(p.a1, p.b1, N)
        terms = {0: u["u2"], 2: u["u1"], 3: u["u0"], 4: u["u3"], 6: u["u4"]}
        E = radial_shoot(lambda r: v_eff(p, m, r), terms, 5.0 / 6.0, (EN - 0.7, EN + 0.7), R=4.0 + math.sqrt(EN))
        shoot.append(abs(E - EN) / abs(EN))
    return [
        _result("qes.polynomial_coeff_residual", coeff_res, 1e-10),
        _result("qes.energy_formula", e_err, 1e-12),
        _result("qes.radial_shooting_rel", max(shoot), 1e-4, {"instances": len(shoot)}, passed=len(shoot) >= min(3, n_radial) and max(shoot) <= 1e-4),
    ]


def check_quartic_levels(n_top: int = 20, n_from: int = 5) -> list[CheckResult]:
    """Quartic levels against the large-n estimate; ratio near 1 at the top and decreasing."""
    from .oracle import ShootingProblem, quartic_level_estimate, shoot_spectrum

    t0 = time.perf_counter()
    levels = shoot_spectrum(ShootingProblem(), n_top + 1)
    elapsed = time.perf_counter() - t0
    ratios = [levels[n] / quartic_level_estimate(n, 2.25) for n in range(n_from, n_top + 1)]
    unit = shoot_spectrum(ShootingProblem(quartic=1.0), n_top + 1)
    unit_ratio = unit[n_top] / quartic_level_estimate(n_top)
    monotone = all(b < a for a, b in zip(ratios, ratios[1:]))
    return [
        _result("quartic_levels.ratio_top_dev", abs(ratios[-1] - 1.0), 0.1, {"ratio": ratios[-1]}),
        _result("quartic_levels.unit_quartic_dev", abs(unit_ratio - 1.0), 0.1, {"ratio": unit_ratio}),
        _result("quartic_levels.monotone", 0.0 if monotone else 1.0, 0.0, {"ratios": ratios}),
        _result("quartic_levels.runtime_s", elapsed, 120.0),
    ]


def check_series_vs_ode(n_sets: int = 20, n_points: int = 10, seed: int = 2) -> list[CheckResult]:
    from .oracle import integrate_canonical
    from .series import eval_series, t1_coeffs, t2_coeffs

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_sets):
        cp = CanonicalParams.from_abg(*rng.uniform(-3, 3, 3))
        s1, s2 = t1_coeffs(cp), t2_coeffs(cp)
        for rho in rng.uniform(-1.5, 1.5, n_points):
            y1, _ = integrate_canonical(cp, 1.0, 0.0, rho)
            y2, _ = integrate_canonical(cp, 0.0, 1.0, rho)
            worst = max(worst, abs(eval_series(s1, rho) - y1) / max(1.0, abs(y1)))
            worst = max(worst, abs(eval_series(s2, rho) - y2) / max(1.0, abs(y2)))
    return [_result("series_vs_ode.max_rel", worst, 1e-8)]


def check_recurrence(n_sets: int = 50, seed: int = 3, window: tuple[int, int] = (100, 300)) -> list[CheckResult]:
    from .recurrence import limit_check, plateau

    rng = np.random.default_rng(seed)
    tail = max(limit_check(CanonicalParams.from_abg(*rng.uniform(-3, 3, 3)), 200) for _ in range(n_sets))
    drift = 0.0
    for _ in range(max(3, n_sets // 10)):
        cp = CanonicalParams.from_abg(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(2, 4))
        drift = max(drift, plateau(cp, window, terms=3).drift)
    return [_result("recurrence.tail_max", tail, 1e-20), _result("recurrence.birkhoff_drift", drift, 0.02)]


def check_casoratian(n_sets: int = 10, n_max: int = 15, seed: int = 4) -> list[CheckResult]:
    from .recurrence import casoratian, w_from_initial

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_sets):
        cp = CanonicalParams.from_abg(*rng.uniform(-3, 3, 3))
        sols = [w_from_initial(cp, rng.uniform(-1, 1, 3), n_max + 2) for _ in range(3)]
        for n in range(n_max + 1):
            direct, pred = casoratian(cp, sols, n)
            worst = max(worst, abs(direct - pred) / max(abs(pred), 1e-300))
    return [_result("casoratian.max_rel", worst, 1e-10)]


def check_susy(n_sets: int = 10, seed: int = 5) -> list[CheckResult]:
    from .susy import Superpotential, factorization_residual, partner_potentials, riccati_residual

    rng = np.random.default_rng(seed)
    ric = vp = fac = 0.0
    for _ in range(n_sets):
        cp = CanonicalParams.from_abg(*rng.uniform(-3, 3, 3))
        for c1 in (0.0, 0.5, -0.5, 1.0):
            w = Superpotential(cp, c1)
            for x in np.linspace(-1.5, 1.5, 31):
                try:
                    ric = max(ric, abs(riccati_residual(w, x)))
                    _, vplus = partner_potentials(w, x)
                    vp = max(vp, abs(vplus - w.omega(x)))
                    fac = max(fac, factorization_residual(w, x))
                except NodeSingularity:
                    continue
    return [
        _result("susy.riccati", ric, 1e-8),
        _result("susy.vplus_minus_omega", vp, 1e-10),
        _result("susy.factorization", fac, 1e-7),
    ]


def check_special(grid_points: int = 200) -> list[CheckResult]:
    from .oracle import fd_residual
    from .special import (
        resolve_kappa_convention,
        v3_zero_energy_potential,
        v4_reduced_potential,
        v4_reduced_state,
        zero_energy_state,
    )

    p = HeunSixParams(0, 0, 0, 0, 0, 1)
    g3 = np.linspace(0.2, 3, grid_points)
    bes = max(
        fd_residual(lambda r: zero_energy_state(p, c1, c2, r), v3_zero_energy_potential(1.0), 0.0, g3, "h0").residual_max
        for c1, c2 in ((1, 0), (0, 1))
    )
    g4 = np.linspace(0.3, 2, grid_points)
    ev0 = max(
        fd_residual(lambda r: v4_reduced_state(1.0, 0.0, c1, c2, r).real, v4_reduced_potential(1.0), 0.0, g4, "h0").residual_max
        for c1, c2 in ((1, 0), (0, 1))
    )
    whit = max(
        fd_residual(lambda r: v4_reduced_state(1.0, E, 1, 0, r).real, v4_reduced_potential(1.0), E, g4, "h0").residual_max
        for E in (1.0, -2.0)
    )
    winner, scores = resolve_kappa_convention(1.0, 1.0, 0.0)
    return [
        _result("special.bessel_zero_energy", bes, 1e-6),
        _result("special.bessel_e_v0", ev0, 1e-6),
        _result("special.whittaker", whit, 1e-6),
        _result("special.kappa_convention", scores[winner], 1e-6, {"winner": winner, "scores": scores}, passed=winner == "v5"),
    ]


def check_maps(n_sets: int = 27, seed: int = 6) -> list[CheckResult]:
    from .oracle import fd_map_derivative
    from .potential import v_eff_rho, v_eff_rho_schwarzian

    rng = np.random.default_rng(seed)
    tags = list(CaseTag)
    trip = ode = eq = 0.0
    for i in range(n_sets):
        p = random_params(tags[i % len(tags)], rng)
        m = build_map(p)
        a, b = rho_window(m)
        for rho in np.linspace(a, b, 12):
            r = forward_map(m, rho)
            trip = max(trip, abs(inverse_map(m, r) - rho) / max(1.0, abs(rho)))
            ode = max(ode, abs(fd_map_derivative(m, r) - p.i1(rho) ** -0.5) * p.i1(rho) ** 0.5)
            v1, v2 = v_eff_rho(p, rho), v_eff_rho_schwarzian(p, rho)
            eq = max(eq, abs(v1 - v2) / max(1.0, abs(v1)))
    return [
        _result("maps.roundtrip", trip, 1e-10),
        _result("maps.derivative_ode", ode, 1e-6),
        _result("maps.veff_forms_agree", eq, 1e-10),
    ]


def random_family(rng: np.random.Generator, kind: str, a_scale: float = 40.0):
    from .potential import family_coefficients

    a = rng.uniform(-a_scale, a_scale, 3)
    u = lambda lo, hi: float(rng.uniform(lo, hi))  # noqa: E731
    if kind == "V1":
        b0, b2 = u(0.2, 2), u(0.2, 2)
        b = (b0, 2 * math.sqrt(b0 * b2), b2)
    elif kind == "V3":
        b = (0.0, 0.0, u(0.2, 2))
    elif kind == "V4":
        b = (u(-2, 2) or 0.5, u(0.2, 2), 0.0)
    else:
        b = (0.0, u(0.2, 2), 0.0)
    p = HeunSixParams(*a, *b)
    m = build_map(p)
    return family_coefficients(p, m.tag, m)


def check_critical_points(n_draws: int = 100, seed: int = 7) -> list[CheckResult]:
    from .potential import critical_points

    rng = np.random.default_rng(seed)
    bad = 0
    for kind in ("V1", "V3", "V4", "V5"):
        for _ in range(n_draws):
            rep = critical_points(random_family(rng, kind))
            if len(rep.roots) not in rep.possible_counts:
                bad += 1
    return [_result("critical_points.descartes_violations", bad, 0)]


SUITE = {
    "pipeline": (check_pipeline_closure, {"n_sets": 9, "grid_points": 60}),
    "qes": (check_qes, {"n_radial": 1}),
    "quartic_levels": (check_quartic_levels, {}),
    "series": (check_series_vs_ode, {"n_sets": 5, "n_points": 5}),
    "recurrence": (check_recurrence, {"n_sets": 10}),
    "casoratian": (check_casoratian, {"n_sets": 3}),
    "susy": (check_susy, {"n_sets": 3}),
    "special": (check_special, {"grid_points": 60}),
    "maps": (check_maps, {"n_sets": 9}),
    "critical": (check_critical_points, {"n_draws": 20}),
}


def run_suite(quick: bool = True) -> list[CheckResult]:
    out = []
    for fn, small in SUITE.values():
        out.extend(fn(**(small if quick else {})))
    return out
