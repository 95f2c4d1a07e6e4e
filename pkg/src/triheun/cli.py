"""Command-line front end: every stage as a subcommand that writes a CSV or JSON table."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from importlib import resources

import numpy as np

from . import __version__
from .errors import TriHeunError

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_MATH, EXIT_VALIDATION = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ parsing helpers


def load_presets() -> dict:
    with resources.files("triheun").joinpath("presets.json").open("r", encoding="utf-8") as fh:
        return json.load(fh)


def parse_floats(text, n: int, field: str) -> list[float]:
    if isinstance(text, (list, tuple)):
        vals = list(text)
    else:
        vals = [v for v in str(text).split(",") if v.strip()]
    try:
        out = [float(v) for v in vals]
    except ValueError as exc:
        raise ConfigError(f"{field}: {exc}") from exc
    if len(out) != n:
        raise ConfigError(f"{field}: expected {n} comma-separated numbers, got {len(out)}")
    return out


def parse_grid(text: str) -> np.ndarray:
    parts = str(text).split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"grid: expected min:max:count[:log], got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    if count < 2:
        raise ConfigError("grid: count must be at least 2")
    if not lo < hi:
        raise ConfigError("grid: min must be below max")
    if len(parts) == 4:
        if parts[3] != "log":
            raise ConfigError(f"grid: unknown spacing {parts[3]!r}")
        if lo <= 0:
            raise ConfigError("grid: log spacing needs min > 0")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % (float(x) + 0.0)
    if x is None:
        return ""
    return str(x)


def _json_value(x) -> str:
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in x) + "]"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % (float(x) + 0.0) if math.isfinite(x) else "null"
    if x is None:
        return "null"
    return json.dumps(str(x))


def render(columns: list[str], rows: list[list], fmt_name: str, meta: dict) -> str:
    if fmt_name == "csv":
        lines = [",".join(columns)] + [",".join(fmt(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    doc = {"schema_version": SCHEMA_VERSION, "meta": meta, "columns": columns, "rows": rows}
    return _json_value(doc) + "\n"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".triheun-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ------------------------------------------------------------------ config


def _six(cfg):
    from .maps import HeunSixParams

    if cfg.get("params") is None:
        raise ConfigError("--params a0,a1,a2,b0,b1,b2 is required for this command")
    return HeunSixParams.from_sequence(parse_floats(cfg["params"], 6, "params"))


def _canonical(cfg):
    from .series import CanonicalParams

    if cfg.get("canonical") is None:
        raise ConfigError("--canonical alpha,beta,gamma is required for this command")
    return CanonicalParams.from_abg(*parse_floats(cfg["canonical"], 3, "canonical"))


def _grid(cfg, default: str) -> np.ndarray:
    return parse_grid(cfg.get("grid") or default)


# ------------------------------------------------------------------ commands


def cmd_classify(cfg):
    from .maps import build_map

    p = _six(cfg)
    m = build_map(p)
    cols = ["tag", "delta", "inversion_mode", "anchor", "rho_lo", "rho_hi", "r_lo", "r_hi", "covers_half_line"]
    row = [m.tag.value, p.delta, m.inversion_mode.value, m.anchor, *m.rho_domain, *m.r_domain, m.covers_half_line]
    return cols, [row], {"command": "classify"}


def cmd_map(cfg):
    from .maps import build_map, forward_map, inverse_map

    p = _six(cfg)
    m = build_map(p)
    rows = []
    for r in _grid(cfg, "0:5:51"):
        if not m.r_domain[0] <= r <= m.r_domain[1]:
            continue
        rho = inverse_map(m, r)
        back = forward_map(m, rho)
        rows.append([r, rho, back, abs(back - r)])
    return ["r", "rho", "r_roundtrip", "abs_error"], rows, {"command": "map", "tag": m.tag.value}


def cmd_potential(cfg):
    from .errors import UnsupportedFamily
    from .maps import build_map
    from .potential import critical_points, family_coefficients, v_eff

    p = _six(cfg)
    m = build_map(p)
    try:
        fam = family_coefficients(p, m.tag, m)
    except UnsupportedFamily:
        fam = None
    rows = []
    for r in _grid(cfg, "0:10:101"):
        if not m.r_domain[0] <= r <= m.r_domain[1]:
            continue
        try:
            v = v_eff(p, m, r)
        except TriHeunError:
            v = math.nan
        fv = math.nan
        if fam is not None:
            try:
                fv = fam.evaluate(r)
            except (TriHeunError, ZeroDivisionError):
                fv = math.nan
        rows.append([r, v, fv])
    meta = {"command": "potential", "tag": m.tag.value, "family": fam.family.value if fam else "General"}
    if fam is not None:
        meta["coefficients"] = fam.coeffs
        rep = critical_points(fam)
        meta["critical_points"] = {
            "variable": rep.variable,
            "polynomial": list(rep.polynomial),
            "sign_changes": rep.sign_changes,
            "possible_counts": sorted(rep.possible_counts),
            "roots": list(rep.roots),
            "classification": list(rep.classification),
        }
    return ["r", "v_eff", "v_family"], rows, meta


def cmd_series(cfg):
    from .series import eval_series_derivs, ode_residual, t1_coeffs, t2_coeffs

    cp = _canonical(cfg)
    order = int(cfg.get("order") or 120)
    s1, s2 = t1_coeffs(cp, order), t2_coeffs(cp, order)
    rows = []
    for rho in _grid(cfg, "-1.5:1.5:31"):
        y1 = eval_series_derivs(s1, rho)
        y2 = eval_series_derivs(s2, rho)
        rows.append([rho, y1[0], y1[1], y2[0], y2[1], ode_residual(cp, *y1, rho), ode_residual(cp, *y2, rho)])
    cols = ["rho", "T1", "dT1", "T2", "dT2", "residual_T1", "residual_T2"]
    return cols, rows, {"command": "series", "canonical": list(cp.abg)}


def cmd_spectrum(cfg):
    from .qes import build_polynomial, determinant_condition, energy_eigenvalue
    from .errors import NoNontrivialSolution
    from .series import CanonicalParams

    p = _six(cfg)
    nmax = int(cfg.get("nmax") if cfg.get("nmax") is not None else 4)
    rows = []
    polys = {}
    for N in range(nmax + 1):
        E = energy_eigenvalue(p.a1, p.b1, N)
        cp = CanonicalParams.from_six(p, E)
        det = determinant_condition(cp, N)
        try:
            poly = build_polynomial(cp, N)
            polys[str(N)] = list(poly.coeffs)
            ok = True
        except NoNontrivialSolution:
            ok = False
        rows.append([N, E, cp.alpha, cp.beta, cp.gamma, det, ok])
    cols = ["N", "E_N", "alpha", "beta", "gamma", "determinant", "polynomial_exists"]
    return cols, rows, {"command": "spectrum", "polynomials": polys}


def cmd_asym(cfg):
    from .recurrence import abel_prediction, birkhoff_log, log_abs_w, w_from_initial, casoratian

    cp = _canonical(cfg)
    grid = _grid(cfg, "10:200:191")
    ns = sorted({int(round(x)) for x in grid if x >= 10})
    terms = int(cfg.get("terms") if cfg.get("terms") is not None else 3)
    sign, logs = log_abs_w(cp, max(ns))
    basis = [w_from_initial(cp, z, 18) for z in np.eye(3)]
    rows = []
    for n in ns:
        w = sign[n] * math.exp(logs[n]) if math.isfinite(logs[n]) else 0.0
        lb = birkhoff_log(cp, 0, n, terms)
        b = math.exp(lb.real) * math.cos(lb.imag)
        # ratio in log space so it survives underflow of both factors
        ratio = sign[n] * math.copysign(math.exp(logs[n] - lb.real), math.cos(lb.imag)) if math.isfinite(logs[n]) else 0.0
        if n <= 15:
            direct, pred = casoratian(cp, basis, n)
        else:
            direct, pred = math.nan, abel_prediction(cp, n)
        rows.append([n, w, b, ratio, direct, pred])
    cols = ["n", "w_n", "birkhoff_k0", "ratio", "casoratian_direct", "casoratian_abel"]
    return cols, rows, {"command": "asym", "canonical": list(cp.abg), "terms": terms}


def cmd_susy(cfg):
    from .errors import NodeSingularity
    from .susy import Superpotential, partner_potentials, riccati_residual

    cp = _canonical(cfg)
    c1 = float(cfg.get("c1") or 0.0)
    grid = _grid(cfg, "-1.5:1.5:121")
    w = Superpotential(cp, c1, domain=(float(grid[0]), float(grid[-1])))
    rows = []
    for rho in grid:
        try:
            W = w(rho)
            vm, vp = partner_potentials(w, rho)
            res = riccati_residual(w, rho)
        except NodeSingularity:
            W = vm = vp = res = math.nan
        rows.append([rho, W, vm, vp, cp.omega(rho), res])
    meta = {"command": "susy", "canonical": list(cp.abg), "c1": c1, "nodes": list(w.nodes())}
    return ["rho", "W", "V_minus", "V_plus", "Omega", "riccati_residual"], rows, meta


def cmd_special(cfg):
    from .oracle import fd_residual
    from .special import (
        v3_zero_energy_potential,
        v4_reduced_potential,
        v4_reduced_state,
        zero_energy_state,
    )

    kind = cfg.get("kind") or "bessel"
    conv = cfg.get("convention") or "h0"
    grid = _grid(cfg, "0.2:3:141" if kind == "bessel" else "0.3:2:101")
    if kind == "bessel":
        p = _six(cfg) if cfg.get("params") is not None else None
        from .maps import HeunSixParams

        p = p or HeunSixParams(0, 0, 0, 0, 0, 1)
        psi = lambda r: zero_energy_state(p, 1.0, 0.0, r)  # noqa: E731
        V, E = v3_zero_energy_potential(p.b2), 0.0
    elif kind == "whittaker":
        b1 = float(cfg.get("b1") or 1.0)
        E = float(cfg.get("energy") or 0.0)
        v0 = float(cfg.get("v0") or 0.0)
        kconv = cfg.get("kappa") or "v5"
        psi = lambda r: v4_reduced_state(b1, E, 1.0, 0.0, r, v0, kconv).real  # noqa: E731
        V = v4_reduced_potential(b1, v0)
    else:
        raise ConfigError(f"special: unknown kind {kind!r}")
    rows = [[r, psi(r)] for r in grid]
    rep = fd_residual(psi, V, E, grid, conv)
    meta = {"command": "special", "kind": kind, "convention": conv, "fd_residual": rep.residual_max}
    return ["r", "psi"], rows, meta


def cmd_validate(cfg):
    from .validate import run_suite

    results = run_suite(quick=not cfg.get("full"))
    # wall-clock checks gate the exit status but stay out of the table so reruns are byte-identical
    rows = [[r.name, r.value, r.threshold, r.passed] for r in results if not r.name.endswith("runtime_s")]
    meta = {"command": "validate", "all_passed": all(r.passed for r in results)}
    return ["check", "value", "threshold", "passed"], rows, meta


COMMANDS = {
    "classify": cmd_classify,
    "map": cmd_map,
    "potential": cmd_potential,
    "series": cmd_series,
    "spectrum": cmd_spectrum,
    "asym": cmd_asym,
    "susy": cmd_susy,
    "special": cmd_special,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="triheun", description="Triconfluent Heun potentials toolkit")
    ap.add_argument("--version", action="version", version=f"triheun {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--params", help="a0,a1,a2,b0,b1,b2")
        sp.add_argument("--canonical", help="alpha,beta,gamma")
        sp.add_argument("--grid", help="min:max:count[:log]")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--out", help="output path (stdout if omitted)")
        sp.add_argument("--convention", choices=("sh1", "h0"))
        sp.add_argument("--preset")
        sp.add_argument("--config", help="JSON file with the same keys as the flags")
        sp.add_argument("--c1", type=float)
        sp.add_argument("--nmax", type=int)
        sp.add_argument("--terms", type=int)
        sp.add_argument("--order", type=int)
        sp.add_argument("--kind", choices=("bessel", "whittaker"))
        sp.add_argument("--kappa", choices=("v5", "sqrt5"), help="Whittaker index normalization")
        sp.add_argument("--b1", type=float)
        sp.add_argument("--energy", type=float)
        sp.add_argument("--v0", type=float)
        sp.add_argument("--full", action="store_true", help="validate: run the full-size suite")
    return ap


def resolve_config(ns: argparse.Namespace) -> dict:
    cfg: dict = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                cfg.update(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {ns.config}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        except OSError as exc:
            raise ConfigError(f"config {ns.config}: {exc}") from exc
    preset = ns.preset or cfg.get("preset")
    if preset:
        presets = load_presets()
        if preset not in presets:
            raise ConfigError(f"unknown preset {preset!r}; known: {', '.join(sorted(presets))}")
        cfg = {**presets[preset], **cfg}
    for k, v in vars(ns).items():
        if k in ("config", "command") or v is None or v is False:
            continue
        cfg[k] = v
    cfg.setdefault("format", "csv")
    return cfg


VALUE_FLAGS = ("--params", "--canonical", "--grid")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--grid -1:1:5`` as ``--grid=-1:1:5`` so argparse keeps the leading minus."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1][:1] == "-" and argv[i + 1][1:2].isdigit() | (argv[i + 1][1:2] == "."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    ns = parser.parse_args(_glue_negative_values(argv))
    try:
        cfg = resolve_config(ns)
        cols, rows, meta = COMMANDS[ns.command](cfg)
        text = render(cols, rows, cfg["format"], meta)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except (TriHeunError, ArithmeticError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_MATH
    if cfg.get("out"):
        write_atomic(cfg["out"], text)
    else:
        sys.stdout.write(text)
    if ns.command == "validate" and not meta.get("all_passed", True):
        return EXIT_VALIDATION
    return EXIT_OK


def main() -> None:
    sys.exit(run())
