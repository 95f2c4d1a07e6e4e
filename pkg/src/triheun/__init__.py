"""Schroedinger potentials whose radial equation reduces to the triconfluent Heun equation."""

from ._accel import BACKEND, HAS_NUMBA
from .errors import TriHeunError
from .maps import CaseTag, CoordinateMap, HeunSixParams, build_map, classify, forward_map, inverse_map
from .potential import Family, PotentialFamily, critical_points, family_coefficients, v_eff
from .qes import build_polynomial, determinant_condition, energy_eigenvalue, qes_constraint
from .recurrence import birkhoff_eval, casoratian, plateau
from .series import CanonicalParams, Wavefunction, eval_series, t1_coeffs, t2_coeffs
from .susy import Superpotential, partner_potentials, riccati_residual

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAS_NUMBA",
    "CanonicalParams",
    "CaseTag",
    "CoordinateMap",
    "Family",
    "HeunSixParams",
    "PotentialFamily",
    "Superpotential",
    "TriHeunError",
    "Wavefunction",
    "birkhoff_eval",
    "build_map",
    "build_polynomial",
    "casoratian",
    "classify",
    "critical_points",
    "determinant_condition",
    "energy_eigenvalue",
    "eval_series",
    "family_coefficients",
    "forward_map",
    "inverse_map",
    "partner_potentials",
    "plateau",
    "qes_constraint",
    "riccati_residual",
    "t1_coeffs",
    "t2_coeffs",
    "v_eff",
]
