"""Period function analysis for potential centers x' = -y, y' = g(x)."""
from .criteria import (
    AnalysisReport,
    build_sas,
    chicone_check,
    classify,
    count_balance_zeros,
    count_phi_balance_zeros,
    degree_bound,
    exactness_check,
    necessary_monotone_check,
    rolle_reduce,
    scan_critical_periods,
)
from .exactpoly import BiPoly, Poly, RationalFunction, isolate_system, real_roots, sturm_count
from .fractional import abel_invert, frac_integral
from .involution import balance, delta, phi, sigma
from .potential import Potential, PotentialError, annulus, potential_from_json, validate
from .quadrature import QuadratureError, d2period, dperiod, period
from .registry import named

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "BiPoly",
    "Poly",
    "Potential",
    "PotentialError",
    "QuadratureError",
    "RationalFunction",
    "abel_invert",
    "annulus",
    "balance",
    "build_sas",
    "chicone_check",
    "classify",
    "count_balance_zeros",
    "count_phi_balance_zeros",
    "d2period",
    "degree_bound",
    "delta",
    "dperiod",
    "exactness_check",
    "frac_integral",
    "isolate_system",
    "named",
    "necessary_monotone_check",
    "period",
    "phi",
    "potential_from_json",
    "real_roots",
    "rolle_reduce",
    "scan_critical_periods",
    "sigma",
    "sturm_count",
    "validate",
]
