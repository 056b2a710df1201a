"""Exact computations for reflection mappings: images, double points and curve invariants."""

from .curveinv import InvariantReport, LocalCurve, Unknown, branch_count, delta, full_report, intersection_number, milnor
from .cyclotomic import CycloElem, CycloField, make_field
from .groebner import IdealBasis, ResourceError, gb_settings, groebner, saturate
from .group import OrbitMap, ReflGroup, builtin_group, close_group, extend_trivially, verify_orbit_map
from .mora import standard_basis
from .orders import DEGREVLEX, LEX, LOCAL, MonOrder, block_elim
from .poly import Poly, VarContext, parse_poly
from .problem import load_problem
from .refmap import (
    PreconditionError,
    ReflMapping,
    all_branches,
    branch_lambda,
    degree,
    dsigma_ideal,
    image_equation,
    k2sigma_charts,
)

__version__ = "0.1.0"

__all__ = [
    "CycloElem",
    "CycloField",
    "DEGREVLEX",
    "IdealBasis",
    "InvariantReport",
    "LEX",
    "LOCAL",
    "LocalCurve",
    "MonOrder",
    "OrbitMap",
    "Poly",
    "PreconditionError",
    "ReflGroup",
    "ReflMapping",
    "ResourceError",
    "Unknown",
    "VarContext",
    "all_branches",
    "block_elim",
    "branch_count",
    "branch_lambda",
    "builtin_group",
    "close_group",
    "degree",
    "delta",
    "dsigma_ideal",
    "extend_trivially",
    "full_report",
    "gb_settings",
    "groebner",
    "image_equation",
    "intersection_number",
    "k2sigma_charts",
    "load_problem",
    "make_field",
    "milnor",
    "parse_poly",
    "saturate",
    "standard_basis",
    "verify_orbit_map",
]
