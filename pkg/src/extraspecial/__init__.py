"""Exact computations for the mod-p cohomology of extraspecial p-groups modulo
nilpotents, modelled by restrictions to maximal elementary abelian subgroups."""

from .config import ConfigError, GlobalConfig, config_load
from .dickson import check_v_expansion, dickson_Q, euler_product, mui_V
from .model import ExtraspecialModel, MultiIndex, enumerate_R
from .poly import MultiPoly, VariableContext, format_poly, parse_poly
from .quotient import GradedQuotient
from .steenrod import norm_of_restriction, steenrod_operation
from .symplectic import Lagrangian, SymplecticSpace, enumerate_lagrangians

__all__ = [
    "ConfigError", "GlobalConfig", "config_load", "check_v_expansion", "dickson_Q",
    "euler_product", "mui_V", "ExtraspecialModel", "MultiIndex", "enumerate_R",
    "MultiPoly", "VariableContext", "format_poly", "parse_poly", "GradedQuotient",
    "norm_of_restriction", "steenrod_operation", "Lagrangian", "SymplecticSpace",
    "enumerate_lagrangians",
]
