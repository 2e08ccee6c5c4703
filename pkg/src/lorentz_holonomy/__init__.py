"""Exact curvature, recurrence and holonomy computations for Walker metrics."""
from .symexpr import Expr, JetPoint, DenomExpr, parse_expr, InsufficientJet, DivisionByZeroExpr
from .walker import (
    SIGN_CONVENTION,
    WalkerMetric,
    TensorField,
    metric_tensor,
    inverse_metric,
    christoffel,
    riemann,
    covariant_derivative,
    nabla_riemann,
    ricci_and_scalar,
    weyl_general,
    weyl_walker,
    adapted_frame,
)
from .decomp import CurvatureBlocks, decompose_curvature, reconstruct_curvature, validate_P
from .conditions import (
    RecurrenceReport,
    recurrence_factor,
    is_two_symmetric,
    weyl_recurrence,
    recurrent_bilinear_forms,
    is_pp_wave,
)
from .holonomy import (
    HolonomyReport,
    wedge,
    infinitesimal_holonomy,
    classify_type,
    check_phi_psi_conditions,
)
from . import families

__version__ = "0.1.0"

__all__ = [
    "Expr", "JetPoint", "DenomExpr", "parse_expr", "InsufficientJet", "DivisionByZeroExpr",
    "SIGN_CONVENTION", "WalkerMetric", "TensorField", "metric_tensor", "inverse_metric",
    "christoffel", "riemann", "covariant_derivative", "nabla_riemann", "ricci_and_scalar",
    "weyl_general", "weyl_walker", "adapted_frame",
    "CurvatureBlocks", "decompose_curvature", "reconstruct_curvature", "validate_P",
    "RecurrenceReport", "recurrence_factor", "is_two_symmetric", "weyl_recurrence",
    "recurrent_bilinear_forms", "is_pp_wave",
    "HolonomyReport", "wedge", "infinitesimal_holonomy", "classify_type",
    "check_phi_psi_conditions", "families",
]
