"""Numerical certification of holomorphic cylinders along foliations.

The package evaluates the obstruction tensor that detects when a foliated
complex surface with parabolic leaves can contain a holomorphic cylinder,
using exact forward-mode jet arithmetic in mixed Wirtinger coordinates.
"""

__version__ = "0.1.0"

from .errors import (
    CheckFailed,
    DivisionNearPole,
    ExprSyntaxError,
    FoliaError,
    InsufficientSamples,
    LogBranchNearZero,
    ManifestError,
    NewtonDiverged,
    NotLeafwiseHolomorphic,
    PeriodNotAPeriod,
    SingularJacobian,
    StencilHitsZeroSet,
    StencilOutsideDomain,
    TangencyViolated,
    ValidationFailed,
    VanishingSample,
)
from .wirtinger import (
    DEFAULT_ORDER,
    MAX_ORDER,
    WirtingerJet,
    constant_jet,
    derivative_jet,
    fd_wirtinger,
    holomorphy_residual,
    jet_seed,
)
from .exprlang import (
    Expr,
    assert_y_holomorphic,
    eval_jet,
    eval_jet_env,
    parse,
    to_source,
)
from .foliation import (
    CylinderMap,
    Domain,
    FoliationModel,
    GraphModel,
    ProductModel,
    cylinder_map,
    differential,
    eval_grid,
    excluded_reason,
    explicit_cylinder_model,
    graph_model,
    invert_local,
    product_model,
    project_along_leaves,
    second_cylinder,
    vogel_points,
)
from .invariants import (
    FiberAffineChange,
    FormCoefficients,
    OmegaJet,
    PointSample,
    TensorReport,
    a_change_residual,
    a_form,
    admissibility_residuals,
    ambient_forms,
    certify,
    connection_coefficient,
    fiber_affine_change,
    gamma_ambient,
    gamma_cyl,
    gamma_from_chart,
    omega,
    pullback_residuals,
    random_reparametrizations,
)
from .holonomy import (
    HolonomyDatum,
    PeriodFamily,
    exponential_fit,
    holonomy_growth_residual,
    period_family,
    periodicity_residual,
)
from .curvature import (
    LeafField,
    holomorphic_log_harmonicity,
    leaf_laplacian,
    negative_curvature_margin,
)
from .report import render_figures, tensor_payload, write_grid_csv, \
    write_run_report

__all__ = [
    "CheckFailed",
    "CylinderMap",
    "DEFAULT_ORDER",
    "DivisionNearPole",
    "Domain",
    "Expr",
    "ExprSyntaxError",
    "FiberAffineChange",
    "FoliaError",
    "FoliationModel",
    "FormCoefficients",
    "GraphModel",
    "HolonomyDatum",
    "InsufficientSamples",
    "LeafField",
    "LogBranchNearZero",
    "MAX_ORDER",
    "ManifestError",
    "NewtonDiverged",
    "NotLeafwiseHolomorphic",
    "OmegaJet",
    "PeriodFamily",
    "PeriodNotAPeriod",
    "PointSample",
    "ProductModel",
    "SingularJacobian",
    "StencilHitsZeroSet",
    "StencilOutsideDomain",
    "TangencyViolated",
    "TensorReport",
    "ValidationFailed",
    "VanishingSample",
    "WirtingerJet",
    "a_change_residual",
    "a_form",
    "admissibility_residuals",
    "ambient_forms",
    "assert_y_holomorphic",
    "certify",
    "connection_coefficient",
    "constant_jet",
    "cylinder_map",
    "derivative_jet",
    "differential",
    "eval_grid",
    "eval_jet",
    "eval_jet_env",
    "excluded_reason",
    "explicit_cylinder_model",
    "exponential_fit",
    "fd_wirtinger",
    "fiber_affine_change",
    "gamma_ambient",
    "gamma_cyl",
    "gamma_from_chart",
    "graph_model",
    "holomorphic_log_harmonicity",
    "holomorphy_residual",
    "holonomy_growth_residual",
    "invert_local",
    "jet_seed",
    "leaf_laplacian",
    "negative_curvature_margin",
    "omega",
    "parse",
    "period_family",
    "periodicity_residual",
    "product_model",
    "project_along_leaves",
    "pullback_residuals",
    "random_reparametrizations",
    "render_figures",
    "second_cylinder",
    "tensor_payload",
    "to_source",
    "vogel_points",
    "write_grid_csv",
    "write_run_report",
]
