"""
Laplace Panels - analytical Galerkin integrals of 1/|x - y| over flat triangles.
"""

from .errors import (
    AmbiguousContact,
    ConfigError,
    DegenerateTriangle,
    DivergentEdgeIntegral,
    GalerkinError,
    InadmissibleCombination,
    InputError,
    InvalidGapPattern,
    NonPositiveP,
    NotParallel,
    ToleranceNotReached,
)
from .geometry import ContactClass, ContactKind, Triangle, contact_classification, triangle_from_vertices
from .pbf import KernelFamily, pbf
from .potentials import (
    Branch,
    ContourFlux,
    EdgePairIntegrals,
    GalerkinOutput,
    common_edge_integral,
    contour_flux,
    double_layer,
    edge_pair_integrals,
    galerkin_all,
    grad_single_layer,
    hypersingular,
    self_action,
    single_layer,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "AmbiguousContact",
    "Branch",
    "ConfigError",
    "ContactClass",
    "ContactKind",
    "ContourFlux",
    "DEFAULT_TOLERANCES",
    "DegenerateTriangle",
    "DivergentEdgeIntegral",
    "EdgePairIntegrals",
    "GalerkinError",
    "GalerkinOutput",
    "InadmissibleCombination",
    "InputError",
    "InvalidGapPattern",
    "KernelFamily",
    "NonPositiveP",
    "NotParallel",
    "Tolerances",
    "ToleranceNotReached",
    "Triangle",
    "common_edge_integral",
    "contact_classification",
    "contour_flux",
    "double_layer",
    "edge_pair_integrals",
    "galerkin_all",
    "grad_single_layer",
    "hypersingular",
    "pbf",
    "self_action",
    "single_layer",
    "triangle_from_vertices",
]
