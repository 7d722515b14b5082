"""Numerical toolkit for outer functions, boundary zero sets and Lipschitz-Dirichlet norms."""
from .disc import (
    AnnularGrid,
    Arc,
    ArcSet,
    BoundaryGrid,
    BoundaryPointSet,
    TaylorCoefficients,
    analyze,
    carleson_integral,
    complement_arcs,
    normalize_arcset,
    synthesize,
)
from .errors import DirlipError, FactorizationError, GridResolutionError, HypothesisError, PinchError
from .factor import (
    BlaschkeProduct,
    DiscFunction,
    LogModulus,
    g_kernel,
    herglotz_potential,
    inner_outer_split,
    localized_outer_power,
    outer_from_modulus,
    outer_power,
    product_potential,
)
from .norms import aalpha_norm, dirichlet_energy_coeff, dirichlet_energy_quad, lip_seminorm, sup_norm

__version__ = "0.1.0"
