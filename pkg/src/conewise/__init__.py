"""Cone spectral radii and Collatz-Wielandt certificates for order-preserving homogeneous maps on R^n_+."""

from .cone import (
    ConeVector,
    SliceConfig,
    hilbert_dist,
    lattice_join,
    lower_ratio,
    project_to_slice,
    thompson_dist,
    u_norm,
    upper_ratio,
)
from .operators import (
    InfFamily,
    Linear,
    MaxPlusConjugate,
    MinMax,
    Perturbed,
    Power,
    SupFamily,
    WholeSpace,
    apply,
    apply_with_selection,
    operator_from_json,
    operator_norm_on_cone,
    restrict_to_negative_cone,
)
from .solver import (
    EigenSolveResult,
    SolverConfig,
    bonsall_estimate,
    contraction_constant,
    cw_upper,
    eigen_solve,
    growth_rate,
    regularized_inner_solve,
    super_eigen_join,
    uniqueness_contraction_check,
    whole_space_radius,
)

__version__ = "0.1.0"
