"""fraclab: a numerical laboratory for the nonlocal eigenvalue problem on an
interval with exterior-zero condition, its capacities, and the weighted
half-plane extension, built to measure eigenvalue perturbation under
removal of small compact sets.

Two independent discretizations of the same operator are provided -- the
exact Toeplitz realization of the difference-quotient form, and the
Dirichlet-to-Neumann Schur complement of the weighted extension -- so
every headline quantity can be cross-checked.
"""

__version__ = "0.1.0"

from .angular import (
    AngularSpectrum,
    Profile,
    VanishingFit,
    gamma_exponent,
    hat_psi,
    solve_angular,
    vanishing_order_fit,
)
from .assembly import (
    HardyForm,
    MassOperator,
    StiffnessOperator,
    assemble_hardy_form,
    assemble_mass,
    assemble_stiffness,
    toeplitz_entry,
    toeplitz_entry_quad,
)
from .asymptotics import (
    ComparisonTable,
    RateFit,
    SweepConfig,
    SweepTable,
    Verdict,
    classical_eigenvalues,
    classical_ucap_interval,
    fit_rate,
    run_sweep,
    scaling_prefactor_check,
    spectral_comparison,
    verify_continuity,
    verify_expansion,
)
from .capacity import (
    CapacityResult,
    ExtrapolationResult,
    condenser_capacity,
    u_capacity,
    whole_line_u_capacity,
)
from .core import FracParams, Grid, NodeMask, build_grid, make_params, nodes_in_set
from .eigs import EigenPairs, rayleigh, solve_eigs
from .errors import (
    ConfigError,
    ConsistencyError,
    FracLabError,
    GeometryError,
    GridError,
    InsufficientDataError,
    NumericalError,
    ParameterError,
    ResolutionError,
)
from .extension import (
    ExtMesh,
    ExtOperator,
    TraceOperator,
    assemble_extension,
    build_extension_mesh,
    dtn_schur,
    extension_capacity,
    extension_eigs,
    weighted_hardy_terms,
)

__all__ = [
    "__version__",
    # core
    "FracParams", "Grid", "NodeMask", "make_params", "build_grid", "nodes_in_set",
    # assembly
    "StiffnessOperator", "MassOperator", "HardyForm",
    "assemble_stiffness", "assemble_mass", "assemble_hardy_form",
    "toeplitz_entry", "toeplitz_entry_quad",
    # eigs
    "EigenPairs", "solve_eigs", "rayleigh",
    # capacity
    "CapacityResult", "ExtrapolationResult",
    "condenser_capacity", "u_capacity", "whole_line_u_capacity",
    # angular
    "AngularSpectrum", "Profile", "VanishingFit",
    "solve_angular", "gamma_exponent", "hat_psi", "vanishing_order_fit",
    # extension
    "ExtMesh", "ExtOperator", "TraceOperator",
    "build_extension_mesh", "assemble_extension", "dtn_schur",
    "extension_eigs", "extension_capacity", "weighted_hardy_terms",
    # asymptotics
    "SweepConfig", "SweepTable", "RateFit", "Verdict", "ComparisonTable",
    "run_sweep", "fit_rate", "verify_expansion", "verify_continuity",
    "scaling_prefactor_check", "spectral_comparison",
    "classical_eigenvalues", "classical_ucap_interval",
    # errors
    "FracLabError", "ParameterError", "GridError", "GeometryError",
    "ResolutionError", "NumericalError", "InsufficientDataError",
    "ConsistencyError", "ConfigError",
]
