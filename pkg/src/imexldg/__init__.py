"""Asymptotic-preserving IMEX1-LDG solver for one-dimensional linear kinetic transport."""
from .energy import EnergyRecord, check_monotone, energy, weighted_norm_s
from .errors import (
    ConfigurationError,
    DomainError,
    ImexLdgError,
    NumericalError,
    TheoryInapplicableError,
    UnsupportedDegreeError,
)
from .limit import LimitSolver, LimitState, initialize_limit, limit_step, run_limit
from .materials import MaterialCoefficients, affine, constant, sinusoidal
from .mesh_basis import DGField, Mesh1D, build_mesh, l2_project
from .operators import FluxPair, LdgMatrices, assemble_ldg
from .stability import (
    Region,
    auto_mu,
    classify_region,
    dt_stab_combined,
    dt_stab_optimal,
    dt_uniform,
    mu_step_bounds,
    mu_thresholds,
    remark36_roots,
    special_roots,
    stability_params,
)
from .stepper import Imex1Stepper, KineticState, WeightFunction, initialize, run, step
from .velocity import VelocitySpace, make_velocity_space, moment

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DGField",
    "DomainError",
    "EnergyRecord",
    "FluxPair",
    "Imex1Stepper",
    "ImexLdgError",
    "KineticState",
    "LdgMatrices",
    "LimitSolver",
    "LimitState",
    "MaterialCoefficients",
    "Mesh1D",
    "NumericalError",
    "Region",
    "TheoryInapplicableError",
    "UnsupportedDegreeError",
    "VelocitySpace",
    "WeightFunction",
    "affine",
    "assemble_ldg",
    "auto_mu",
    "build_mesh",
    "check_monotone",
    "classify_region",
    "constant",
    "dt_stab_combined",
    "dt_stab_optimal",
    "dt_uniform",
    "energy",
    "initialize",
    "initialize_limit",
    "l2_project",
    "limit_step",
    "make_velocity_space",
    "moment",
    "mu_step_bounds",
    "mu_thresholds",
    "remark36_roots",
    "run",
    "run_limit",
    "sinusoidal",
    "special_roots",
    "stability_params",
    "step",
    "weighted_norm_s",
]
