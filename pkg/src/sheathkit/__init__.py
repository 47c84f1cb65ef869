"""Kinetic and hydrodynamic plasma-sheath boundary value problem toolkit.

The package solves the stationary half-line sheath problem by reducing the
coupled kinetic/Poisson system to a scalar pseudopotential: ion densities are
computed as velocity moments transported along energy characteristics, the
pseudopotential's convexity at the bulk classifies solvability (the kinetic
and generalized Bohm criteria), and the potential profile follows from a
single quadrature of the first integral.  A fluid (cold-ion) limit module
verifies the narrow-width limit of mollified beam families.
"""

from .dists import (
    BoundaryConfig,
    Bump,
    BumpProfile,
    CompositeDistribution,
    DistributionSpec,
    ElectronModel,
    GeneralFamily,
    check_necessary_conditions,
    flux,
    kinetic_bohm_integral,
    make_delta_family,
    mass,
)
from .errors import (
    BohmViolated,
    DomainError,
    InsufficientDecay,
    NeutralityViolation,
    NoRoot,
    NoSolution,
    NoSolutionCriterion,
    NoSolutionEmptyB,
    NotApplicable,
    PhiBOutOfRange,
    RejectAlphaOne,
    RejectEps,
    RejectGeneralReduction,
    RejectVelocityBalance,
    SheathError,
    ValidationError,
)
from .hydro import (
    ConvergenceStudy,
    delta_mass_study,
    euler_poisson_model,
    generalized_model,
    solve_euler_poisson,
    solve_generalized,
)
from .kernels import KernelContext, bound_check, rho_i, rho_i_minus, rho_i_plus
from .sagdeev import (
    MARGINAL_EMPTY,
    MARGINAL_SOLVABLE,
    STRICT,
    VIOLATED,
    SagdeevData,
    bohm_report,
    build_sagdeev,
    inf_B,
    sup_B,
)
from .sheath import (
    PotentialProfile,
    SheathSolution,
    fit_decay_rate,
    make_solution,
    moments,
    poisson_residual,
    reconstruct_f,
    solve_phi,
)

__version__ = "0.1.0"

__all__ = [
    "BohmViolated",
    "BoundaryConfig",
    "Bump",
    "BumpProfile",
    "CompositeDistribution",
    "ConvergenceStudy",
    "DistributionSpec",
    "DomainError",
    "ElectronModel",
    "GeneralFamily",
    "InsufficientDecay",
    "KernelContext",
    "MARGINAL_EMPTY",
    "MARGINAL_SOLVABLE",
    "NeutralityViolation",
    "NoRoot",
    "NoSolution",
    "NoSolutionCriterion",
    "NoSolutionEmptyB",
    "NotApplicable",
    "PhiBOutOfRange",
    "PotentialProfile",
    "RejectAlphaOne",
    "RejectEps",
    "RejectGeneralReduction",
    "RejectVelocityBalance",
    "SagdeevData",
    "SheathError",
    "SheathSolution",
    "STRICT",
    "VIOLATED",
    "ValidationError",
    "bohm_report",
    "bound_check",
    "build_sagdeev",
    "check_necessary_conditions",
    "delta_mass_study",
    "euler_poisson_model",
    "fit_decay_rate",
    "flux",
    "generalized_model",
    "inf_B",
    "kinetic_bohm_integral",
    "make_delta_family",
    "make_solution",
    "mass",
    "moments",
    "poisson_residual",
    "reconstruct_f",
    "rho_i",
    "rho_i_minus",
    "rho_i_plus",
    "solve_euler_poisson",
    "solve_generalized",
    "solve_phi",
    "sup_B",
]
