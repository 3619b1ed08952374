"""Numerical laboratory for quantitative stability of multi-soliton sums."""

from .groundstate import (
    GroundState,
    ProblemParams,
    cached_ground_state,
    closed_form_Q_1d,
    eval_Q,
    eval_logQ,
    solve_ground_state,
)
from .special_functions import F, StabilityModulus, phi, psi, select_branch
from .fields import (
    SolitonConfig,
    TorusField,
    TorusGrid,
    gamma_residual,
    helmholtz_inverse,
    inner_h1,
    interaction_term_f,
    norm,
    residual_h,
    sample_soliton,
    sample_soliton_sum,
)
from .decomposition import (
    ModulationBasis,
    build_basis,
    complex_phase_restriction_check,
    fit_modulation,
    project_F,
)
from .construction import build_sharp_example, positivize, solve_linearized
from .geometry import project_points
from .spectral import coercivity_check, sector_spectrum, spectral_gap

__all__ = [
    "GroundState",
    "ProblemParams",
    "cached_ground_state",
    "closed_form_Q_1d",
    "eval_Q",
    "eval_logQ",
    "solve_ground_state",
    "F",
    "StabilityModulus",
    "phi",
    "psi",
    "select_branch",
    "SolitonConfig",
    "TorusField",
    "TorusGrid",
    "gamma_residual",
    "helmholtz_inverse",
    "inner_h1",
    "interaction_term_f",
    "norm",
    "residual_h",
    "sample_soliton",
    "sample_soliton_sum",
    "ModulationBasis",
    "build_basis",
    "complex_phase_restriction_check",
    "fit_modulation",
    "project_F",
    "build_sharp_example",
    "positivize",
    "solve_linearized",
    "project_points",
    "coercivity_check",
    "sector_spectrum",
    "spectral_gap",
]

__version__ = "0.1.0"
