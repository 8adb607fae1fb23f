"""Separability and Wigner-function positivity of two-qubit states."""

__version__ = "0.1.0"

from .config import TOL, Tolerances, tolerance_scope
from .ensemble import (
    Classification,
    ClassifyConfig,
    EnsembleReport,
    RadiusEstimate,
    classify,
    estimate_ball_radius,
    estimate_fractions,
    figure_grids,
    sample_hs_state,
    sample_x_state,
)
from .hermitian import ValidationError, eigh, eigvalsh, partial_trace, partial_transpose, validate_density
from .kernel import ModuliError, PairModuli, QuatritModuli, SWKernel, build_kernel, validate_kernel
from .orbit import OrbitMinimum, min_over_orbit
from .separability import absolutely_separable, ppt_separable, x_separable_inequalities
from .wigner import PhasePointFull, PhasePointLU, polytope_contains, polytope_vertices, wf_bounds, wigner_value
from .xstate import XParams, XState, x_from_params, x_to_params
