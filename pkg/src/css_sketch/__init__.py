"""Randomized column subset selection with sampling-dependent spectral error bounds."""
from .errors import (
    DegenerateDraw,
    InfeasibleGamma,
    InvalidConfig,
    InvalidInput,
    NumericalFailure,
)
from .leverage import (
    BoundReport,
    ScoreVector,
    closed_form_quantities,
    column_leverage_scores,
    epsilon_bound,
    power_law_sum_bound,
    quantity_c,
    quantity_q,
    row_leverage_scores,
)
from .linalg import (
    ThinSvd,
    best_rank_k,
    frobenius_norm,
    orthonormal_basis,
    spectral_norm,
    thin_svd,
)
from .optimizer import OptimizerResult, feasibility, gamma_of, initial_t_max, optimize_scores
from .reconstruct import (
    concentration_diagnostics,
    project_onto_columns,
    rank_k_approx,
    spectral_error,
)
from .sampling import SampleDraw, build_omega, draw_indices, sample, scores_for_scheme, select_columns

__version__ = "0.1.0"
