"""Over-constrained least squares and its row-sampled approximation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDraw, InvalidInput
from .linalg import as_matrix
from .sampling import SampleDraw

RANK_TOL = 1e-10


def _full_column_rank(X, tol=RANK_TOL) -> bool:
    s = np.linalg.svd(X, compute_uv=False)
    return s.size == X.shape[1] and s[0] > 0 and s[-1] > tol * s[0]


@dataclass(frozen=True, eq=False)
class LsqInstance:
    design: np.ndarray
    response: np.ndarray
    true_coefficients: np.ndarray | None = None

    def __post_init__(self):
        X = as_matrix(self.design)
        y = np.asarray(self.response, dtype=float)
        if y.shape != (X.shape[0],):
            raise InvalidInput(f"response has shape {y.shape}, expected ({X.shape[0]},)")
        if not _full_column_rank(X):
            raise InvalidInput("design matrix is not of full column rank")
        object.__setattr__(self, "design", X)
        object.__setattr__(self, "response", y)
        if self.true_coefficients is not None:
            object.__setattr__(
                self, "true_coefficients", np.asarray(self.true_coefficients, dtype=float)
            )

    @property
    def shape(self):
        return self.design.shape


def solve_exact(inst: LsqInstance) -> np.ndarray:
    """argmin_x ||X x - y||_2 via an SVD-based solver."""
    return np.linalg.lstsq(inst.design, inst.response, rcond=None)[0]


def solve_sampled(inst: LsqInstance, draw: SampleDraw) -> np.ndarray:
    """Solve the reduced problem min ||Omega X x - Omega y|| over sampled rows.

    Row j of the reduced system is row i_j of (X, y) scaled by 1/sqrt(s_{i_j}).
    """
    if len(draw.scores_used) != inst.shape[0]:
        raise InvalidInput("draw was made over a different number of rows")
    w = draw.weights
    Xs = inst.design[draw.indices] * w[:, None]
    if not _full_column_rank(Xs):
        raise DegenerateDraw(
            f"{draw.ell} sampled rows do not span all {inst.shape[1]} coefficients"
        )
    return np.linalg.lstsq(Xs, inst.response[draw.indices] * w, rcond=None)[0]


@dataclass(frozen=True, eq=False)
class EstimatorStats:
    mean_estimate: np.ndarray
    variance: np.ndarray
    squared_bias: np.ndarray
    trials: int

    @property
    def total_variance(self) -> float:
        return float(self.variance.sum())

    @property
    def total_squared_bias(self) -> float:
        return float(self.squared_bias.sum())


def estimator_stats(estimates, reference) -> EstimatorStats:
    """Per-coordinate mean, unbiased variance and squared bias against ``reference``."""
    E = np.asarray(estimates, dtype=float)
    if E.ndim == 1:
        E = E[:, None]
    if E.shape[0] < 2:
        raise InvalidInput("need at least two estimates")
    mean = E.mean(axis=0)
    ref = np.asarray(reference, dtype=float).reshape(mean.shape)
    return EstimatorStats(mean, E.var(axis=0, ddof=1), (mean - ref) ** 2, E.shape[0])
