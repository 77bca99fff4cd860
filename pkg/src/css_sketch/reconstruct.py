"""Projection reconstruction, rank-k post-processing and empirical checks of
the structural and concentration inequalities behind the error bound."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .leverage import column_leverage_scores, quantity_c, quantity_q
from .linalg import (
    ThinSvd,
    frobenius_norm,
    orthonormal_basis,
    spectral_norm,
    thin_svd,
)
from .sampling import SampleDraw

FULL_ROW_RANK_TOL = 1e-10


def project_onto_columns(A, C) -> np.ndarray:
    """P_C A, computed as Q (Q.T A) with Q an orthonormal basis of range(C)."""
    A = np.asarray(A, dtype=float)
    Q = orthonormal_basis(C)
    return Q @ (Q.T @ A)


@dataclass(frozen=True)
class ReconstructionReport:
    spectral_error: float
    frobenius_error: float
    relative_spectral: float | None = None
    certified: bool | None = None


def _report(residual, sigma_next, certified_error):
    err = spectral_norm(residual)
    rel = None
    if sigma_next is not None:
        rel = err / sigma_next if sigma_next > 0 else math.inf
    certified = None if certified_error is None else bool(err <= certified_error)
    return ReconstructionReport(err, frobenius_norm(residual), rel, certified)


def spectral_error(A, C, k=None, svd: ThinSvd | None = None, certified_error=None):
    """Spectral and Frobenius error of A - P_C A.

    With ``k`` the spectral error is also reported relative to sigma_{k+1}(A);
    with ``certified_error`` the report says whether the bound held.
    """
    A = np.asarray(A, dtype=float)
    sigma_next = None
    if k is not None:
        sigma_next = (svd or thin_svd(A)).sigma(k + 1)
    return _report(A - project_onto_columns(A, C), sigma_next, certified_error)


def rank_k_approx(A, C, k: int) -> np.ndarray:
    """Q (Q.T A)_k: the best rank-k approximation of A inside range(C), up to sqrt(2)."""
    A = np.asarray(A, dtype=float)
    Q = orthonormal_basis(C)
    if not 1 <= k <= Q.shape[1]:
        raise InvalidInput(f"k={k} exceeds the rank {Q.shape[1]} of C")
    U, s, Vt = np.linalg.svd(Q.T @ A, full_matrices=False)
    return (Q @ (U[:, :k] * s[:k])) @ Vt[:k]


def rank_k_error(A, C, k: int, svd: ThinSvd | None = None, certified_error=None):
    A = np.asarray(A, dtype=float)
    sigma_next = (svd or thin_svd(A)).sigma(k + 1)
    return _report(A - rank_k_approx(A, C, k), sigma_next, certified_error)


def cross_term_bounds(c, q, k, ell, rho, delta) -> tuple[float, float]:
    """Upper bounds on ||Omega2 Omega1^T||_2 with log(rho/k) and with log(rho/delta).

    The first is the displayed form of the cross-term inequality; the second
    is the form consistent with the overall error bound. Both are reported so
    that the two can be compared empirically.
    """
    if math.isinf(c) or math.isinf(q):
        return math.inf, math.inf

    def bound(log_term):
        return (
            math.sqrt(2.0 * c * (rho + 1 - k) * ell * log_term / k)
            + 2.0 * q * log_term / 3.0
        )

    return bound(math.log(rho / k)), bound(math.log(rho / delta))


def _omega_spectra(om1, om2):
    lam_min = float(np.linalg.eigvalsh(om1 @ om1.T)[0])
    return lam_min, spectral_norm(om2 @ om1.T)


def omega_spectra(draw: SampleDraw, svd: ThinSvd, k: int) -> tuple[float, float]:
    """(lambda_min(Omega1 Omega1^T), ||Omega2 Omega1^T||_2) for one draw."""
    return _omega_spectra(*draw.split(svd, k))


@dataclass(frozen=True)
class ConcentrationDiagnostics:
    lambda_min_omega1: float
    cross_term_norm: float
    omega1_full_row_rank: bool
    structural_lhs: float
    structural_rhs: float | None
    cross_bound_printed: float | None = None
    cross_bound_delta: float | None = None

    @property
    def structural_holds(self) -> bool | None:
        if self.structural_rhs is None:
            return None
        return self.structural_lhs <= self.structural_rhs * (1 + 1e-9) + 1e-9


def concentration_diagnostics(
    A, draw: SampleDraw, k: int, svd: ThinSvd | None = None, delta=None
) -> ConcentrationDiagnostics:
    """Quantities entering the deterministic structural inequality

        ||A - P_Y A||^2 <= ||Sigma2||^2 + ||Sigma2 Omega2 Omega1^+||^2,  Y = A Omega,

    plus lambda_min(Omega1 Omega1^T) and ||Omega2 Omega1^T||. The right-hand
    side is None when Omega1 lacks full row rank.
    """
    A = np.asarray(A, dtype=float)
    svd = svd or thin_svd(A)
    if not 1 <= k < svd.rank:
        raise InvalidInput(f"need 1 <= k < rank={svd.rank}, got k={k}")
    om1, om2 = draw.split(svd, k)
    sigma2 = svd.singular_values[k:]
    lam_min, cross = _omega_spectra(om1, om2)
    sv1 = np.linalg.svd(om1, compute_uv=False)
    full_rank = bool(sv1[-1] > FULL_ROW_RANK_TOL * sv1[0]) if sv1[0] > 0 else False

    Y = A[:, draw.indices] * draw.weights
    lhs = spectral_norm(A - project_onto_columns(A, Y)) ** 2
    rhs = None
    if full_rank:
        tail = sigma2[:, None] * (om2 @ np.linalg.pinv(om1))
        rhs = float(sigma2[0] ** 2 + spectral_norm(tail) ** 2)

    printed = with_delta = None
    if delta is not None:
        s_star = column_leverage_scores(svd, k)
        c = quantity_c(draw.scores_used, s_star)
        q = quantity_q(draw.scores_used, s_star)
        printed, with_delta = cross_term_bounds(c, q, k, draw.ell, svd.rank, delta)
    return ConcentrationDiagnostics(
        lam_min, cross, full_rank, float(lhs), rhs, printed, with_delta
    )
