"""Seeded synthetic data: Gaussian and multivariate-t matrices with a
Toeplitz covariance 2 * 0.5^|i-j|, the least-squares instance, and
power-law leverage profiles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .errors import InvalidInput
from .leverage import ScoreVector
from .lsq import LsqInstance

FAMILIES = {"GA": None, "T3": 3, "T1": 1}
LSQ_BETA = np.concatenate([np.ones(10), np.full(30, 0.1), np.ones(10)])


@dataclass(frozen=True)
class SyntheticSpec:
    family: str
    m: int
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInput(f"family must be one of {sorted(FAMILIES)}, got {self.family!r}")
        if self.m < 1 or self.n < 1:
            raise InvalidInput("m and n must be positive")

    @property
    def dof(self) -> int | None:
        return FAMILIES[self.family]


def covariance(m: int) -> np.ndarray:
    return toeplitz(2.0 * 0.5 ** np.arange(m))


def covariance_factor(m: int) -> np.ndarray:
    """Lower Cholesky factor L with L L^T = covariance(m)."""
    if m < 1:
        raise InvalidInput("m must be positive")
    return np.linalg.cholesky(covariance(m))


def _columns(family, m, n, rng):
    L = covariance_factor(m)
    X = L @ rng.standard_normal((m, n))
    dof = FAMILIES[family]
    if dof is None:
        return X + 1.0
    # chi-square with dof degrees of freedom as a sum of squared normals
    chi2 = np.sum(rng.standard_normal((dof, n)) ** 2, axis=0)
    return X / np.sqrt(chi2 / dof)


def generate_matrix(spec: SyntheticSpec) -> np.ndarray:
    """m x n matrix whose columns are i.i.d. draws from the chosen family.

    GA columns are N(1_m, Sigma); T3/T1 columns are zero-mean multivariate t
    with scale matrix Sigma.
    """
    return _columns(spec.family, spec.m, spec.n, np.random.default_rng(spec.seed))


def generate_lsq(
    seed: int = 0,
    family: str = "T1",
    n_rows: int = 1000,
    noise_sd: float = 3.0,
) -> LsqInstance:
    """Design (n_rows x 50) with t/Gaussian rows and y = X beta + N(0, noise_sd^2)."""
    if family not in FAMILIES:
        raise InvalidInput(f"family must be one of {sorted(FAMILIES)}, got {family!r}")
    rng = np.random.default_rng(seed)
    d = len(LSQ_BETA)
    X = _columns(family, d, n_rows, rng).T
    y = X @ LSQ_BETA + noise_sd * rng.standard_normal(n_rows)
    return LsqInstance(X, y, LSQ_BETA.copy())


def generate_power_law_scores(n: int, k: float, p: float) -> tuple[ScoreVector, float]:
    """Scores proportional to i^-p summing to k, and the envelope constant a
    with s_[i] = a^2 i^-p."""
    if p <= 2:
        raise InvalidInput(f"power index p={p} must exceed 2")
    if n < 1 or k <= 0:
        raise InvalidInput("need n >= 1 and k > 0")
    raw = np.arange(1, n + 1, dtype=float) ** (-p)
    scale = k / raw.sum()
    return ScoreVector(raw * scale, k), float(np.sqrt(scale))
