"""Sampling scores per scheme, multinomial draws and the rescaled sampling matrix."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidInput
from .leverage import ScoreVector, _values
from .linalg import ThinSvd

SCHEMES = ("uniform", "leverage", "sqrt_leverage", "mixed")


def scores_for_scheme(s_star, scheme: str, alpha: float | None = None) -> ScoreVector:
    """Sampling scores with the same mass as ``s_star``.

    ``mixed`` is the convex combination alpha * s* + (1 - alpha) * uniform.
    """
    v = _values(s_star)
    k = v.sum()
    if not k > 0:
        raise InvalidInput("leverage scores are all zero")
    n = len(v)
    if scheme == "uniform":
        out = np.full(n, k / n)
    elif scheme == "leverage":
        out = v.copy()
    elif scheme == "sqrt_leverage":
        root = np.sqrt(v)
        out = k * root / root.sum()
    elif scheme == "mixed":
        if alpha is None or not 0 <= alpha <= 1:
            raise InvalidInput(f"mixed scheme needs alpha in [0, 1], got {alpha}")
        out = alpha * v + (1 - alpha) * (k / n)
    else:
        raise InvalidInput(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return ScoreVector.normalized(out, k)


def draw_indices(s, ell: int, seed) -> np.ndarray:
    """``ell`` i.i.d. indices with P(i) = s_i / sum(s), via inverse CDF.

    ``seed`` is an int or a ``numpy.random.Generator``. Zero-score entries
    occupy an empty CDF interval and are never returned.
    """
    if ell < 1:
        raise InvalidInput(f"ell={ell} must be positive")
    v = _values(s)
    cdf = np.cumsum(v)
    if not cdf[-1] > 0:
        raise InvalidInput("scores have zero total mass")
    rng = np.random.default_rng(seed)
    u = rng.random(ell) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(v) - 1)


@dataclass(frozen=True, eq=False)
class SampleDraw:
    """Sampled indices i_1..i_ell and the scores they were drawn with.

    ``omega`` is the n x ell matrix S D with D_jj = 1 / sqrt(s_{i_j}); it is
    built lazily since most callers only need ``weights``.
    """

    indices: np.ndarray
    scores_used: ScoreVector

    @property
    def ell(self) -> int:
        return len(self.indices)

    @cached_property
    def weights(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.scores_used.values[self.indices])

    @cached_property
    def omega(self) -> np.ndarray:
        om = np.zeros((len(self.scores_used), self.ell))
        om[self.indices, np.arange(self.ell)] = self.weights
        return om

    def project(self, V: np.ndarray) -> np.ndarray:
        """V.T @ omega without forming omega."""
        return V[self.indices].T * self.weights

    def split(self, svd: ThinSvd, k: int):
        """(Omega1, Omega2) = (V1.T Omega, V2.T Omega)."""
        V1, V2, _ = svd.split(k)
        return self.project(V1), self.project(V2)


def build_omega(indices, s) -> SampleDraw:
    scores = s if isinstance(s, ScoreVector) else ScoreVector(_values(s), _values(s).sum())
    idx = np.asarray(indices, dtype=np.intp)
    if idx.ndim != 1 or idx.size == 0:
        raise InvalidInput("need at least one sampled index")
    if np.any(idx < 0) or np.any(idx >= len(scores)):
        raise InvalidInput("sampled index out of range")
    if np.any(scores.values[idx] <= 0):
        raise InvalidInput("sampled an index with zero score")
    idx.setflags(write=False)
    return SampleDraw(idx, scores)


def sample(s, ell: int, seed) -> SampleDraw:
    return build_omega(draw_indices(s, ell, seed), s)


def select_columns(A, indices) -> np.ndarray:
    """C = A S: the sampled columns in draw order, duplicates kept."""
    A = np.asarray(A, dtype=float)
    idx = np.asarray(indices, dtype=np.intp)
    if np.any(idx < 0) or np.any(idx >= A.shape[1]):
        raise InvalidInput("column index out of range")
    return A[:, idx]
