"""Dense linear algebra used throughout: thin SVD, norms, bases, matrix I/O."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInput, NumericalFailure

DEFAULT_RANK_TOL = 1e-12


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise InvalidInput(f"expected a 2-D matrix, got shape {A.shape}")
    if A.size == 0:
        raise InvalidInput("matrix is empty")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    return A


@dataclass(frozen=True)
class ThinSvd:
    """Thin SVD truncated to numerical rank: A ~= U @ diag(s) @ V.T."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.singular_values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.U.shape[0], self.V.shape[0]

    def sigma(self, i: int) -> float:
        """The i-th singular value (1-based); zero beyond the numerical rank."""
        if i < 1:
            raise InvalidInput("singular values are indexed from 1")
        return float(self.singular_values[i - 1]) if i <= self.rank else 0.0

    def split(self, k: int):
        """Return (V1, V2, Sigma2): top-k right vectors, the rest, and the tail spectrum."""
        _check_k(k, self.rank)
        return self.V[:, :k], self.V[:, k:], self.singular_values[k:]


def _check_k(k, rho):
    if not 1 <= k <= rho:
        raise InvalidInput(f"k={k} must lie in [1, rank={rho}]")


def thin_svd(A, rank_tol: float = DEFAULT_RANK_TOL) -> ThinSvd:
    """Thin SVD of ``A`` keeping singular values above ``rank_tol * sigma_1``."""
    A = as_matrix(A)
    if rank_tol < 0:
        raise InvalidInput("rank_tol must be non-negative")
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    rho = int(np.sum(s > rank_tol * s[0])) if s[0] > 0 else 0
    return ThinSvd(U[:, :rho], s[:rho], Vt[:rho].T)


def best_rank_k(svd: ThinSvd, k: int) -> np.ndarray:
    _check_k(k, svd.rank)
    return (svd.U[:, :k] * svd.singular_values[:k]) @ svd.V[:, :k].T


def spectral_norm(A) -> float:
    """Largest singular value; 0 for a zero matrix."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    try:
        return float(np.linalg.svd(A, compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A, dtype=float)))


def orthonormal_basis(C, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis of range(C).

    SVD-based so that exactly repeated columns (common with sampling with
    replacement) collapse cleanly. An all-zero ``C`` yields an m x 0 basis.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] == 0:
        raise InvalidInput(f"cannot orthonormalize matrix of shape {C.shape}")
    if C.shape[1] == 0:
        return np.zeros((C.shape[0], 0))
    try:
        U, s, _ = np.linalg.svd(C, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    if s[0] == 0:
        return np.zeros((C.shape[0], 0))
    return U[:, s > rank_tol * s[0]]


def write_matrix(A, path) -> None:
    """Write the "rows cols" header then one whitespace-separated row per line."""
    Path(path).write_text(format_matrix(A))


def format_matrix(A) -> str:
    A = np.asarray(A, dtype=float)
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    lines.extend(" ".join(format(float(x), ".17g") for x in row) for row in A)
    return "\n".join(lines) + "\n"


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text(), source=str(path))


def parse_matrix(text: str, source: str = "<string>") -> np.ndarray:
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines:
        raise InvalidInput(f"{source}: empty matrix file")
    lineno, header = lines[0]
    try:
        rows, cols = (int(tok) for tok in header.split())
    except ValueError:
        raise InvalidInput(f"{source}:{lineno}: header must be 'rows cols'") from None
    if rows < 1 or cols < 1:
        raise InvalidInput(f"{source}:{lineno}: dimensions must be positive")
    values = []
    for lineno, ln in lines[1:]:
        try:
            values.extend(float(tok) for tok in ln.split())
        except ValueError:
            raise InvalidInput(f"{source}:{lineno}: non-numeric entry") from None
    if len(values) != rows * cols:
        raise InvalidInput(
            f"{source}: expected {rows * cols} entries, found {len(values)}"
        )
    A = np.array(values).reshape(rows, cols)
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{source}: matrix has non-finite entries")
    return A
