"""Leverage scores, the sampling-quality quantities c(s) and q(s), and the
sampling-dependent spectral error bound.

Score vectors are not normalised to probabilities: they sum to the target
rank k (or to the column rank for row scores). Zero conventions used by
both quantities: a term with s*_i = 0 contributes nothing, and a term with
s_i = 0 but s*_i > 0 is infinite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .linalg import ThinSvd, _check_k

INF = math.inf
SCHEMES = ("sqL", "L", "U")


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Non-negative scores with a prescribed total mass."""

    values: np.ndarray
    mass: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise InvalidInput("scores must be a non-empty 1-D vector")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidInput("scores must be finite and non-negative")
        if self.mass <= 0:
            raise InvalidInput("score mass must be positive")
        if abs(v.sum() - self.mass) > 1e-9 * self.mass:
            raise InvalidInput(f"scores sum to {v.sum()!r}, expected {self.mass!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mass", float(self.mass))

    @classmethod
    def normalized(cls, values, mass) -> "ScoreVector":
        v = np.asarray(values, dtype=float)
        total = v.sum()
        if not total > 0:
            raise InvalidInput("scores have zero total mass")
        return cls(v * (mass / total), mass)

    def __len__(self):
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def probabilities(self) -> np.ndarray:
        return self.values / self.values.sum()


def _values(s):
    return np.asarray(s.values if isinstance(s, ScoreVector) else s, dtype=float)


def column_leverage_scores(svd: ThinSvd, k: int) -> ScoreVector:
    """Squared row norms of the top-k right singular vectors; they sum to k."""
    _check_k(k, svd.rank)
    V1 = svd.V[:, :k]
    return ScoreVector.normalized(np.einsum("ij,ij->i", V1, V1), k)


def row_leverage_scores(svd: ThinSvd) -> ScoreVector:
    """Squared row norms of the left singular vectors (hat-matrix diagonal)."""
    U = svd.U
    return ScoreVector.normalized(np.einsum("ij,ij->i", U, U), svd.rank)


def _ratio_max(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    if num.shape != den.shape:
        raise InvalidInput(f"length mismatch: {num.shape} vs {den.shape}")
    live = num > 0
    if not np.any(live):
        return 0.0
    if np.any(den[live] <= 0):
        return INF
    return float(np.max(num[live] / den[live]))


def quantity_c(s, s_star) -> float:
    """max_i s*_i / s_i."""
    return _ratio_max(_values(s_star), _values(s))


def quantity_q(s, s_star) -> float:
    """max_i sqrt(s*_i) / s_i."""
    return _ratio_max(np.sqrt(_values(s_star)), _values(s))


@dataclass(frozen=True)
class BoundReport:
    c: float
    q: float
    epsilon: float
    success_probability: float
    certified_error: float | None = None

    def to_dict(self) -> dict:
        def enc(x):
            return "inf" if x is not None and math.isinf(x) else x

        return {
            "c": enc(self.c),
            "q": enc(self.q),
            "epsilon": enc(self.epsilon),
            "success_probability": self.success_probability,
            "certified_error": enc(self.certified_error),
        }


def epsilon_from_quantities(c, q, k, ell, rho, delta) -> float:
    """3 [ sqrt(c k (rho+1-k) log(rho/delta) / ell) + q k log(rho/delta) / ell ]."""
    if math.isinf(c) or math.isinf(q):
        return INF
    log_term = math.log(rho / delta)
    return 3.0 * (
        math.sqrt(c * k * (rho + 1 - k) * log_term / ell) + q * k * log_term / ell
    )


def success_probability(c, k, ell, delta) -> float:
    """1 - delta - 2k exp(-ell / (8 k c)); may be negative (vacuous)."""
    tail = 1.0 if math.isinf(c) else math.exp(-ell / (8.0 * k * c))
    return 1.0 - delta - 2.0 * k * tail


def epsilon_bound(s, s_star, k, ell, rho, delta, sigma_next=None) -> BoundReport:
    """Evaluate the spectral error bound for sampling scores ``s``.

    ``sigma_next`` is sigma_{k+1}(A); when given, ``certified_error`` is
    sigma_{k+1} (1 + epsilon).
    """
    if not 0 < delta < 1:
        raise InvalidInput(f"delta={delta} must lie in (0, 1)")
    if not 1 <= k < rho:
        raise InvalidInput(f"need 1 <= k < rho, got k={k}, rho={rho}")
    if ell <= k:
        raise InvalidInput(f"need ell > k, got ell={ell}, k={k}")
    c = quantity_c(s, s_star)
    q = quantity_q(s, s_star)
    eps = epsilon_from_quantities(c, q, k, ell, rho, delta)
    certified = None
    if sigma_next is not None:
        certified = INF if math.isinf(eps) else sigma_next * (1.0 + eps)
    return BoundReport(c, q, eps, success_probability(c, k, ell, delta), certified)


def closed_form_quantities(s_star, scheme: str) -> tuple[float, float]:
    """(c, q) for the sqL, L and U schemes straight from the leverage scores."""
    v = _values(s_star)
    n, k = len(v), v.sum()
    pos = v[v > 0]
    root = np.sqrt(pos)
    if scheme == "sqL":
        q = root.sum() / k
        return q * root.max(), q
    if scheme == "L":
        q = INF if np.any(v <= 0) else float(np.max(1.0 / np.sqrt(v)))
        return 1.0, q
    if scheme == "U":
        return float(n * v.max() / k), float(n * np.sqrt(v.max()) / k)
    raise InvalidInput(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


@dataclass(frozen=True)
class PowerLawCheck:
    lhs: float
    rhs: float
    holds: bool
    precondition_ok: bool


def power_law_sum_bound(s_star, a: float, p: float, k: float) -> PowerLawCheck:
    """Check (1/k) sum sqrt(s*_i) <= (a/k)(1 + 2/(p-2)) for power-law scores.

    Valid when the sorted scores satisfy s*_[i] <= a^2 i^-p; if they do not,
    ``precondition_ok`` is False and ``holds`` is reported False.
    """
    if p <= 2:
        raise InvalidInput(f"power index p={p} must exceed 2")
    v = np.sort(_values(s_star))[::-1]
    ranks = np.arange(1, len(v) + 1, dtype=float)
    envelope = a * a * ranks ** (-p)
    precondition_ok = bool(np.all(v <= envelope * (1 + 1e-12)))
    lhs = float(np.sqrt(v).sum() / k)
    rhs = a / k * (1.0 + 2.0 / (p - 2.0))
    return PowerLawCheck(lhs, rhs, precondition_ok and lhs <= rhs, precondition_ok)


def format_scores(s: ScoreVector) -> str:
    lines = [f"{len(s)} {format(s.mass, '.17g')}"]
    lines.extend(format(float(x), ".17g") for x in s.values)
    return "\n".join(lines) + "\n"


def write_scores(s: ScoreVector, path) -> None:
    Path(path).write_text(format_scores(s))


def parse_scores(text: str, source: str = "<string>") -> ScoreVector:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines:
        raise InvalidInput(f"{source}: empty score file")
    lineno, header = lines[0]
    try:
        n_tok, k_tok = header.split()
        n, k = int(n_tok), float(k_tok)
    except ValueError:
        raise InvalidInput(f"{source}:{lineno}: header must be 'n k'") from None
    values = []
    for lineno, ln in lines[1:]:
        try:
            values.append(float(ln))
        except ValueError:
            raise InvalidInput(f"{source}:{lineno}: expected one number per line") from None
    if len(values) != n:
        raise InvalidInput(f"{source}: header says {n} scores, found {len(values)}")
    try:
        return ScoreVector(np.array(values), k)
    except InvalidInput as exc:
        raise InvalidInput(f"{source}: {exc}") from None


def read_scores(path) -> ScoreVector:
    return parse_scores(Path(path).read_text(), source=str(path))
