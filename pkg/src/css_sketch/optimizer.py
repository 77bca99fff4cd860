"""Bisection search for the sampling scores that minimise q(s) subject to
sum(s) = k and s*_i <= gamma * s_i.

With a slack variable t the constraints read s_i >= s*_i / min(gamma, t sqrt(s*_i)),
so t is feasible exactly when f(t) = sum_i s*_i / min(gamma, t sqrt(s*_i)) <= k.
f is non-increasing in t, which makes bisection on t exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleGamma, InvalidInput, NumericalFailure
from .leverage import ScoreVector, _values

MAX_ITER = 200


@dataclass(frozen=True)
class OptimizerResult:
    t_star: float
    scores: ScoreVector
    gamma: float
    iterations: int
    residual: float

    def metadata(self) -> dict:
        return {
            "t_star": self.t_star,
            "gamma": self.gamma,
            "iterations": self.iterations,
            "residual": self.residual,
        }


def gamma_of(k: int, ell: int, delta: float) -> float:
    """ell / (8 k log(k / delta)), the largest c(s) keeping failure below 3 delta."""
    if k < 1 or ell <= k:
        raise InvalidInput(f"need k >= 1 and ell > k, got k={k}, ell={ell}")
    if not 0 < delta < 1:
        raise InvalidInput(f"delta={delta} must lie in (0, 1)")
    gamma = ell / (8.0 * k * math.log(k / delta))
    if gamma < 1:
        raise InfeasibleGamma(
            f"gamma={gamma:.4g} < 1: ell={ell} is too small for k={k}, delta={delta}"
        )
    return gamma


def feasibility(t: float, s_star, gamma: float) -> float:
    v = _values(s_star)
    v = v[v > 0]
    if t <= 0:
        return math.inf if v.size else 0.0
    return float(np.sum(v / np.minimum(gamma, t * np.sqrt(v))))


def initial_t_max(s_star, gamma: float) -> float:
    """Upper bracket from an explicit feasible point.

    Move the (1 - 1/gamma) share of the largest score evenly onto the others;
    the q of that point bounds the optimum.
    """
    if gamma <= 1:
        raise InvalidInput("initial_t_max needs gamma > 1")
    v = _values(s_star)
    top = math.sqrt(v.max())
    return max(gamma / top, (len(v) - 1) / (top * (1.0 - 1.0 / gamma)))


def recover_scores(t: float, s_star, gamma: float) -> np.ndarray:
    v = _values(s_star)
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = v[pos] / np.minimum(gamma, t * np.sqrt(v[pos]))
    return out


def optimize_scores(s_star, gamma: float, tol: float = 1e-10) -> OptimizerResult:
    v = _values(s_star)
    k = v.sum()
    if gamma < 1:
        raise InfeasibleGamma(f"gamma={gamma} < 1 admits no feasible scores")
    if not k > 0:
        raise InvalidInput("leverage scores are all zero")
    pos = v[v > 0]

    if gamma == 1:
        # s = s* is the only point with max s*_i/s_i <= 1 and sum k
        return OptimizerResult(
            float(np.max(1.0 / np.sqrt(pos))), ScoreVector(v.copy(), k), 1.0, 0, 0.0
        )

    lo, hi = 0.0, initial_t_max(v, gamma)
    while feasibility(hi, v, gamma) > k:  # guards round-off in the bracket
        hi *= 2.0
    f_hi = feasibility(hi, v, gamma)
    iterations = 0
    while hi - lo > tol * hi and abs(f_hi - k) > tol * k:
        if iterations == MAX_ITER:
            raise NumericalFailure(f"bisection did not converge in {MAX_ITER} steps")
        iterations += 1
        mid = 0.5 * (lo + hi)
        f_mid = feasibility(mid, v, gamma)
        if f_mid <= k:
            hi, f_hi = mid, f_mid
        else:
            lo = mid

    s = recover_scores(hi, v, gamma) * (k / f_hi)
    return OptimizerResult(hi, ScoreVector(s, k), float(gamma), iterations, abs(f_hi - k))
