"""Experiment harness: repeated column sampling on synthetic or file data,
gamma sweeps of the optimised scores, and sampled least-squares trials.

Every trial seed is ``base_seed + crc32("<ell>:<trial>")``. The seed does not
depend on the scheme, so all schemes in a cell share their uniform draws.
"""
from __future__ import annotations

import csv
import io
import math
import time
import zlib
from dataclasses import dataclass, field, fields

import numpy as np

from .datagen import SyntheticSpec, generate_lsq, generate_matrix
from .errors import DegenerateDraw, InvalidConfig, InvalidInput
from .leverage import (
    ScoreVector,
    column_leverage_scores,
    epsilon_bound,
    row_leverage_scores,
)
from .linalg import read_matrix, spectral_norm, frobenius_norm, thin_svd
from .lsq import EstimatorStats, estimator_stats, solve_exact, solve_sampled
from .optimizer import optimize_scores
from .reconstruct import omega_spectra, project_onto_columns
from .sampling import build_omega, sample, scores_for_scheme

CSV_VERSION = "# css-sketch v1"
RESERVED_SCHEMES = {"dual_set"}
DEGENERATE_RETRIES = 10


# -- schemes ---------------------------------------------------------------

@dataclass(frozen=True)
class Scheme:
    name: str
    param: float | None = None

    @property
    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}:{self.param:g}"

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        name, _, arg = str(text).partition(":")
        if name in RESERVED_SCHEMES:
            raise InvalidConfig("schemes", f"{name!r} is reserved and not implemented")
        if name in ("uniform", "leverage", "sqrt_leverage"):
            if arg:
                raise InvalidConfig("schemes", f"{name!r} takes no parameter")
            return cls(name)
        if name in ("mixed", "optimized"):
            try:
                value = float(arg)
            except ValueError:
                raise InvalidConfig("schemes", f"{name!r} needs a numeric parameter, e.g. {name}:0.5") from None
            if name == "mixed" and not 0 <= value <= 1:
                raise InvalidConfig("schemes", f"mixed alpha {value} not in [0, 1]")
            if name == "optimized" and not value >= 1:
                raise InvalidConfig("schemes", f"optimized gamma {value} < 1")
            return cls(name, value)
        raise InvalidConfig("schemes", f"unknown scheme {text!r}")

    def scores(self, s_star) -> ScoreVector:
        if self.name == "optimized":
            return optimize_scores(s_star, self.param).scores
        return scores_for_scheme(s_star, self.name, self.param)


def cell_seed(base_seed: int, ell: int, trial: int) -> int:
    return int(base_seed) + zlib.crc32(f"{ell}:{trial}".encode())


# -- configuration ---------------------------------------------------------

def _require(cond, field_name, message):
    if not cond:
        raise InvalidConfig(field_name, message)


@dataclass
class ExperimentConfig:
    data: dict
    output_path: str
    k: int = 10
    ell_grid: list = field(default_factory=lambda: [30, 60, 120])
    schemes: list = field(default_factory=lambda: ["uniform", "leverage", "sqrt_leverage"])
    trials: int = 100
    delta: float = 0.1
    base_seed: int = 0
    gamma_grid: list = field(default_factory=lambda: [1.0, 1.05, 1.1, 1.2, 1.5, 2.0, 5.0, 1e12])
    record_timing: bool = False

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        _require(not unknown, sorted(unknown)[0] if unknown else "", "unknown config field")
        for name in ("data", "output_path"):
            _require(name in raw, name, "required field missing")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        _require(isinstance(self.data, dict), "data", "must be an object")
        if "path" in self.data:
            _require(set(self.data) == {"path"}, "data", "a matrix path excludes other keys")
        else:
            try:
                self.synthetic_spec()
            except (InvalidInput, TypeError) as exc:
                raise InvalidConfig("data", str(exc)) from None
        _require(isinstance(self.k, int) and self.k >= 1, "k", "must be a positive integer")
        _require(len(self.ell_grid) > 0, "ell_grid", "must not be empty")
        for ell in self.ell_grid:
            _require(isinstance(ell, int) and ell > self.k, "ell_grid", f"entry {ell!r} must be an integer > k={self.k}")
        _require(isinstance(self.trials, int) and self.trials >= 1, "trials", "must be >= 1")
        _require(0 < self.delta < 1, "delta", "must lie in (0, 1)")
        _require(isinstance(self.base_seed, int), "base_seed", "must be an integer")
        _require(len(self.schemes) > 0, "schemes", "must not be empty")
        for s in self.schemes:
            Scheme.parse(s)
        _require(list(self.gamma_grid) == sorted(self.gamma_grid), "gamma_grid", "must be sorted")
        for g in self.gamma_grid:
            _require(g >= 1, "gamma_grid", f"gamma {g} < 1")

    def synthetic_spec(self) -> SyntheticSpec:
        d = self.data
        return SyntheticSpec(d["family"], int(d["m"]), int(d["n"]), int(d.get("seed", 0)))

    def load_matrix(self) -> np.ndarray:
        if "path" in self.data:
            return read_matrix(self.data["path"])
        return generate_matrix(self.synthetic_spec())


# -- column subset selection experiments ----------------------------------

ROW_FIELDS = (
    "scheme", "k", "ell", "trial", "seed", "spectral_error", "frobenius_error",
    "relative_spectral", "c", "q", "epsilon", "success_probability",
    "lambda_min_omega1", "cross_term_norm", "wall_time_ms",
)


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    k: int
    ell: int
    trial: int
    seed: int
    spectral_error: float
    frobenius_error: float
    relative_spectral: float
    c: float
    q: float
    epsilon: float
    success_probability: float
    lambda_min_omega1: float
    cross_term_norm: float
    wall_time_ms: float


def _run_schemes(A, cfg: ExperimentConfig, schemes: list[Scheme]) -> list[ResultRow]:
    svd = thin_svd(A)
    k = cfg.k
    if k >= svd.rank:
        raise InvalidConfig("k", f"must be below the numerical rank {svd.rank}")
    s_star = column_leverage_scores(svd, k)
    sigma_next = svd.sigma(k + 1)
    rows = []
    for scheme in schemes:
        s = scheme.scores(s_star)
        for ell in cfg.ell_grid:
            bound = epsilon_bound(s, s_star, k, ell, svd.rank, cfg.delta)
            for trial in range(cfg.trials):
                seed = cell_seed(cfg.base_seed, ell, trial)
                start = time.perf_counter()
                draw = sample(s, ell, seed)
                residual = A - project_onto_columns(A, A[:, draw.indices])
                err = spectral_norm(residual)
                lam_min, cross = omega_spectra(draw, svd, k)
                elapsed = (time.perf_counter() - start) * 1e3 if cfg.record_timing else 0.0
                rows.append(ResultRow(
                    scheme.label, k, ell, trial, seed, err, frobenius_norm(residual),
                    err / sigma_next if sigma_next > 0 else math.inf,
                    bound.c, bound.q, bound.epsilon, bound.success_probability,
                    lam_min, cross, elapsed,
                ))
    order = {s.label: i for i, s in enumerate(schemes)}
    rows.sort(key=lambda r: (order[r.scheme], r.ell, r.trial))
    return rows


def run_css_experiment(cfg: ExperimentConfig, A=None) -> list[ResultRow]:
    """One row per (scheme, ell, trial) of the configured sampling schemes."""
    cfg.validate()
    A = cfg.load_matrix() if A is None else np.asarray(A, dtype=float)
    return _run_schemes(A, cfg, [Scheme.parse(s) for s in cfg.schemes])


def run_gamma_sweep(cfg: ExperimentConfig, A=None) -> list[ResultRow]:
    """Optimised scores for every gamma in ``cfg.gamma_grid``; rows are labelled
    ``optimized:<gamma>``."""
    cfg.validate()
    A = cfg.load_matrix() if A is None else np.asarray(A, dtype=float)
    return _run_schemes(A, cfg, [Scheme("optimized", float(g)) for g in cfg.gamma_grid])


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def _write_table(header, records) -> str:
    buf = io.StringIO()
    buf.write(CSV_VERSION + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        writer.writerow([_fmt(v) for v in rec])
    return buf.getvalue()


def rows_to_csv(rows: list[ResultRow]) -> str:
    return _write_table(ROW_FIELDS, ([getattr(r, f) for f in ROW_FIELDS] for r in rows))


def read_rows(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# -- least squares experiments ---------------------------------------------

@dataclass
class LsqConfig:
    output_path: str
    data: dict = field(default_factory=lambda: {"family": "T1", "n_rows": 1000, "noise_sd": 3.0, "seed": 0})
    ell_grid: list = field(default_factory=lambda: [150, 300])
    schemes: list = field(default_factory=lambda: ["uniform", "leverage", "sqrt_leverage"])
    trials: int = 100
    base_seed: int = 0
    reference: str = "x_opt"
    replace: bool = True

    @classmethod
    def from_dict(cls, raw: dict) -> "LsqConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        _require(not unknown, sorted(unknown)[0] if unknown else "", "unknown config field")
        _require("output_path" in raw, "output_path", "required field missing")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def instance(self):
        d = self.data
        try:
            return generate_lsq(
                seed=int(d.get("seed", 0)),
                family=d.get("family", "T1"),
                n_rows=int(d.get("n_rows", 1000)),
                noise_sd=float(d.get("noise_sd", 3.0)),
            )
        except InvalidInput as exc:
            raise InvalidConfig("data", str(exc)) from None

    def validate(self) -> None:
        _require(isinstance(self.data, dict), "data", "must be an object")
        extra = set(self.data) - {"family", "n_rows", "noise_sd", "seed"}
        _require(not extra, "data", f"unknown keys {sorted(extra)}")
        _require(len(self.ell_grid) > 0, "ell_grid", "must not be empty")
        for ell in self.ell_grid:
            _require(isinstance(ell, int) and ell > 0, "ell_grid", f"entry {ell!r} must be a positive integer")
        _require(isinstance(self.trials, int) and self.trials >= 2, "trials", "must be >= 2")
        _require(self.reference in ("x_opt", "beta"), "reference", "must be 'x_opt' or 'beta'")
        _require(len(self.schemes) > 0, "schemes", "must not be empty")
        for s in self.schemes:
            Scheme.parse(s)


@dataclass(frozen=True)
class LsqCell:
    scheme: str
    ell: int
    stats: EstimatorStats | None
    failures: int


def _lsq_draw(s: ScoreVector, ell, seed, with_replacement):
    if with_replacement:
        return sample(s, ell, seed)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(s), size=ell, replace=False, p=s.probabilities())
    return build_omega(idx, s)


def run_lsq_experiment(cfg: LsqConfig, inst=None) -> list[LsqCell]:
    """Sampled least-squares estimators per (scheme, ell) and their statistics."""
    cfg.validate()
    inst = cfg.instance() if inst is None else inst
    n_rows, d = inst.shape
    if not cfg.replace:
        for ell in cfg.ell_grid:
            _require(ell <= n_rows, "ell_grid", f"{ell} exceeds {n_rows} rows without replacement")
    s_star = row_leverage_scores(thin_svd(inst.design))
    if cfg.reference == "beta":
        _require(inst.true_coefficients is not None, "reference", "instance has no true coefficients")
        reference = inst.true_coefficients
    else:
        reference = solve_exact(inst)
    cells = []
    for text in cfg.schemes:
        scheme = Scheme.parse(text)
        s = scheme.scores(s_star)
        for ell in cfg.ell_grid:
            estimates, failures = [], 0
            for trial in range(cfg.trials):
                seed = cell_seed(cfg.base_seed, ell, trial)
                for attempt in range(DEGENERATE_RETRIES + 1):
                    try:
                        draw = _lsq_draw(s, ell, seed + attempt, cfg.replace)
                        estimates.append(solve_sampled(inst, draw))
                        break
                    except DegenerateDraw:
                        continue
                else:
                    failures += 1
            stats = estimator_stats(estimates, reference) if len(estimates) >= 2 else None
            cells.append(LsqCell(scheme.label, ell, stats, failures))
    return cells


LSQ_FIELDS = ("scheme", "ell", "coordinate", "mean_estimate", "variance",
              "squared_bias", "trials", "failures")


def lsq_to_csv(cells: list[LsqCell]) -> str:
    def records():
        for cell in cells:
            st = cell.stats
            if st is None:
                yield (cell.scheme, cell.ell, "all", None, None, None, 0, cell.failures)
                continue
            yield (cell.scheme, cell.ell, "all", None, st.total_variance,
                   st.total_squared_bias, st.trials, cell.failures)
            for j in range(len(st.variance)):
                yield (cell.scheme, cell.ell, j, float(st.mean_estimate[j]),
                       float(st.variance[j]), float(st.squared_bias[j]),
                       st.trials, cell.failures)

    return _write_table(LSQ_FIELDS, records())
