"""Stationarity-gap measurement and run traces.

The stationarity gap stacks, per x block, the scaled difference between the
iterate and one prox step along the gradient, plus an analogous row for y;
its norm vanishes exactly at constrained stationary points.  The
``regularized`` variant measures stationarity of the shifted objective in
which the active y regularization term is subtracted from the y gradient;
the two norms obey ||standard||^2 <= 2*||regularized||^2 + 2*lam^2*||y||^2.

Gradients come from a :class:`GapOracle`: analytic when the problem
provides closed-form gradients, otherwise a high-accuracy randomized
surrogate charged to the ``diagnostics`` ledger phase so it never pollutes
the solver's reported query complexity.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .gradest import DirectionSampler, EstimatorConfig, estimate_grad_x, estimate_grad_y
from .geometry import prox_block, prox_y
from .oracle import PHASE_DIAG, as_vector

TRACE_COLUMNS = ["iter", "queries", "f_value", "gap_total", "gap_x", "gap_y", "wall_ms"]


@dataclass(frozen=True)
class StationarityGap:
    """Per-block x gap norms, the y gap norm, and their joint norm."""

    gap_x: np.ndarray
    gap_y: float
    total: float
    mode: str

    @property
    def gap_x_total(self):
        return float(math.sqrt(float(np.sum(self.gap_x**2))))


@dataclass(frozen=True)
class TraceRecord:
    """One diagnostic sample of a run.

    ``queries`` counts algorithm-phase oracle queries only; diagnostics
    work (including the f_value sample itself) is ledgered out-of-band.
    """

    t: int
    queries: int
    f_value: float
    gap_total: float
    gap_x: float
    gap_y: float
    wall_ms: float


class GapOracle:
    """Interface: full x and y gradients at a point, for gap evaluation."""

    def grad_x(self, x, y):
        raise NotImplementedError

    def grad_y(self, x, y):
        raise NotImplementedError


class AnalyticGapOracle(GapOracle):
    def __init__(self, grad_x_fn, grad_y_fn):
        if grad_x_fn is None or grad_y_fn is None:
            raise ConfigurationError("both gradient callables are required")
        self._gx = grad_x_fn
        self._gy = grad_y_fn

    def grad_x(self, x, y):
        return np.asarray(self._gx(x, y), dtype=np.float64)

    def grad_y(self, x, y):
        return np.asarray(self._gy(x, y), dtype=np.float64)


class SurrogateGapOracle(GapOracle):
    """Randomized gradient surrogate for gap evaluation.

    Uses a large direction batch and a tiny smoothing radius; defaults are
    q = 1000 * max(1, dim/10) and mu = 1e-6.  Queries are charged to the
    diagnostics phase.  Each call advances an internal counter that keys
    the direction stream, so a fixed call sequence is reproducible.
    """

    def __init__(self, objective, q_diag=None, mu_diag=1e-6, seed=0):
        self.objective = objective
        self.q_x = int(q_diag) if q_diag is not None else self._default_q(objective.dim_x)
        self.q_y = int(q_diag) if q_diag is not None else self._default_q(objective.dim_y)
        if self.q_x < 1 or self.q_y < 1:
            raise ConfigurationError("q_diag must be a positive integer")
        if not (mu_diag > 0):
            raise ConfigurationError("mu_diag must be positive")
        self.mu_diag = float(mu_diag)
        self.seed = int(seed)
        self._calls = 0

    @staticmethod
    def _default_q(dim):
        return 1000 * max(1, dim // 10)

    def grad_x(self, x, y):
        self._calls += 1
        sampler = DirectionSampler.keyed(
            self.objective.dim_x, self.seed, PHASE_DIAG, self._calls, 0
        )
        est = estimate_grad_x(
            self.objective, x, y, EstimatorConfig(self.mu_diag, self.q_x),
            sampler, phase=PHASE_DIAG,
        )
        return est.vector

    def grad_y(self, x, y):
        self._calls += 1
        sampler = DirectionSampler.keyed(
            self.objective.dim_y, self.seed, PHASE_DIAG, self._calls, 1
        )
        est = estimate_grad_y(
            self.objective, x, y, EstimatorConfig(self.mu_diag, self.q_y),
            sampler, phase=PHASE_DIAG,
        )
        return est.vector


def _block_coefs(problem, coefs):
    coefs = np.atleast_1d(np.asarray(coefs, dtype=np.float64))
    if coefs.size == 1:
        coefs = np.full(problem.n_blocks, float(coefs[0]))
    if coefs.shape != (problem.n_blocks,):
        raise ConfigurationError(
            f"need one prox coefficient per block ({problem.n_blocks}), "
            f"got shape {coefs.shape}"
        )
    if np.any(coefs <= 0):
        raise ConfigurationError("prox coefficients must be positive")
    return coefs


def _gap(problem, x, y, grad_x_full, grad_y_eff, coefs, rho, mode):
    blocks = problem.x_blocks(x)
    coefs = _block_coefs(problem, coefs)
    if not (rho > 0 and np.isfinite(rho)):
        raise ConfigurationError(f"rho must be positive, got {rho}")
    grad_x_full = as_vector(grad_x_full, dim=problem.dim_x, name="x gradient")
    d = problem.block_dim
    gap_x = np.empty(problem.n_blocks)
    sq_sum = 0.0
    for k in range(problem.n_blocks):
        xk = blocks.block(k)
        gk = grad_x_full[k * d:(k + 1) * d]
        step = prox_block(problem.h_terms[k], problem.sets_x[k],
                          xk - gk / coefs[k], coefs[k])
        rk = coefs[k] * (xk - step)
        gap_x[k] = float(np.linalg.norm(rk))
        sq_sum += float(np.dot(rk, rk))
    y = as_vector(y, dim=problem.dim_y, name="y")
    grad_y_eff = as_vector(grad_y_eff, dim=problem.dim_y, name="y gradient")
    y_step = prox_y(problem.g_term, problem.set_y, y + rho * grad_y_eff, rho)
    ry = (y - y_step) / rho
    gap_y = float(np.linalg.norm(ry))
    sq_sum += float(np.dot(ry, ry))
    return StationarityGap(gap_x=gap_x, gap_y=gap_y,
                           total=float(math.sqrt(sq_sum)), mode=mode)


def stationarity_gap(problem, x, y, oracle, coefs, rho):
    """Gap of the original objective at (x, y)."""
    xc = problem.x_concat(x)
    gx = oracle.grad_x(xc, y)
    gy = oracle.grad_y(xc, y)
    return _gap(problem, x, y, gx, gy, coefs, rho, mode="standard")


def regularized_stationarity_gap(problem, x, y, oracle, coefs, rho, lam):
    """Gap of the objective minus the active y regularization (lam/2)*||y||^2.

    ``lam`` must be the regularization weight in force when the current y
    iterate was produced.
    """
    if lam < 0:
        raise ConfigurationError("lam must be nonnegative")
    xc = problem.x_concat(x)
    gx = oracle.grad_x(xc, y)
    gy = oracle.grad_y(xc, y) - lam * as_vector(y, dim=problem.dim_y, name="y")
    return _gap(problem, x, y, gx, gy, coefs, rho, mode="regularized")


# ---------------------------------------------------------------------------
# trace output

def write_trace(trace, path, fmt="csv"):
    """Write a run trace to disk.

    ``csv`` emits one row per record with the fixed column set
    iter,queries,f_value,gap_total,gap_x,gap_y,wall_ms; ``json`` emits the
    same records as a list of objects.
    """
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for rec in trace:
                writer.writerow([rec.t, rec.queries, repr(rec.f_value),
                                 repr(rec.gap_total), repr(rec.gap_x),
                                 repr(rec.gap_y), repr(rec.wall_ms)])
    elif fmt == "json":
        payload = [
            {"iter": rec.t, "queries": rec.queries, "f_value": rec.f_value,
             "gap_total": rec.gap_total, "gap_x": rec.gap_x,
             "gap_y": rec.gap_y, "wall_ms": rec.wall_ms}
            for rec in trace
        ]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
    else:
        raise ConfigurationError(f"unknown trace format {fmt!r}")


def read_trace_csv(path):
    """Read back a CSV trace written by :func:`write_trace`."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRACE_COLUMNS:
            raise ConfigurationError(
                f"unexpected trace columns {reader.fieldnames!r}"
            )
        for row in reader:
            out.append(TraceRecord(
                t=int(row["iter"]), queries=int(row["queries"]),
                f_value=float(row["f_value"]), gap_total=float(row["gap_total"]),
                gap_x=float(row["gap_x"]), gap_y=float(row["gap_y"]),
                wall_ms=float(row["wall_ms"]),
            ))
    return out


def summarize_trials(values):
    """Median and interquartile range of a list of per-trial scalars."""
    arr = np.asarray([v for v in values if v is not None and np.isfinite(v)],
                     dtype=np.float64)
    if arr.size == 0:
        return {"n": 0, "median": None, "q25": None, "q75": None, "iqr": None}
    q25, med, q75 = (float(v) for v in np.percentile(arr, [25, 50, 75]))
    return {"n": int(arr.size), "median": med, "q25": q25, "q75": q75,
            "iqr": q75 - q25}


def write_summary(path, config, trials):
    """Write a JSON run summary.

    ``config`` echoes every setting that produced the runs (including
    non-default modeling choices); ``trials`` is a list of per-trial dicts,
    each carrying at least final_gap and total_queries.  Aggregate stats
    (median, IQR) are computed over the trials for every shared numeric key.
    """
    numeric_keys = set()
    for tr in trials:
        for key, val in tr.items():
            if isinstance(val, (int, float)) and not isinstance(val, bool):
                numeric_keys.add(key)
    aggregates = {
        key: summarize_trials([tr.get(key) for tr in trials])
        for key in sorted(numeric_keys)
    }
    payload = {"config": config, "trials": trials, "aggregates": aggregates}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=_json_default)
    return payload


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")
