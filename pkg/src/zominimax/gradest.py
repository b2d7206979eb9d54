"""Randomized two-point gradient estimation from function values only.

The estimator perturbs along directions drawn uniformly from the unit
sphere and scales finite differences by the dimension:

    g_hat = (1/q) * sum_i  dim * (f(x + mu*u_i, y) - f(x, y)) / mu * u_i

which is an unbiased estimate of the gradient of the ball-smoothed
objective.  A batch of q directions therefore costs exactly q + 1 oracle
queries (one shared base value).  Smoothing, by contrast, averages over the
unit *ball*; :func:`mc_smoothed_value` samples accordingly.

Direction randomness is organized into named streams keyed by
(seed, phase, iteration, block) so that two solvers configured with the
same seed consume identical directions at matching points of their
trajectories.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .oracle import PHASE_DIAG, PHASE_X, PHASE_Y, as_vector

# Stable numeric codes for stream keying; unknown phase labels hash via
# crc32 (offset to avoid colliding with the reserved codes).
_PHASE_CODES = {PHASE_X: 0, PHASE_Y: 1, PHASE_DIAG: 2}


def _phase_code(phase):
    code = _PHASE_CODES.get(phase)
    if code is None:
        code = 16 + (zlib.crc32(phase.encode("utf-8")) % (2**31))
    return code


def stream_rng(seed, phase, iteration=0, block=0):
    """Deterministic generator for the stream (seed, phase, iteration, block).

    Streams with identical identifiers emit identical sequences on every
    platform; distinct identifiers give statistically independent streams.
    """
    if iteration < 0 or block < 0:
        raise ConfigurationError("iteration and block indices must be >= 0")
    ss = np.random.SeedSequence(
        entropy=int(seed), spawn_key=(_phase_code(phase), int(iteration), int(block))
    )
    return np.random.Generator(np.random.PCG64(ss))


class DirectionSampler:
    """Draws unit directions for one estimation site from a keyed stream."""

    def __init__(self, dim, rng):
        if dim < 1:
            raise ConfigurationError("direction dimension must be positive")
        self.dim = int(dim)
        self.rng = rng

    @classmethod
    def keyed(cls, dim, seed, phase, iteration=0, block=0):
        return cls(dim, stream_rng(seed, phase, iteration, block))

    def sample(self):
        """One point uniform on the unit sphere (normalized Gaussian)."""
        g = self.rng.standard_normal(self.dim)
        norm = np.linalg.norm(g)
        while norm == 0.0:  # essentially impossible, but keep it total
            g = self.rng.standard_normal(self.dim)
            norm = np.linalg.norm(g)
        return g / norm

    def sample_batch(self, n):
        g = self.rng.standard_normal((int(n), self.dim))
        norms = np.sqrt(np.einsum("ij,ij->i", g, g))
        while (norms == 0.0).any():  # see sample(); unreachable in practice
            bad = norms == 0.0
            g[bad] = self.rng.standard_normal((int(bad.sum()), self.dim))
            norms[bad] = np.sqrt(np.einsum("ij,ij->i", g[bad], g[bad]))
        return g / norms[:, None]

    def sample_ball(self):
        """One point uniform in the unit ball (sphere point, scaled radius)."""
        u = self.sample()
        r = self.rng.uniform() ** (1.0 / self.dim)
        return u * r


def sample_unit_direction(rng, dim):
    """Uniform unit-sphere direction from an existing generator."""
    return DirectionSampler(dim, rng).sample()


@dataclass(frozen=True)
class EstimatorConfig:
    """Smoothing radius and batch size for one gradient estimate."""

    mu: float
    q: int

    def __post_init__(self):
        if not (self.mu > 0.0 and np.isfinite(self.mu)):
            raise ConfigurationError(f"mu must be positive and finite, got {self.mu}")
        if int(self.q) < 1:
            raise ConfigurationError(f"q must be a positive integer, got {self.q}")


@dataclass(frozen=True)
class GradEstimate:
    """A gradient estimate plus the parameters and queries it consumed."""

    vector: np.ndarray
    mu_used: float
    q_used: int
    queries_spent: int


def _directional_estimate(evaluate_shifted, base_value, dim, mu, directions):
    """Average the scaled finite differences over a direction batch.

    ``evaluate_shifted(u)`` must return f at the point perturbed by mu*u.
    Shared by the x-, y-, and block-estimators so that reductions between
    solvers reuse identical floating-point arithmetic.
    """
    acc = np.zeros(dim)
    for u in directions:
        diff = evaluate_shifted(u) - base_value
        acc += (dim * diff / mu) * u
    return acc / len(directions)


def _resolve_directions(cfg, dim, sampler, directions):
    if directions is not None:
        dirs = np.asarray(directions, dtype=np.float64)
        if dirs.ndim != 2 or dirs.shape != (cfg.q, dim):
            raise ConfigurationError(
                f"directions must have shape ({cfg.q}, {dim}), got {dirs.shape}"
            )
        return dirs
    if sampler is None:
        raise ConfigurationError("either a sampler or explicit directions required")
    if sampler.dim != dim:
        raise ConfigurationError(
            f"sampler dimension {sampler.dim} does not match estimate dimension {dim}"
        )
    return sampler.sample_batch(cfg.q)


def estimate_grad_x(obj, x, y, cfg, sampler=None, directions=None, phase=PHASE_X):
    """Estimate the x-gradient of f at (x, y); costs cfg.q + 1 queries."""
    x = as_vector(x, dim=obj.dim_x, name="x")
    y = as_vector(y, dim=obj.dim_y, name="y")
    dirs = _resolve_directions(cfg, obj.dim_x, sampler, directions)
    base = obj.evaluate(x, y, phase=phase, validate=False)
    vec = _directional_estimate(
        lambda u: obj.evaluate(x + cfg.mu * u, y, phase=phase, validate=False),
        base,
        obj.dim_x,
        cfg.mu,
        dirs,
    )
    return GradEstimate(vector=vec, mu_used=cfg.mu, q_used=cfg.q,
                        queries_spent=cfg.q + 1)


def estimate_grad_y(obj, x, y, cfg, sampler=None, directions=None, phase=PHASE_Y):
    """Estimate the y-gradient of f at (x, y); costs cfg.q + 1 queries."""
    x = as_vector(x, dim=obj.dim_x, name="x")
    y = as_vector(y, dim=obj.dim_y, name="y")
    dirs = _resolve_directions(cfg, obj.dim_y, sampler, directions)
    base = obj.evaluate(x, y, phase=phase, validate=False)
    vec = _directional_estimate(
        lambda v: obj.evaluate(x, y + cfg.mu * v, phase=phase, validate=False),
        base,
        obj.dim_y,
        cfg.mu,
        dirs,
    )
    return GradEstimate(vector=vec, mu_used=cfg.mu, q_used=cfg.q,
                        queries_spent=cfg.q + 1)


def estimate_grad_block(obj, w, k, y, cfg, sampler=None, directions=None,
                        phase=PHASE_X):
    """Estimate the gradient with respect to block ``k`` of a block point.

    Only block k of ``w`` is perturbed; the remaining blocks are held at
    their current (possibly partially updated) values.  Costs cfg.q + 1
    queries.
    """
    if not 0 <= k < w.n_blocks:
        raise ConfigurationError(
            f"block index {k} out of range for {w.n_blocks} blocks"
        )
    y = as_vector(y, dim=obj.dim_y, name="y")
    d = w.block_dim
    if w.n_blocks * d != obj.dim_x:
        raise ConfigurationError(
            f"block point spans dimension {w.n_blocks * d}, "
            f"objective expects {obj.dim_x}"
        )
    dirs = _resolve_directions(cfg, d, sampler, directions)
    base = obj.evaluate(w.concat(), y, phase=phase, validate=False)
    block_k = w.block(k)

    def shifted(u):
        return obj.evaluate(
            w.with_block(k, block_k + cfg.mu * u).concat(), y,
            phase=phase, validate=False,
        )

    vec = _directional_estimate(shifted, base, d, cfg.mu, dirs)
    return GradEstimate(vector=vec, mu_used=cfg.mu, q_used=cfg.q,
                        queries_spent=cfg.q + 1)


def mc_smoothed_value(obj, x, y, mu, n_samples, sampler, wrt="x",
                      phase=PHASE_DIAG):
    """Monte Carlo estimate of the ball-smoothed objective at (x, y).

    Averages f over uniform perturbations of radius mu in the unit ball of
    the chosen variable.  Returns (estimate, standard_error).
    """
    x = as_vector(x, dim=obj.dim_x, name="x")
    y = as_vector(y, dim=obj.dim_y, name="y")
    if n_samples < 1:
        raise ConfigurationError("n_samples must be positive")
    if wrt not in ("x", "y"):
        raise ConfigurationError(f"wrt must be 'x' or 'y', got {wrt!r}")
    dim = obj.dim_x if wrt == "x" else obj.dim_y
    if sampler.dim != dim:
        raise ConfigurationError(
            f"sampler dimension {sampler.dim} does not match {wrt}-dimension {dim}"
        )
    vals = np.empty(n_samples)
    for i in range(n_samples):
        u = sampler.sample_ball()
        if wrt == "x":
            vals[i] = obj.evaluate(x + mu * u, y, phase=phase, validate=False)
        else:
            vals[i] = obj.evaluate(x, y + mu * u, phase=phase, validate=False)
    est = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else np.inf
    return est, se
