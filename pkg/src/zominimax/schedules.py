"""Stepsize, smoothing-radius, and batch-size schedules.

Two families are provided.  :class:`TheoreticalSchedule` implements the
convergence-guaranteeing parameter choices: a regularization weight decaying
like t^(-1/4), a prox coefficient growing like sqrt(t), shrinking smoothing
radii, and direction-batch sizes that grow with t, all driven by problem
constants (Lipschitz moduli, gradient bound, domain radii) through a set of
derived scaling constants.  :class:`PracticalSchedule` is the tuned variant
used in experiments (alpha ~ a/(b+sqrt(t)), constant beta, c/t^(1/4)
regularization, fixed mu and q), and :class:`ConstantSchedule` freezes all
rates for the unregularized baseline.

All schedules emit an :class:`IterationParams` bundle at each t >= 1;
solvers read the fields they need (single-block steps use ``alpha``, block
steps use ``tau`` plus their own per-block offsets).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class IterationParams:
    """Per-iteration parameters consumed by the solver steps."""

    alpha: float       # single-block x stepsize
    tau: float         # block prox coefficient (before per-block offsets)
    beta: float        # y stepsize
    eta: float         # y regularization weight
    mu_x: float
    mu_y: float
    q_x: int
    q_y: int


@dataclass(frozen=True)
class ProblemConstants:
    """Problem-level constants that drive the theoretical schedule.

    lipschitz_x / lipschitz_y bound the gradient Lipschitz moduli in x and
    y, grad_bound bounds the gradient norm over the domain, y_radius bounds
    ||y|| over the feasible set, gamma_min/gamma_max bracket the per-block
    prox offsets, and value_lower/value_upper bracket the objective.
    """

    lipschitz_x: float
    lipschitz_y: float
    grad_bound: float
    y_radius: float
    n_blocks: int = 1
    dim_x: int = 1
    dim_y: int = 1
    gamma_min: float = 0.0
    gamma_max: float = 0.0
    value_lower: float = 0.0
    value_upper: float = 0.0

    def __post_init__(self):
        if self.lipschitz_x <= 0 or self.lipschitz_y <= 0:
            raise ConfigurationError("Lipschitz constants must be positive")
        if self.grad_bound < 0 or self.y_radius < 0:
            raise ConfigurationError("gradient bound and y radius must be >= 0")
        if self.n_blocks < 1 or self.dim_x < 1 or self.dim_y < 1:
            raise ConfigurationError("block count and dimensions must be >= 1")
        if self.gamma_min > self.gamma_max:
            raise ConfigurationError("gamma_min must not exceed gamma_max")
        if self.value_lower > self.value_upper:
            raise ConfigurationError("value_lower must not exceed value_upper")


@dataclass(frozen=True)
class DerivedConstants:
    """Scaling constants derived from the problem constants and rho.

    ``gap_ratio`` bounds the squared-gap-to-descent ratio, ``scale`` is the
    working scale (the max of gap_ratio and a stepsize-driven floor, which
    coincide with each other's alternative algebraic forms), c1..c3 are the
    potential-function coefficients, and ``budget`` is the total potential
    drop available to the run.
    """

    gap_ratio: float
    scale: float
    c1: float
    c2: float
    c3: float
    budget: float


def _check_rho(consts, rho):
    limit = 1.0 / (10.0 * consts.lipschitz_y)
    if not (0.0 < rho <= limit):
        raise ConfigurationError(
            f"rho must lie in (0, 1/(10*lipschitz_y)] = (0, {limit}], got {rho}"
        )


def derived_constants(consts, rho):
    """Compute the scaling constants for a given rho."""
    _check_rho(consts, rho)
    lx = consts.lipschitz_x
    ly = consts.lipschitz_y
    base = lx / 2.0 + 3.0 * rho * ly**2 / 2.0 - consts.gamma_min
    denom = (384.0 * 400.0 * rho * ly**2) ** 2
    gap_ratio = 32.0 + 9.0**4 * (
        8.0 * (base + consts.gamma_max) ** 2
        + 4.0 * consts.n_blocks * lx**2
        + 9.0 * ly**2
    ) / denom
    # two equivalent forms of the scale floor; keep the max for safety
    floor_a = 27.0**2 / (448.0 * 400.0 * rho**2 * ly**2)
    m1 = 384.0 * 400.0 * rho * ly**2 / 81.0
    floor_b = 54.0 / (7.0 * rho * m1)
    scale = max(gap_ratio, floor_a, floor_b)
    c1 = 27.0 / (128.0 * 400.0 * rho * ly**2)
    c2 = max(7.0 * rho / 54.0, c1 / gap_ratio)
    c3 = 27.0 / (256.0 * 400.0 * rho * ly**2)
    budget = consts.value_upper - consts.value_lower + (196.0 / rho) * consts.y_radius**2
    return DerivedConstants(gap_ratio=gap_ratio, scale=scale, c1=c1, c2=c2,
                            c3=c3, budget=budget)


def _check_iteration(t):
    if int(t) < 1:
        raise ConfigurationError(f"schedules are defined for t >= 1, got {t}")
    return int(t)


class TheoreticalSchedule:
    """Parameter schedule with convergence guarantees.

    ``eps`` is the stationarity target the smoothing radii and batch sizes
    are tuned for.  Requires rho <= 1/(10*lipschitz_y).
    """

    def __init__(self, consts, rho, eps):
        if not isinstance(consts, ProblemConstants):
            raise ConfigurationError("consts must be a ProblemConstants instance")
        _check_rho(consts, rho)
        if not (eps > 0 and np.isfinite(eps)):
            raise ConfigurationError("eps must be positive and finite")
        self.consts = consts
        self.rho = float(rho)
        self.eps = float(eps)
        self.derived = derived_constants(consts, rho)

    def lambda_(self, t):
        """Regularization weight, decaying like t^(-1/4)."""
        t = _check_iteration(t)
        return 9.0 / (20.0 * self.rho * t**0.25)

    def tau(self, t):
        """Prox coefficient, growing like sqrt(t) through 1/lambda^2."""
        t = _check_iteration(t)
        c = self.consts
        lam = self.lambda_(t)
        return (
            c.lipschitz_x / 2.0
            + 768.0 * c.lipschitz_y**2 / (self.rho * lam**2)
            + 3.0 * self.rho * c.lipschitz_y**2 / 2.0
            - c.gamma_min
        )

    def mu_x(self, t):
        t = _check_iteration(t)
        c, d = self.consts, self.derived
        inner = d.c1 / (
            448.0 * d.scale * c.n_blocks
            * max(c.lipschitz_x, c.lipschitz_x**2 * c.dim_x**2 * d.c2)
        )
        return (self.eps / t**0.25) * math.sqrt(inner)

    def mu_y(self, t):
        t = _check_iteration(t)
        c, d = self.consts, self.derived
        inner = d.c1 / (
            448.0 * d.scale
            * max(5120.0 / (81.0 * c.lipschitz_y), 2.25 * d.c2)
        )
        return self.eps / (c.lipschitz_y * c.dim_y * (t + 1.0) ** 0.5) * math.sqrt(inner)

    def q_x(self, t):
        t = _check_iteration(t)
        c, d = self.consts, self.derived
        mu = self.mu_x(t)
        raw = (
            224.0 * d.scale * c.n_blocks
            * (4.0 * c.dim_x * c.grad_bound**2
               + mu**2 * c.lipschitz_x**2 * c.dim_x**2)
            * max(d.c3, 4.0 * d.c2) * t**0.5
            / (self.eps**2 * d.c1)
        )
        return max(1, math.ceil(raw))

    def q_y(self, t):
        t = _check_iteration(t)
        c, d = self.consts, self.derived
        mu = self.mu_y(t)
        raw = (
            224.0 * d.scale
            * (4.0 * c.dim_y * c.grad_bound**2
               + mu**2 * c.lipschitz_y**2 * c.dim_y**2)
            * max(5120.0 / (9.0 * c.lipschitz_y), 9.0 * d.c2) * (t + 1.0)
            / (self.eps**2 * d.c1)
        )
        return max(1, math.ceil(raw))

    def at(self, t):
        t = _check_iteration(t)
        tau = self.tau(t)
        return IterationParams(
            alpha=1.0 / tau,
            tau=tau,
            beta=self.rho,
            eta=self.lambda_(t),
            mu_x=self.mu_x(t),
            mu_y=self.mu_y(t),
            q_x=self.q_x(t),
            q_y=self.q_y(t),
        )


@dataclass(frozen=True)
class PracticalSchedule:
    """Tuned rates: alpha ~ a/(b+sqrt(t)), constant beta, eta ~ c/t^(1/4)."""

    alpha_scale: float = 5.0
    alpha_offset: float = 100.0
    beta: float = 0.02
    eta_scale: float = 0.1
    mu_x: float = 0.005
    mu_y: float = 0.005
    q_x: int = 20
    q_y: int = 20

    def __post_init__(self):
        if self.alpha_scale <= 0 or self.alpha_offset < 0:
            raise ConfigurationError(
                "alpha_scale must be positive and alpha_offset nonnegative"
            )
        if self.beta <= 0:
            raise ConfigurationError("beta must be positive")
        if self.eta_scale < 0:
            raise ConfigurationError("eta_scale must be nonnegative")
        if self.mu_x <= 0 or self.mu_y <= 0:
            raise ConfigurationError("smoothing radii must be positive")
        if int(self.q_x) < 1 or int(self.q_y) < 1:
            raise ConfigurationError("batch sizes must be positive integers")

    def at(self, t):
        t = _check_iteration(t)
        alpha = self.alpha_scale / (self.alpha_offset + math.sqrt(t))
        return IterationParams(
            alpha=alpha,
            tau=1.0 / alpha,
            beta=self.beta,
            eta=self.eta_scale / t**0.25,
            mu_x=self.mu_x,
            mu_y=self.mu_y,
            q_x=int(self.q_x),
            q_y=int(self.q_y),
        )


@dataclass(frozen=True)
class ConstantSchedule:
    """All rates frozen; eta defaults to 0 (no y regularization)."""

    alpha: float
    beta: float
    eta: float = 0.0
    mu_x: float = 0.005
    mu_y: float = 0.005
    q_x: int = 20
    q_y: int = 20

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigurationError("stepsizes must be positive")
        if self.eta < 0:
            raise ConfigurationError("eta must be nonnegative")
        if self.mu_x <= 0 or self.mu_y <= 0:
            raise ConfigurationError("smoothing radii must be positive")
        if int(self.q_x) < 1 or int(self.q_y) < 1:
            raise ConfigurationError("batch sizes must be positive integers")

    def at(self, t):
        _check_iteration(t)
        return IterationParams(
            alpha=self.alpha,
            tau=1.0 / self.alpha,
            beta=self.beta,
            eta=self.eta,
            mu_x=self.mu_x,
            mu_y=self.mu_y,
            q_x=int(self.q_x),
            q_y=int(self.q_y),
        )


class MatchedSingleBlockSchedule:
    """Adapter: drive a single-block solver from a block schedule.

    Rewrites alpha to 1/(tau + gamma) using the same floating-point
    expression the block step uses for its stepsize, so a one-block run and
    its single-block counterpart share bitwise-identical steps.
    """

    def __init__(self, inner, gamma=0.0):
        self.inner = inner
        self.gamma = float(gamma)

    def at(self, t):
        p = self.inner.at(t)
        return replace(p, alpha=1.0 / (p.tau + self.gamma))


def practical_params(schedule, t):
    """Evaluate any schedule at iteration t."""
    return schedule.at(t)
