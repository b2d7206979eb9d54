"""Feasible sets, separable prox terms, and the projection/prox operators.

Sets are compact and convex; each knows how to project onto itself and how
to test membership.  Prox terms are the separable convex regularizers that
may ride along with a constraint set: the prox of a pure quadratic reduces
to a projection of a shifted point (exact for any convex set), while terms
with an L1 part use the per-coordinate soft-threshold-then-clamp closed
form, which is exact on box-shaped sets only.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .oracle import as_vector


# ---------------------------------------------------------------------------
# feasible sets

class FeasibleSet:
    """Interface: a compact convex set with projection and membership."""

    dim = None

    def project(self, p):
        raise NotImplementedError

    def contains(self, p, tol=1e-9):
        raise NotImplementedError


class Box(FeasibleSet):
    """Axis-aligned box {x : lo <= x <= hi}; projection is a clamp."""

    def __init__(self, lo, hi, dim=None):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        if lo.ndim == 0 or hi.ndim == 0:
            if dim is None and lo.ndim == 0 and hi.ndim == 0:
                raise ConfigurationError("scalar box bounds require an explicit dim")
            dim = dim if dim is not None else max(lo.size, hi.size)
            lo = np.broadcast_to(lo, (dim,)).astype(np.float64)
            hi = np.broadcast_to(hi, (dim,)).astype(np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ConfigurationError("box bounds must be 1-D arrays of equal length")
        if dim is not None and lo.shape[0] != dim:
            raise ConfigurationError(
                f"box bounds have dimension {lo.shape[0]}, expected {dim}"
            )
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ConfigurationError("box bounds must be finite")
        if np.any(lo > hi):
            raise ConfigurationError("box requires lo <= hi in every coordinate")
        self.lo = lo.copy()
        self.hi = hi.copy()
        self.dim = lo.shape[0]

    def project(self, p):
        p = as_vector(p, dim=self.dim, name="point")
        return np.minimum(np.maximum(p, self.lo), self.hi)

    def contains(self, p, tol=1e-9):
        p = as_vector(p, dim=self.dim, name="point")
        return bool(np.all(p >= self.lo - tol) and np.all(p <= self.hi + tol))


class BoxGuard(Box):
    """Stand-in for an unconstrained variable: a huge symmetric box.

    Iterates of a well-posed run never reach the guard bound; it exists so
    that every set in play stays compact.
    """

    def __init__(self, dim, bound=1e6):
        if not (bound > 0 and np.isfinite(bound)):
            raise ConfigurationError("guard bound must be positive and finite")
        super().__init__(-bound, bound, dim=dim)
        self.bound = float(bound)


class Ball(FeasibleSet):
    """Euclidean ball {x : ||x - center|| <= radius}."""

    def __init__(self, center, radius, dim=None):
        center = np.asarray(center, dtype=np.float64)
        if center.ndim == 0:
            if dim is None:
                raise ConfigurationError("scalar ball center requires an explicit dim")
            center = np.broadcast_to(center, (dim,)).astype(np.float64)
        center = as_vector(center, dim=dim, name="center")
        if not (radius > 0 and np.isfinite(radius)):
            raise ConfigurationError("ball radius must be positive and finite")
        self.center = center.copy()
        self.radius = float(radius)
        self.dim = center.shape[0]

    def project(self, p):
        p = as_vector(p, dim=self.dim, name="point")
        diff = p - self.center
        norm = np.linalg.norm(diff)
        if norm <= self.radius:
            return p.copy()
        return self.center + diff * (self.radius / norm)

    def contains(self, p, tol=1e-9):
        p = as_vector(p, dim=self.dim, name="point")
        return bool(np.linalg.norm(p - self.center) <= self.radius + tol)


class Simplex(FeasibleSet):
    """Probability simplex {x : x >= 0, sum(x) = 1}.

    Projection by sorting and thresholding: find the largest support size
    whose water level keeps all supported coordinates positive.
    """

    def __init__(self, dim):
        if dim < 1:
            raise ConfigurationError("simplex dimension must be positive")
        self.dim = int(dim)

    def project(self, p):
        p = as_vector(p, dim=self.dim, name="point")
        u = np.sort(p)[::-1]
        css = np.cumsum(u) - 1.0
        idx = np.arange(1, self.dim + 1)
        support = np.nonzero(u - css / idx > 0)[0]
        rho = support[-1]
        theta = css[rho] / (rho + 1.0)
        return np.maximum(p - theta, 0.0)

    def contains(self, p, tol=1e-9):
        p = as_vector(p, dim=self.dim, name="point")
        return bool(np.all(p >= -tol) and abs(float(np.sum(p)) - 1.0) <= tol)


# ---------------------------------------------------------------------------
# prox terms

class ProxTerm:
    """Separable convex regularizer h with a closed-form prox.

    Every supported term decomposes into an L1 part and a quadratic part:
    h(x) = l1_weight * ||x||_1 + (quad_weight / 2) * ||x||^2.
    """

    def value(self, x):
        raise NotImplementedError

    def decompose(self):
        """Return (l1_weight, quad_weight)."""
        raise NotImplementedError


class ZeroTerm(ProxTerm):
    def value(self, x):
        return 0.0

    def decompose(self):
        return 0.0, 0.0


class L1Term(ProxTerm):
    def __init__(self, weight):
        if not (weight >= 0 and np.isfinite(weight)):
            raise ConfigurationError("L1 weight must be nonnegative and finite")
        self.weight = float(weight)

    def value(self, x):
        return self.weight * float(np.sum(np.abs(x)))

    def decompose(self):
        return self.weight, 0.0


class SquaredL2Term(ProxTerm):
    """h(x) = (weight / 2) * ||x||^2."""

    def __init__(self, weight):
        if not (weight >= 0 and np.isfinite(weight)):
            raise ConfigurationError("squared-L2 weight must be nonnegative and finite")
        self.weight = float(weight)

    def value(self, x):
        return 0.5 * self.weight * float(np.dot(x, x))

    def decompose(self):
        return 0.0, self.weight


class SumTerm(ProxTerm):
    def __init__(self, terms):
        terms = list(terms)
        for t in terms:
            if not isinstance(t, ProxTerm):
                raise ConfigurationError(f"not a prox term: {t!r}")
        self.terms = terms

    def value(self, x):
        return float(sum(t.value(x) for t in self.terms))

    def decompose(self):
        a = 0.0
        w = 0.0
        for t in self.terms:
            ta, tw = t.decompose()
            a += ta
            w += tw
        return a, w


# ---------------------------------------------------------------------------
# operators

def project(set_, p):
    """Euclidean projection of p onto the set."""
    return set_.project(p)


def _soft_threshold(v, thresh):
    return np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)


def prox(term, set_, w, coef):
    """argmin_{x in set} h(x) + (coef/2) * ||x - w||^2.

    Pure-quadratic terms reduce to projecting a shifted point, which is
    exact for every supported set.  Terms with an L1 part are solved
    per-coordinate (soft-threshold, then clamp) and therefore require a
    box-shaped set.
    """
    if not (coef > 0 and np.isfinite(coef)):
        raise ConfigurationError(f"prox coefficient must be positive, got {coef}")
    w = as_vector(w, dim=set_.dim, name="prox input")
    l1_w, quad_w = term.decompose()
    if l1_w == 0.0:
        # minimizing (quad_w/2)||x||^2 + (coef/2)||x-w||^2 over the set is a
        # projection of the unconstrained minimizer; when quad_w == 0 skip the
        # rescaling entirely so prox with a zero term is bitwise a projection.
        v = w if quad_w == 0.0 else (coef * w) / (coef + quad_w)
        return set_.project(v)
    if not isinstance(set_, Box):
        raise ConfigurationError(
            "L1-type prox terms are supported on box-shaped sets only"
        )
    v = w if quad_w == 0.0 else (coef * w) / (coef + quad_w)
    u = _soft_threshold(v, l1_w / (coef + quad_w))
    return np.minimum(np.maximum(u, set_.lo), set_.hi)


def prox_block(h, set_, w, coef):
    """Prox used on a minimization block: argmin h + (coef/2)||. - w||^2."""
    return prox(h, set_, w, coef)


def prox_y(g, set_, z, rho):
    """Prox used on the maximization side.

    Solves argmax_{y in set} -g(y) - (1/(2*rho)) * ||y - z||^2, i.e. the
    minimization prox with coefficient 1/rho.
    """
    if not (rho > 0 and np.isfinite(rho)):
        raise ConfigurationError(f"rho must be positive, got {rho}")
    return prox(g, set_, z, 1.0 / rho)
