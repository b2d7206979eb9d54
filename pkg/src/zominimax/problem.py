"""Container tying an objective to its feasible geometry.

A minimax problem is min over x of max over y of f(x, y) with x constrained
to one feasible set (single-block) or to a product of equal-dimension block
sets, y constrained to its own set, and optional separable prox terms on
each block (h) and on y (g).  Analytic gradient callables are optional and
power the first-order baselines and exact diagnostics.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .geometry import FeasibleSet, ProxTerm, ZeroTerm
from .oracle import BlackBoxObjective, BlockPoint, as_vector


class MinimaxProblem:
    def __init__(self, objective, set_x, set_y, h=None, g=None,
                 grad_x=None, grad_y=None):
        if not isinstance(objective, BlackBoxObjective):
            raise ConfigurationError("objective must be a BlackBoxObjective")
        if isinstance(set_x, FeasibleSet):
            sets_x = [set_x]
        else:
            sets_x = list(set_x)
            if not sets_x:
                raise ConfigurationError("at least one x block set is required")
        for s in sets_x:
            if not isinstance(s, FeasibleSet):
                raise ConfigurationError(f"not a feasible set: {s!r}")
        dims = {s.dim for s in sets_x}
        if len(dims) != 1:
            raise ConfigurationError(
                f"all x blocks must share one dimension, got {sorted(dims)}"
            )
        block_dim = sets_x[0].dim
        if len(sets_x) * block_dim != objective.dim_x:
            raise ConfigurationError(
                f"x blocks span dimension {len(sets_x) * block_dim}, "
                f"objective expects {objective.dim_x}"
            )
        if not isinstance(set_y, FeasibleSet):
            raise ConfigurationError("set_y must be a feasible set")
        if set_y.dim != objective.dim_y:
            raise ConfigurationError(
                f"set_y has dimension {set_y.dim}, objective expects {objective.dim_y}"
            )

        if h is None:
            h_terms = [ZeroTerm() for _ in sets_x]
        elif isinstance(h, ProxTerm):
            h_terms = [h for _ in sets_x]
        else:
            h_terms = list(h)
            if len(h_terms) != len(sets_x):
                raise ConfigurationError(
                    f"{len(h_terms)} prox terms for {len(sets_x)} x blocks"
                )
        for t in h_terms:
            if not isinstance(t, ProxTerm):
                raise ConfigurationError(f"not a prox term: {t!r}")
        g_term = g if g is not None else ZeroTerm()
        if not isinstance(g_term, ProxTerm):
            raise ConfigurationError(f"not a prox term: {g_term!r}")

        self.objective = objective
        self.sets_x = sets_x
        self.set_y = set_y
        self.h_terms = h_terms
        self.g_term = g_term
        self.grad_x = grad_x
        self.grad_y = grad_y

    @property
    def n_blocks(self):
        return len(self.sets_x)

    @property
    def block_dim(self):
        return self.sets_x[0].dim

    @property
    def dim_x(self):
        return self.objective.dim_x

    @property
    def dim_y(self):
        return self.objective.dim_y

    @property
    def has_analytic_grads(self):
        return self.grad_x is not None and self.grad_y is not None

    @property
    def is_smooth(self):
        zero = lambda t: t.decompose() == (0.0, 0.0)
        return all(zero(t) for t in self.h_terms) and zero(self.g_term)

    def init_x(self):
        """Projection of the zero vector onto each x block."""
        blocks = [s.project(np.zeros(s.dim)) for s in self.sets_x]
        if self.n_blocks == 1:
            return blocks[0]
        return BlockPoint(np.stack(blocks))

    def init_y(self):
        """Projection of the zero vector onto the y set."""
        return self.set_y.project(np.zeros(self.set_y.dim))

    def x_concat(self, x):
        """Normalize an iterate (vector or block point) to a flat vector."""
        if isinstance(x, BlockPoint):
            return x.concat()
        return as_vector(x, dim=self.dim_x, name="x")

    def x_blocks(self, x):
        """Normalize an iterate to a BlockPoint."""
        if isinstance(x, BlockPoint):
            return x
        vec = as_vector(x, dim=self.dim_x, name="x")
        return BlockPoint(vec.reshape(self.n_blocks, self.block_dim))
