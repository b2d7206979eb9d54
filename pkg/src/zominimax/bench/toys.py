"""Small analytic minimax problems with known structure.

Each toy carries the black-box objective, its feasible sets, analytic
gradients, and (when known) the saddle point and the problem constants the
theoretical schedule needs.  Construction cross-checks the analytic
gradients against central finite differences; a toy that fails the check
never escapes its constructor.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from ..geometry import Box
from ..oracle import BlackBoxObjective
from ..problem import MinimaxProblem
from ..schedules import ProblemConstants


class ToyProblem:
    """An analytic problem plus its metadata.

    ``make_problem()`` returns a fresh MinimaxProblem (fresh query ledger)
    on every call so runs never share counters.
    """

    def __init__(self, name, fn, dim_x, dim_y, set_x, set_y, grad_x, grad_y,
                 saddle=None, constants=None, fd_rel_tol=1e-5):
        self.name = name
        self.fn = fn
        self.dim_x = dim_x
        self.dim_y = dim_y
        self.set_x = set_x
        self.set_y = set_y
        self.grad_x = grad_x
        self.grad_y = grad_y
        self.saddle = saddle
        self.constants = constants
        _verify_gradients(fn, grad_x, grad_y, set_x, set_y, fd_rel_tol)

    def make_problem(self):
        obj = BlackBoxObjective(self.fn, self.dim_x, self.dim_y)
        return MinimaxProblem(obj, self.set_x, self.set_y,
                              grad_x=self.grad_x, grad_y=self.grad_y)


def _central_diff(fn, x, y, wrt, step=1e-6):
    dim = x.shape[0] if wrt == "x" else y.shape[0]
    out = np.empty(dim)
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = step
        if wrt == "x":
            out[i] = (fn(x + e, y) - fn(x - e, y)) / (2.0 * step)
        else:
            out[i] = (fn(x, y + e) - fn(x, y - e)) / (2.0 * step)
    return out


def _verify_gradients(fn, grad_x, grad_y, set_x, set_y, rel_tol):
    rng = np.random.default_rng(np.random.SeedSequence(20240901))
    for _ in range(5):
        x = set_x.project(rng.uniform(-2, 2, size=set_x.dim))
        y = set_y.project(rng.uniform(-2, 2, size=set_y.dim))
        for wrt, grad in (("x", grad_x), ("y", grad_y)):
            fd = _central_diff(fn, x, y, wrt)
            ana = np.asarray(grad(x, y), dtype=np.float64)
            err = np.linalg.norm(fd - ana) / max(1.0, np.linalg.norm(ana))
            if err > rel_tol:
                raise ConfigurationError(
                    f"analytic {wrt}-gradient disagrees with finite "
                    f"differences (rel err {err:.2e} > {rel_tol:.0e}) at "
                    f"x={x}, y={y}"
                )


def _make_saddle():
    """f(x, y) = x^2 + 2xy - y^2 on [-1, 1] x [-1, 1]; saddle at the origin."""

    def fn(x, y):
        return float(x[0] ** 2 + 2.0 * x[0] * y[0] - y[0] ** 2)

    def grad_x(x, y):
        return np.array([2.0 * x[0] + 2.0 * y[0]])

    def grad_y(x, y):
        return np.array([2.0 * x[0] - 2.0 * y[0]])

    consts = ProblemConstants(
        lipschitz_x=2.0, lipschitz_y=2.0, grad_bound=6.0, y_radius=1.0,
        n_blocks=1, dim_x=1, dim_y=1, value_lower=-4.0, value_upper=4.0,
    )
    return ToyProblem(
        "saddle", fn, 1, 1, Box(-1.0, 1.0, dim=1), Box(-1.0, 1.0, dim=1),
        grad_x, grad_y, saddle=(np.zeros(1), np.zeros(1)), constants=consts,
    )


def _make_bilinear():
    """f(x, y) = x . y on [-1, 1]^2 x [-1, 1]^2; saddle at the origin."""

    def fn(x, y):
        return float(np.dot(x, y))

    def grad_x(x, y):
        return y.copy()

    def grad_y(x, y):
        return x.copy()

    return ToyProblem(
        "bilinear", fn, 2, 2, Box(-1.0, 1.0, dim=2), Box(-1.0, 1.0, dim=2),
        grad_x, grad_y, saddle=(np.zeros(2), np.zeros(2)),
    )


def _make_coupled_wells():
    """Strongly convex-concave pair with a fixed cross-coupling matrix."""
    A = np.array([[1.0, 0.5], [-0.3, 0.8]])

    def fn(x, y):
        return float(0.5 * np.dot(x, x) + x @ A @ y - 0.5 * np.dot(y, y))

    def grad_x(x, y):
        return x + A @ y

    def grad_y(x, y):
        return A.T @ x - y

    consts = ProblemConstants(
        lipschitz_x=2.0, lipschitz_y=2.0, grad_bound=8.0, y_radius=2.0,
        n_blocks=1, dim_x=2, dim_y=2, value_lower=-16.0, value_upper=16.0,
    )
    return ToyProblem(
        "coupled-wells", fn, 2, 2, Box(-2.0, 2.0, dim=2), Box(-2.0, 2.0, dim=2),
        grad_x, grad_y, saddle=(np.zeros(2), np.zeros(2)), constants=consts,
    )


_REGISTRY = {
    "saddle": _make_saddle,
    "bilinear": _make_bilinear,
    "coupled-wells": _make_coupled_wells,
}

TOY_NAMES = tuple(sorted(_REGISTRY))


def make_toy(name):
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown toy problem {name!r}; available: {', '.join(TOY_NAMES)}"
        ) from None
    return factory()
