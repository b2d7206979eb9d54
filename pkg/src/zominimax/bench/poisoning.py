"""Data-poisoning attack on logistic regression as a minimax benchmark.

A synthetic binary-classification dataset is generated from a ground-truth
parameter vector.  The attacker perturbs a fixed fraction of the training
features by a vector x bounded in the sup norm; the learner fits its
parameters theta against the corrupted set.  Writing F(x, theta) for the
training loss (corrupted part plus clean part), the attack is the minimax
problem  min_x max_theta -F(x, theta):  minimizing over x maximizes the
damage, while the inner maximization keeps theta optimal for the learner.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..geometry import Box, BoxGuard
from ..oracle import BlackBoxObjective
from ..problem import MinimaxProblem
from ..schedules import ConstantSchedule
from ..solvers import StopRule, run

PROB_CLAMP = 1e-12


@dataclass
class SyntheticDataset:
    features: np.ndarray        # (n_samples, dim)
    labels: np.ndarray          # (n_samples,) in {0, 1}
    theta_star: np.ndarray      # (dim,) ground-truth parameters
    train_idx: np.ndarray
    test_idx: np.ndarray
    poison_idx: np.ndarray      # subset of train_idx under attacker control
    seed: int
    noise_var: float
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.features.shape[1]

    @property
    def clean_train_idx(self):
        mask = ~np.isin(self.train_idx, self.poison_idx)
        return self.train_idx[mask]


def _sigmoid(a):
    out = np.empty_like(a, dtype=np.float64)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out


def generate_dataset(n_samples=1000, dim=100, seed=0, noise_var=1e-3,
                     poison_ratio=0.1, train_frac=0.9):
    """Draw features, labels, and a seeded train/test/poison split.

    Features are standard normal; the label is 1 when the ground-truth
    logit (plus small Gaussian noise of variance ``noise_var``) exceeds 0.
    The split shuffles once with the same seed; the poisoned subset is the
    leading ``poison_ratio`` fraction of the shuffled training indices.
    """
    if n_samples < 2 or dim < 1:
        raise ConfigurationError("need n_samples >= 2 and dim >= 1")
    if not (0.0 <= poison_ratio <= 1.0) or not (0.0 < train_frac < 1.0):
        raise ConfigurationError("poison_ratio in [0,1], train_frac in (0,1)")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    theta_star = rng.standard_normal(dim)
    features = rng.standard_normal((n_samples, dim))
    noise = rng.normal(0.0, np.sqrt(noise_var), size=n_samples)
    labels = (features @ theta_star + noise > 0.0).astype(np.int64)
    perm = rng.permutation(n_samples)
    n_train = int(round(train_frac * n_samples))
    n_train = min(max(n_train, 1), n_samples - 1)
    train_idx = perm[:n_train]
    test_idx = perm[n_train:]
    n_poison = int(round(poison_ratio * n_train))
    poison_idx = train_idx[:n_poison]
    return SyntheticDataset(
        features=features, labels=labels, theta_star=theta_star,
        train_idx=train_idx, test_idx=test_idx, poison_idx=poison_idx,
        seed=int(seed), noise_var=float(noise_var),
        meta={"n_samples": n_samples, "dim": dim, "train_frac": train_frac,
              "poison_ratio": poison_ratio},
    )


def logistic_loss(x, theta, features, labels):
    """Mean binary cross-entropy of sigmoid((z + x) . theta) over a subset.

    ``x`` shifts every row of ``features``; pass zeros for an unperturbed
    evaluation.  Probabilities are clamped away from 0 and 1 before the
    logs so the loss stays finite.
    """
    if features.shape[0] == 0:
        return 0.0
    scores = (features + x) @ theta
    p = np.clip(_sigmoid(scores), PROB_CLAMP, 1.0 - PROB_CLAMP)
    return float(-np.mean(labels * np.log(p) + (1 - labels) * np.log1p(-p)))


def _loss_grads(x, theta, features, labels):
    """Gradients of :func:`logistic_loss` in x and theta."""
    n = features.shape[0]
    if n == 0:
        d = theta.shape[0]
        return np.zeros(d), np.zeros(d)
    shifted = features + x
    err = _sigmoid(shifted @ theta) - labels
    grad_theta = shifted.T @ err / n
    grad_x = float(np.mean(err)) * theta
    return grad_x, grad_theta


def training_loss(x, theta, dataset):
    """Corrupted-train loss: perturbed poisoned part plus clean part."""
    zp = dataset.features[dataset.poison_idx]
    tp = dataset.labels[dataset.poison_idx]
    zc = dataset.features[dataset.clean_train_idx]
    tc = dataset.labels[dataset.clean_train_idx]
    return logistic_loss(x, theta, zp, tp) + logistic_loss(
        np.zeros_like(x), theta, zc, tc)


def training_loss_grads(x, theta, dataset):
    zp = dataset.features[dataset.poison_idx]
    tp = dataset.labels[dataset.poison_idx]
    zc = dataset.features[dataset.clean_train_idx]
    tc = dataset.labels[dataset.clean_train_idx]
    gx1, gt1 = _loss_grads(x, theta, zp, tp)
    _, gt2 = _loss_grads(np.zeros_like(x), theta, zc, tc)
    return gx1, gt1 + gt2


def _frozen_subsets(dataset):
    """Materialize the poisoned/clean training subsets once per problem."""
    zp = dataset.features[dataset.poison_idx].copy()
    tp = dataset.labels[dataset.poison_idx].copy()
    zc = dataset.features[dataset.clean_train_idx].copy()
    tc = dataset.labels[dataset.clean_train_idx].copy()
    return zp, tp, zc, tc


def _attack_callables(dataset):
    zp, tp, zc, tc = _frozen_subsets(dataset)
    d = dataset.dim
    zero = np.zeros(d)

    def fn(x, y):
        return -(logistic_loss(x, y, zp, tp) + logistic_loss(zero, y, zc, tc))

    def grad_x(x, y):
        gx, _ = _loss_grads(x, y, zp, tp)
        return -gx

    def grad_y(x, y):
        _, gt1 = _loss_grads(x, y, zp, tp)
        _, gt2 = _loss_grads(zero, y, zc, tc)
        return -(gt1 + gt2)

    return fn, grad_x, grad_y


def attack_objective(dataset, epsilon=2.0, theta_bound=100.0):
    """Minimax problem for the attack: min_x max_theta -training_loss.

    x lives in the sup-norm box of radius ``epsilon``; theta is free but
    guarded by a large box of radius ``theta_bound``.
    """
    if epsilon <= 0:
        raise ConfigurationError("epsilon must be positive")
    d = dataset.dim
    fn, grad_x, grad_y = _attack_callables(dataset)
    obj = BlackBoxObjective(fn, d, d)
    return MinimaxProblem(
        obj, Box(-epsilon, epsilon, dim=d), BoxGuard(d, theta_bound),
        grad_x=grad_x, grad_y=grad_y,
    )


class PoisoningProblem:
    """Dataset plus attack geometry, with accuracy bookkeeping."""

    def __init__(self, dataset, epsilon=2.0, theta_bound=100.0):
        self.dataset = dataset
        self.epsilon = float(epsilon)
        self.theta_bound = float(theta_bound)

    def make_problem(self):
        """Fresh MinimaxProblem (fresh ledger) for one run."""
        return attack_objective(self.dataset, self.epsilon, self.theta_bound)


def test_accuracy(theta, dataset):
    """Fraction of held-out samples classified correctly.

    Predicts class 1 when sigmoid(z . theta) exceeds 0.5; a tie at exactly
    0.5 predicts class 0.
    """
    z = dataset.features[dataset.test_idx]
    t = dataset.labels[dataset.test_idx]
    preds = (_sigmoid(z @ theta) > 0.5).astype(np.int64)
    return float(np.mean(preds == t))


def train_theta(dataset, x=None, iters=5000, lr=0.05, theta_bound=100.0):
    """Fit theta by first-order ascent with the perturbation frozen at x.

    Freezing is done by shrinking the x box to the single point, so the
    same minimax machinery trains the model: only the theta player moves.
    Returns the trained parameter vector.
    """
    d = dataset.dim
    x = np.zeros(d) if x is None else np.asarray(x, dtype=np.float64)
    fn, grad_x_fn, grad_y_fn = _attack_callables(dataset)
    obj = BlackBoxObjective(fn, d, d)
    problem = MinimaxProblem(
        obj, Box(x, x), BoxGuard(d, theta_bound),
        grad_x=grad_x_fn, grad_y=grad_y_fn,
    )
    result = run("fo-minmax", problem, ConstantSchedule(alpha=0.02, beta=lr),
                 StopRule(max_iters=iters, gap_check_period=max(iters, 1)),
                 record_values=False)
    return result.y
