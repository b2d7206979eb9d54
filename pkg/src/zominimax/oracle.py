"""Black-box objective wrapper with per-phase query accounting.

A solver only ever sees function values f(x, y); every evaluation passes
through :class:`BlackBoxObjective` so that query complexity can be audited
after the fact.  Queries are tallied in a :class:`QueryLedger` under a phase
label: ``x-estimation`` and ``y-estimation`` for gradient estimation inside
the algorithm, ``diagnostics`` for out-of-band work (gap surrogates, trace
values) that must not count toward the solver's reported complexity.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, OracleError

PHASE_X = "x-estimation"
PHASE_Y = "y-estimation"
PHASE_DIAG = "diagnostics"


def as_vector(v, dim=None, name="vector"):
    """Validate and return ``v`` as a finite 1-D float64 array.

    Raises ConfigurationError on wrong shape/dimension and on non-finite
    entries; callers rely on points being well-formed downstream.
    """
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ConfigurationError(f"{name} must be 1-D, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ConfigurationError(
            f"{name} has dimension {arr.shape[0]}, expected {dim}"
        )
    if not np.isfinite(arr).all():
        raise ConfigurationError(f"{name} contains non-finite entries")
    return arr


class BlockPoint:
    """An ordered tuple of K equal-dimension coordinate blocks.

    Stored as a (K, block_dim) float64 array.  Instances are treated as
    immutable; updates go through :meth:`with_block`, which returns a copy.
    """

    def __init__(self, blocks):
        arr = np.asarray(blocks, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ConfigurationError(
                f"blocks must form a (K, block_dim) array, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError("block point contains non-finite entries")
        self._blocks = arr

    @property
    def n_blocks(self):
        return self._blocks.shape[0]

    @property
    def block_dim(self):
        return self._blocks.shape[1]

    def block(self, k):
        if not 0 <= k < self.n_blocks:
            raise ConfigurationError(
                f"block index {k} out of range for {self.n_blocks} blocks"
            )
        return self._blocks[k]

    def with_block(self, k, values):
        """Return a new BlockPoint with block ``k`` replaced."""
        vec = as_vector(values, dim=self.block_dim, name=f"block {k}")
        if not 0 <= k < self.n_blocks:
            raise ConfigurationError(
                f"block index {k} out of range for {self.n_blocks} blocks"
            )
        out = self._blocks.copy()
        out[k] = vec
        return BlockPoint(out)

    def concat(self):
        """The blocks flattened into a single vector, in block order."""
        return self._blocks.reshape(-1).copy()

    def copy(self):
        return BlockPoint(self._blocks.copy())

    def __eq__(self, other):
        return (
            isinstance(other, BlockPoint)
            and self._blocks.shape == other._blocks.shape
            and bool(np.all(self._blocks == other._blocks))
        )

    def __repr__(self):
        return f"BlockPoint({self._blocks!r})"


class QueryLedger:
    """Counts oracle queries by phase.  ``total`` is always the phase sum."""

    def __init__(self):
        self._counts = {}

    def record(self, phase, n=1):
        if n < 0:
            raise ConfigurationError("cannot record a negative query count")
        self._counts[phase] = self._counts.get(phase, 0) + int(n)

    def phase_total(self, phase):
        return self._counts.get(phase, 0)

    @property
    def per_phase(self):
        return dict(self._counts)

    @property
    def total(self):
        return sum(self._counts.values())

    @property
    def algorithm_total(self):
        """Queries charged to the algorithm itself (diagnostics excluded)."""
        return self.phase_total(PHASE_X) + self.phase_total(PHASE_Y)

    def snapshot(self):
        led = QueryLedger()
        led._counts = dict(self._counts)
        return led

    def __repr__(self):
        return f"QueryLedger({self._counts!r})"


class BlackBoxObjective:
    """Scalar objective f(x, y) exposed through a counted evaluation call.

    ``fn`` maps (x, y) -> float for 1-D float64 arrays of the declared
    dimensions.  Every evaluation increments the ledger by exactly one under
    the supplied phase label; there is no uncounted evaluation path.
    """

    def __init__(self, fn, dim_x, dim_y, ledger=None):
        if dim_x < 1 or dim_y < 1:
            raise ConfigurationError("dimensions must be positive")
        self.fn = fn
        self.dim_x = int(dim_x)
        self.dim_y = int(dim_y)
        self.ledger = ledger if ledger is not None else QueryLedger()

    @property
    def query_count(self):
        return self.ledger.total

    def evaluate(self, x, y, phase=PHASE_DIAG, validate=True):
        """Counted evaluation of f at (x, y).

        Raises OracleError (with the offending point attached) if the
        objective returns a non-finite value.  ``validate=False`` skips the
        input checks for hot loops whose points are already validated
        float64 vectors; the query is counted either way.
        """
        if validate:
            x = as_vector(x, dim=self.dim_x, name="x")
            y = as_vector(y, dim=self.dim_y, name="y")
        self.ledger.record(phase)
        val = float(self.fn(x, y))
        if not np.isfinite(val):
            raise OracleError(
                f"objective returned non-finite value {val!r}", x=x, y=y
            )
        return val


def evaluate_counted(obj, x, y, phase):
    """Functional form of :meth:`BlackBoxObjective.evaluate`."""
    return obj.evaluate(x, y, phase=phase)
