"""Entropic optimal transport via log-domain Sinkhorn scaling, plus an
exact assignment oracle for small instances.

Marginals are uniform (1/m over rows, 1/n over columns).  All scaling
happens in the log domain: with assembled costs around 4 and the default
regularization 0.1, the kernel ``exp(-cost/reg)`` would otherwise
underflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .embeddings import _freeze

EXACT_MATCHING_MAX_SIZE = 64


@dataclass(frozen=True)
class TransportPlan:
    """A non-negative coupling with near-uniform marginals."""

    entries: np.ndarray
    iterations_used: int
    marginal_violation: float

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2:
            raise ValueError(f"plan must be 2-D, got shape {e.shape}")
        object.__setattr__(self, "entries", _freeze(e))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def _as_cost_array(cost) -> np.ndarray:
    entries = np.asarray(getattr(cost, "entries", cost), dtype=np.float64)
    if entries.ndim != 2 or entries.size == 0:
        raise ValueError(f"cost must be a non-empty 2-D array, got shape {entries.shape}")
    if not np.isfinite(entries).all():
        raise ValueError("cost contains non-finite entries")
    return entries


def sinkhorn_plan(cost, reg: float = 0.1, max_iters: int = 1000, tol: float = 1e-9) -> TransportPlan:
    """Solve min <C, P> + reg * KL(P | uniform) by alternating scaling.

    Iterates row and column log-scalings of ``exp(-cost/reg)`` toward the
    uniform marginals and stops once the worst marginal deviation drops
    below ``tol`` (or after ``max_iters`` sweeps).  The reported
    violation is measured on the returned plan itself.
    """
    if reg <= 0:
        raise ValueError(f"reg must be positive, got {reg}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    entries = _as_cost_array(cost)
    m, n = entries.shape
    log_a = -np.log(m)
    log_b = -np.log(n)

    kernel = -entries / reg
    alpha = np.zeros(m)
    beta = np.zeros(n)
    work = np.empty_like(kernel)

    def lse(shift, axis):
        # log-sum-exp of kernel + shift along one axis, fused into `work`
        np.add(kernel, shift, out=work)
        peak = work.max(axis=axis)
        np.subtract(work, peak[:, None] if axis == 1 else peak[None, :], out=work)
        np.exp(work, out=work)
        return peak + np.log(work.sum(axis=axis))

    # row log-sums under the current beta; reused as both the convergence
    # check and the next alpha update
    row_lse = lse(beta[None, :], axis=1)
    iterations = 0
    for iterations in range(1, max_iters + 1):
        alpha = log_a - row_lse
        beta = log_b - lse(alpha[:, None], axis=0)
        row_lse = lse(beta[None, :], axis=1)
        row_violation = np.abs(np.exp(alpha + row_lse) - 1.0 / m).max()
        if row_violation < tol:
            break

    plan = np.exp(kernel + alpha[:, None] + beta[None, :])
    violation = max(
        np.abs(plan.sum(axis=1) - 1.0 / m).max(),
        np.abs(plan.sum(axis=0) - 1.0 / n).max(),
    )
    return TransportPlan(plan, iterations, float(violation))


def exact_min_cost_matching(cost) -> frozenset[tuple[int, int]]:
    """Minimum-total-cost one-to-one matching of size min(m, n).

    Exact (Jonker-Volgenant via scipy); restricted to small instances
    because its role is cross-checking transport plans in tests.
    """
    entries = _as_cost_array(cost)
    m, n = entries.shape
    if max(m, n) > EXACT_MATCHING_MAX_SIZE:
        raise ValueError(
            f"exact matching is limited to {EXACT_MATCHING_MAX_SIZE} rows/columns, got {m}x{n}"
        )
    rows, cols = linear_sum_assignment(entries)
    return frozenset((int(i), int(j)) for i, j in zip(rows, cols))
