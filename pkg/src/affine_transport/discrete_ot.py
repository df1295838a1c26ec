"""Exact empirical 2-Wasserstein distance between equal-size sample sets.

With uniform weights on n points per side, the Kantorovich problem has a
permutation solution, so the exact distance reduces to a linear assignment
over the squared-distance cost matrix. A factorial-time enumerator is kept
alongside as an independent oracle for small instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, NonFinite, ShapeMismatch, SizeMismatch, TooLarge
from .linalg import _readonly

__all__ = [
    "TransportPlan",
    "empirical_w2",
    "brute_force_w2",
    "pointwise_error",
    "MAX_EXACT",
    "MAX_BRUTE",
]

MAX_EXACT = 4096
MAX_BRUTE = 8

_MARGINAL_TOL = 1e-8
_WEIGHT_TOL = 1e-10


@dataclass(frozen=True)
class TransportPlan:
    """Coupling matrix with its marginals and transport cost."""

    coupling: np.ndarray
    source_weights: np.ndarray
    target_weights: np.ndarray
    total_cost: float

    def __post_init__(self):
        coupling = _readonly(self.coupling)
        sw = _readonly(self.source_weights)
        tw = _readonly(self.target_weights)
        if coupling.shape != (sw.shape[0], tw.shape[0]):
            raise ShapeMismatch(
                f"coupling shape {coupling.shape} does not match weights "
                f"({sw.shape[0]}, {tw.shape[0]})"
            )
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "source_weights", sw)
        object.__setattr__(self, "target_weights", tw)
        if coupling.size and coupling.min() < 0.0:
            raise ValueError(f"coupling has negative entry {coupling.min():.3e}")
        for w, name in ((sw, "source_weights"), (tw, "target_weights")):
            if abs(float(w.sum()) - 1.0) > _WEIGHT_TOL:
                raise ValueError(f"{name} sum to {w.sum()!r}, expected 1")
        row = np.abs(coupling.sum(axis=1) - sw).max() if coupling.size else 0.0
        col = np.abs(coupling.sum(axis=0) - tw).max() if coupling.size else 0.0
        if max(float(row), float(col)) > _MARGINAL_TOL:
            raise ValueError(
                f"coupling marginals deviate from weights by {max(row, col):.3e}"
            )


def _sample_matrix(a, name: str) -> np.ndarray:
    x = np.asarray(a, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2:
        raise SizeMismatch(f"{name} must be an (n, d) matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFinite(f"{name} contains NaN or infinite entries")
    return x


def empirical_w2(x: np.ndarray, y: np.ndarray):
    """Exact W2 between two equal-size point sets with uniform weights.

    Solves the assignment problem on the squared Euclidean cost matrix and
    returns ``(distance, plan)`` where ``distance = sqrt(total_cost)`` and the
    plan puts mass 1/n on each matched pair. Deterministic for fixed inputs.

    Raises SizeMismatch if the sets differ in count, DimensionMismatch if
    they differ in width, and TooLarge above 4096 points per side.
    """
    xs = _sample_matrix(x, "x")
    ys = _sample_matrix(y, "y")
    if xs.shape[0] != ys.shape[0]:
        raise SizeMismatch(f"sample counts differ: {xs.shape[0]} vs {ys.shape[0]}")
    if xs.shape[1] != ys.shape[1]:
        raise DimensionMismatch(f"sample widths differ: {xs.shape[1]} vs {ys.shape[1]}")
    n = xs.shape[0]
    if n == 0:
        raise SizeMismatch("cannot transport between empty sample sets")
    if n > MAX_EXACT:
        raise TooLarge(f"exact assignment is capped at {MAX_EXACT} points, got {n}")
    cost = cdist(xs, ys, metric="sqeuclidean")
    rows, cols = linear_sum_assignment(cost)
    total = float(cost[rows, cols].sum()) / n
    coupling = np.zeros((n, n))
    coupling[rows, cols] = 1.0 / n
    weights = np.full(n, 1.0 / n)
    plan = TransportPlan(coupling, weights, weights.copy(), total)
    return float(np.sqrt(max(total, 0.0))), plan


def brute_force_w2(x: np.ndarray, y: np.ndarray) -> float:
    """W2 by exhaustive enumeration of all pairings; oracle for tiny n.

    Kept deliberately independent of the assignment path: the cost of each
    permutation is accumulated with direct arithmetic.
    """
    xs = _sample_matrix(x, "x")
    ys = _sample_matrix(y, "y")
    if xs.shape[0] != ys.shape[0]:
        raise SizeMismatch(f"sample counts differ: {xs.shape[0]} vs {ys.shape[0]}")
    if xs.shape[1] != ys.shape[1]:
        raise DimensionMismatch(f"sample widths differ: {xs.shape[1]} vs {ys.shape[1]}")
    n = xs.shape[0]
    if n == 0:
        raise SizeMismatch("cannot transport between empty sample sets")
    if n > MAX_BRUTE:
        raise TooLarge(f"enumeration is capped at {MAX_BRUTE} points, got {n}")
    best = np.inf
    for perm in itertools.permutations(range(n)):
        total = 0.0
        for i, j in enumerate(perm):
            diff = xs[i] - ys[j]
            total += float(diff @ diff)
        if total < best:
            best = total
    return float(np.sqrt(best / n))


def pointwise_error(predicted: np.ndarray, actual: np.ndarray):
    """Per-row Euclidean errors between paired predictions and ground truth.

    Returns ``(mean, std, per_sample)`` with the population standard
    deviation (ddof = 0).
    """
    p = _sample_matrix(predicted, "predicted")
    a = _sample_matrix(actual, "actual")
    if p.shape != a.shape:
        raise SizeMismatch(f"shapes differ: {p.shape} vs {a.shape}")
    per = np.linalg.norm(p - a, axis=1)
    return float(per.mean()), float(per.std()), per
