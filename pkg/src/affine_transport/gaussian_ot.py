"""Closed-form 2-Wasserstein geometry between Gaussian models.

For Gaussians p = N(mu1, S1) and q = N(mu2, S2) the squared distance is

    W2(p, q)^2 = |mu1 - mu2|^2 + tr S1 + tr S2 - 2 tr (S2^1/2 S1 S2^1/2)^1/2

and the optimal map is affine, x -> A x + b, with

    A = S2^1/2 (S2^1/2 S1 S2^1/2)^-1/2 S2^1/2,    b = mu2 - A mu1.

The affine transport map between two arbitrary sample sets is this optimal
map between their normal (moment) approximations. Two bounds relate the
Gaussian picture back to the raw distributions: a gap bound for the distance
between normal approximations versus the true distance, and a worst-case
bound sqrt(2 tr S) for the distance between any distribution and anything
sharing its normal approximation's covariance budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DimensionMismatch
from .linalg import _readonly, _root, check_symmetric, estimate_moments, spd_sqrt

__all__ = [
    "GaussianModel",
    "AffineMap",
    "gaussian_w2",
    "gaussian_ot_map",
    "at_map",
    "gelbrich_gap_bound",
    "normal_approx_bound",
]


@dataclass(frozen=True)
class GaussianModel:
    """Mean vector and symmetric PSD covariance of a normal distribution."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        cov = np.asarray(self.covariance, dtype=np.float64)
        if cov.ndim != 2 or cov.shape != (mean.shape[0], mean.shape[0]):
            raise DimensionMismatch(
                f"covariance shape {cov.shape} does not match mean of length {mean.shape[0]}"
            )
        check_symmetric(cov, "covariance")
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "covariance", _readonly(cov))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class AffineMap:
    """The map x -> matrix @ x + offset, applied row-wise to sample sets."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        offset = np.asarray(self.offset, dtype=np.float64).reshape(-1)
        if matrix.ndim != 2 or matrix.shape[0] != offset.shape[0]:
            raise DimensionMismatch(
                f"matrix shape {matrix.shape} does not match offset of length {offset.shape[0]}"
            )
        object.__setattr__(self, "matrix", _readonly(matrix))
        object.__setattr__(self, "offset", _readonly(offset))

    @property
    def dim_in(self) -> int:
        return self.matrix.shape[1]

    @property
    def dim_out(self) -> int:
        return self.matrix.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Apply to a single vector (d,) or a stack of row vectors (n, d)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim_in:
            raise DimensionMismatch(
                f"input of width {x.shape[-1]} fed to a map expecting {self.dim_in}"
            )
        return x @ self.matrix.T + self.offset


def _cross_trace(sigma1: np.ndarray, sigma2: np.ndarray) -> float:
    # tr (S2^1/2 S1 S2^1/2)^1/2, evaluated through the symmetric product so
    # the inner matrix stays PSD up to rounding
    s2 = spd_sqrt(sigma2)
    inner = s2 @ sigma1 @ s2
    inner = (inner + inner.T) / 2.0
    w = np.linalg.eigvalsh(inner)
    return float(np.sqrt(np.clip(w, 0.0, None)).sum())


def gaussian_w2(p: GaussianModel, q: GaussianModel) -> float:
    """Closed-form 2-Wasserstein distance between two Gaussian models.

    The squared distance is clamped at zero before the final square root so
    rounding noise on identical models cannot produce NaN.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"models have dimensions {p.dim} and {q.dim}")
    delta = p.mean - q.mean
    sq = (
        float(delta @ delta)
        + float(np.trace(p.covariance))
        + float(np.trace(q.covariance))
        - 2.0 * _cross_trace(p.covariance, q.covariance)
    )
    return float(np.sqrt(max(sq, 0.0)))


def gaussian_ot_map(p: GaussianModel, q: GaussianModel) -> AffineMap:
    """Optimal transport map from Gaussian p onto Gaussian q.

    Returns the affine map with symmetric PSD matrix
    ``A = S2^1/2 (S2^1/2 S1 S2^1/2)^-1/2 S2^1/2`` and offset
    ``b = q.mean - A @ p.mean``. Raises SingularMatrix when either covariance
    is numerically singular (eigenvalue ratio below 1e-12); ridge-regularized
    estimates always pass. The inner inverse root is evaluated from the
    singular values of the factor product ``S2 @ S1``: forming the full inner
    product would square its conditioning and lose pairs of regularized
    low-rank covariances whose degenerate subspaces line up.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"models have dimensions {p.dim} and {q.dim}")
    s2 = _root(q.covariance, "target covariance", inverse=False, require_invertible=True)
    s1 = _root(p.covariance, "source covariance", inverse=False, require_invertible=True)
    # S2 S1 S1 S2 = (S2 S1)(S2 S1)^T, so with S2 S1 = U diag(sig) V^T the
    # middle factor of A is U diag(1/sig) U^T
    u, sig, _ = np.linalg.svd(s2 @ s1)
    half = s2 @ u
    a = (half / sig) @ half.T
    a = (a + a.T) / 2.0
    b = q.mean - a @ p.mean
    return AffineMap(a, b)


def at_map(source: np.ndarray, target: np.ndarray) -> AffineMap:
    """Affine transport map between two sample sets.

    Estimates moments of each set (with ridge) and returns the Gaussian
    optimal map between the resulting normal approximations. The sets do not
    need equal sample counts, only equal dimension.
    """
    xs = np.asarray(source, dtype=np.float64)
    xt = np.asarray(target, dtype=np.float64)
    if xs.ndim == 1:
        xs = xs.reshape(-1, 1)
    if xt.ndim == 1:
        xt = xt.reshape(-1, 1)
    if xs.shape[1] != xt.shape[1]:
        raise DimensionMismatch(
            f"source has dimension {xs.shape[1]}, target has {xt.shape[1]}"
        )
    ms = estimate_moments(xs)
    mt = estimate_moments(xt)
    return gaussian_ot_map(
        GaussianModel(ms.mean, ms.covariance), GaussianModel(mt.mean, mt.covariance)
    )


def gelbrich_gap_bound(p: GaussianModel, q: GaussianModel) -> float:
    """Bound on the gap between the Gaussian distance and the true distance.

    For distributions X, Y with the moments of p, q, the distance between the
    normal approximations lower-bounds W2(X, Y), and the difference is at most

        2 tr[(S1 S2)^1/2] / sqrt(tr S1 + tr S2)

    where the trace term is evaluated as tr (S2^1/2 S1 S2^1/2)^1/2.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"models have dimensions {p.dim} and {q.dim}")
    t1 = float(np.trace(p.covariance))
    t2 = float(np.trace(q.covariance))
    total = t1 + t2
    if total <= 0.0:
        raise DegenerateInput("both covariances have zero trace; the bound is undefined")
    return 2.0 * _cross_trace(p.covariance, q.covariance) / float(np.sqrt(total))


def normal_approx_bound(sigma: np.ndarray) -> float:
    """Worst-case distance budget sqrt(2) * sqrt(tr sigma).

    Any distribution is within this of its own normal approximation, and the
    transported source stays within this of the target whose covariance is
    sigma; the affinity score divides by this value.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    check_symmetric(sigma, "sigma")
    tr = max(float(np.trace(sigma)), 0.0)
    return float(np.sqrt(2.0) * np.sqrt(tr))
