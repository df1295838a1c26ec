"""Symmetric matrix roots and moment estimation.

All routines work on plain float64 numpy arrays. Symmetric inputs are checked
against a relative tolerance, positive semi-definiteness is enforced by
clamping small eigenvalues, and every estimated covariance carries a small
diagonal ridge so that inverse roots exist even for rank-deficient samples
(constant coordinates, disabled joints).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IndefiniteMatrix,
    NonFinite,
    NotSymmetric,
    SingularMatrix,
    TooFewSamples,
)

__all__ = [
    "MomentEstimate",
    "estimate_moments",
    "spd_sqrt",
    "spd_inv_sqrt",
    "svd",
]

# relative tolerances for symmetry, indefiniteness, and rank checks
SYMMETRY_TOL = 1e-10
INDEFINITE_TOL = 1e-6
CLAMP_TOL = 1e-12
SINGULAR_RATIO = 1e-12

# ridge added to every estimated covariance: max(floor, scale * tr / d)
RIDGE_FLOOR = 1e-10
RIDGE_SCALE = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out is a:
        out = out.copy()
    out.setflags(write=False)
    return out


def _require_finite(a: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or infinite entries")


def check_symmetric(m: np.ndarray, name: str = "matrix") -> None:
    """Raise NotSymmetric unless max|M - M^T| <= tol * (1 + max|M|)."""
    asym = float(np.abs(m - m.T).max()) if m.size else 0.0
    scale = float(np.abs(m).max()) if m.size else 0.0
    if asym > SYMMETRY_TOL * (1.0 + scale):
        raise NotSymmetric(f"{name} is not symmetric: max asymmetry {asym:.3e}")


def _checked_eigh(m, name: str):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetric(f"{name} must be a square matrix, got shape {m.shape}")
    _require_finite(m, name)
    check_symmetric(m, name)
    w, v = np.linalg.eigh(m)
    scale = max(float(w[-1]), 0.0)
    if float(w[0]) < -INDEFINITE_TOL * scale:
        raise IndefiniteMatrix(
            f"{name} has eigenvalue {w[0]:.3e} below -{INDEFINITE_TOL:g} * {scale:.3e}"
        )
    return w, v, scale


def _root(m, name: str, *, inverse: bool, require_invertible: bool) -> np.ndarray:
    w, v, scale = _checked_eigh(m, name)
    if require_invertible:
        lo = max(float(w[0]), 0.0)
        if scale <= 0.0 or lo < SINGULAR_RATIO * scale:
            raise SingularMatrix(
                f"{name} is numerically singular: eigenvalue ratio {lo:.3e} / {scale:.3e}"
            )
    roots = np.sqrt(np.maximum(w, CLAMP_TOL * scale))
    s = (v / roots if inverse else v * roots) @ v.T
    return (s + s.T) / 2.0


def spd_sqrt(m: np.ndarray) -> np.ndarray:
    """Principal square root of a symmetric positive semi-definite matrix.

    Eigenvalues below ``CLAMP_TOL * lambda_max`` (including small negative
    rounding noise) are clamped up to that threshold before taking roots, so
    the result is always symmetric PSD.

    Parameters
    ----------
    m : (d, d) array
        Symmetric PSD matrix.

    Returns
    -------
    (d, d) array
        Symmetric PSD square root S with S @ S close to ``m``.

    Raises
    ------
    NotSymmetric
        If ``m`` is not symmetric within tolerance.
    IndefiniteMatrix
        If an eigenvalue is below ``-1e-6 * lambda_max``.
    """
    return _root(m, "spd_sqrt input", inverse=False, require_invertible=False)


def spd_inv_sqrt(m: np.ndarray) -> np.ndarray:
    """Inverse principal square root of a symmetric positive definite matrix.

    Parameters
    ----------
    m : (d, d) array
        Symmetric positive definite matrix.

    Returns
    -------
    (d, d) array
        Symmetric matrix S with S @ m @ S close to the identity.

    Raises
    ------
    NotSymmetric
        If ``m`` is not symmetric within tolerance.
    IndefiniteMatrix
        If an eigenvalue is below ``-1e-6 * lambda_max``.
    SingularMatrix
        If ``lambda_min / lambda_max`` falls below ``1e-12``.
    """
    return _root(m, "spd_inv_sqrt input", inverse=True, require_invertible=True)


def svd(m: np.ndarray):
    """Thin singular value decomposition ``m = U @ diag(s) @ V.T``.

    Returns ``(U, s, V)`` with orthonormal columns in U and V and singular
    values in descending order. Note the third factor is V itself, not its
    transpose.
    """
    m = np.asarray(m, dtype=np.float64)
    _require_finite(m, "svd input")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return u, s, vh.T


@dataclass(frozen=True)
class MomentEstimate:
    """Sample mean and ridge-regularized covariance of a sample set."""

    mean: np.ndarray
    covariance: np.ndarray
    sample_count: int

    def __post_init__(self):
        object.__setattr__(self, "mean", _readonly(self.mean))
        object.__setattr__(self, "covariance", _readonly(self.covariance))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def estimate_moments(samples: np.ndarray) -> MomentEstimate:
    """Estimate mean and covariance, with a stabilizing diagonal ridge.

    The covariance uses the 1/n divisor (moment plug-in, matching the
    normal approximation) plus ``max(1e-10, 1e-9 * tr / d)`` on the diagonal
    so downstream inverse roots exist even when some coordinate is constant.

    Parameters
    ----------
    samples : (n, d) array
        Rows are observations; a 1-D array is treated as n scalar samples.

    Raises
    ------
    TooFewSamples
        If fewer than two rows are given.
    NonFinite
        If any entry is NaN or infinite.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2:
        raise TooFewSamples(f"expected an (n, d) sample matrix, got shape {x.shape}")
    n, d = x.shape
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples to estimate moments, got {n}")
    _require_finite(x, "samples")
    mean = x.mean(axis=0)
    dev = x - mean
    cov = dev.T @ dev / n
    cov = (cov + cov.T) / 2.0
    ridge = max(RIDGE_FLOOR, RIDGE_SCALE * float(np.trace(cov)) / d)
    cov = cov + ridge * np.eye(d)
    return MomentEstimate(mean, cov, n)
