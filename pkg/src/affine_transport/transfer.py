"""Procrustes-aligned affine transport between transition datasets.

Plain affine transport can only recover maps with a symmetric PSD linear
part, because the Gaussian optimal map always has one. Fitting therefore
runs in two stages: an orthogonal Procrustes alignment absorbs the rotation
between the domains, then affine transport between the rotated source and
the target absorbs the remaining stretch and shift. The composed map is
``x -> A (R x) + b`` with R orthogonal and A symmetric PSD, which covers any
invertible linear relation through its polar factorization.

Both datasets are mean-centered before the Procrustes step; the means
re-enter through the transport offset b.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .data import TransitionDataset, dataset_fingerprint
from .discrete_ot import MAX_EXACT, empirical_w2, pointwise_error
from .errors import (
    DegenerateTarget,
    DimensionMismatch,
    MalformedModel,
    PairingMismatch,
    ShapeMismatch,
    SizeMismatch,
    TooFewSamples,
)
from .gaussian_ot import AffineMap, at_map, normal_approx_bound
from .linalg import _readonly, estimate_moments, svd

__all__ = [
    "FitMeta",
    "TransferModel",
    "TransferReport",
    "procrustes",
    "fit",
    "apply",
    "affinity_score",
    "evaluate",
    "save_model",
    "load_model",
    "MODEL_FORMAT_VERSION",
]

MODEL_FORMAT_VERSION = 1

_ORTHO_TOL = 1e-8
_PSD_TOL = 1e-8


def procrustes(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Orthogonal matrix R minimizing |R @ source - target| in Frobenius norm.

    Inputs are (d, n) matrices whose columns are paired observations. R is
    the product U V^T from the SVD of target @ source^T; reflections are
    allowed, no determinant correction is applied.
    """
    a = np.asarray(source, dtype=np.float64)
    b = np.asarray(target, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"paired matrices must share a shape, got {a.shape} and {b.shape}")
    if a.ndim != 2:
        raise ShapeMismatch(f"expected (d, n) matrices, got shape {a.shape}")
    u, _, v = svd(b @ a.T)
    return u @ v.T


@dataclass(frozen=True)
class FitMeta:
    """Provenance of a fitted model: sample count, seed, dataset fingerprints."""

    n_fit: int
    seed: int | None
    source_hash: str
    target_hash: str


@dataclass(frozen=True)
class TransferModel:
    """Fitted transfer map: rotation followed by affine transport.

    ``rotation`` is orthogonal, ``at`` is the transport map applied after
    it, and ``composed`` collapses both into a single affine map. The
    constructor validates orthogonality of R and symmetry plus positive
    semi-definiteness of the transport matrix, so a tampered model cannot be
    constructed.
    """

    rotation: np.ndarray
    at: AffineMap
    state_dim: int
    action_dim: int
    meta: FitMeta

    def __post_init__(self):
        r = _readonly(np.asarray(self.rotation, dtype=np.float64))
        width = 2 * self.state_dim + self.action_dim
        if r.ndim != 2 or r.shape != (width, width):
            raise MalformedModel(
                f"rotation has shape {r.shape}, expected ({width}, {width})"
            )
        if self.at.matrix.shape != (width, width):
            raise MalformedModel(
                f"transport matrix has shape {self.at.matrix.shape}, expected ({width}, {width})"
            )
        ortho = float(np.abs(r.T @ r - np.eye(width)).max())
        if ortho > _ORTHO_TOL:
            raise MalformedModel(f"rotation is not orthogonal: |R^T R - I| = {ortho:.3e}")
        a = self.at.matrix
        scale = float(np.abs(a).max()) if a.size else 0.0
        asym = float(np.abs(a - a.T).max()) if a.size else 0.0
        if asym > _PSD_TOL * (1.0 + scale):
            raise MalformedModel(f"transport matrix is not symmetric: {asym:.3e}")
        w = np.linalg.eigvalsh((a + a.T) / 2.0)
        if float(w[0]) < -_PSD_TOL * max(float(w[-1]), 0.0):
            raise MalformedModel(
                f"transport matrix has negative eigenvalue {w[0]:.3e}"
            )
        object.__setattr__(self, "rotation", r)

    @property
    def dim(self) -> int:
        return 2 * self.state_dim + self.action_dim

    @cached_property
    def composed(self) -> AffineMap:
        """Single affine map equal to applying the rotation then the transport."""
        return AffineMap(self.at.matrix @ self.rotation, self.at.offset)


def fit(source: TransitionDataset, target: TransitionDataset) -> TransferModel:
    """Fit a transfer map from paired source and target transition datasets.

    Rows with the same index must come from the same (state, action) pair.
    The Procrustes rotation is estimated on mean-centered rows, then affine
    transport is fitted from the rotated source to the target.
    """
    if (source.state_dim, source.action_dim) != (target.state_dim, target.action_dim):
        raise DimensionMismatch(
            f"source dims ({source.state_dim}, {source.action_dim}) differ from "
            f"target dims ({target.state_dim}, {target.action_dim})"
        )
    if source.n != target.n:
        raise PairingMismatch(
            f"paired datasets must have equal row counts, got {source.n} and {target.n}"
        )
    if source.n < 2:
        raise TooFewSamples(f"need at least 2 paired rows to fit, got {source.n}")
    xs = source.rows
    xt = target.rows
    cs = xs - xs.mean(axis=0)
    ct = xt - xt.mean(axis=0)
    r = procrustes(cs.T, ct.T)
    at = at_map(xs @ r.T, xt)
    meta = FitMeta(
        n_fit=source.n,
        seed=source.seed,
        source_hash=dataset_fingerprint(source),
        target_hash=dataset_fingerprint(target),
    )
    return TransferModel(r, at, source.state_dim, source.action_dim, meta)


def apply(model: TransferModel, triplets: np.ndarray) -> np.ndarray:
    """Map source triplet rows into the target domain."""
    x = np.asarray(triplets, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != model.dim:
        raise DimensionMismatch(
            f"triplets have width {x.shape[-1]}, model expects {model.dim}"
        )
    return model.composed.apply(x)


def affinity_score(transported: np.ndarray, target: np.ndarray) -> float:
    """Affinity between a transported sample set and the target set.

    One minus the exact empirical W2 between the sets, normalized by the
    worst-case budget sqrt(2 tr Sigma(target)); clamped to [0, 1]. Close to
    one means the domains are nearly affinely related.
    """
    t = np.asarray(transported, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64)
    if t.ndim == 1:
        t = t.reshape(-1, 1)
    if y.ndim == 1:
        y = y.reshape(-1, 1)
    if t.shape != y.shape:
        raise SizeMismatch(f"shapes differ: {t.shape} vs {y.shape}")
    centered = y - y.mean(axis=0)
    if not np.any(centered):
        raise DegenerateTarget("target samples are all identical; the score is undefined")
    w2, _ = empirical_w2(t, y)
    bound = normal_approx_bound(estimate_moments(y).covariance)
    return min(1.0, max(0.0, 1.0 - w2 / bound))


@dataclass(frozen=True)
class TransferReport:
    """Evaluation of a fitted model on a paired dataset.

    Errors are mean and population std of per-row next-state prediction
    error; the W2 values are exact empirical distances between full triplet
    sets before and after transport. ``eval_on_fit_data`` records whether
    the evaluation datasets are byte-identical to the ones the model was
    fitted on, so in-sample and held-out numbers are never confused.
    """

    error_before: tuple[float, float]
    error_after: tuple[float, float]
    w2_before: float
    w2_after: float
    rho_aff: float
    bound_value: float
    n_fit: int
    n_eval: int
    eval_on_fit_data: bool
    procrustes_centering: str = "centered"


def evaluate(
    model: TransferModel, source: TransitionDataset, target: TransitionDataset
) -> TransferReport:
    """Evaluate a fitted model on paired source and target datasets."""
    if (source.state_dim, source.action_dim) != (target.state_dim, target.action_dim):
        raise DimensionMismatch(
            f"source dims ({source.state_dim}, {source.action_dim}) differ from "
            f"target dims ({target.state_dim}, {target.action_dim})"
        )
    if source.width != model.dim:
        raise DimensionMismatch(
            f"datasets have width {source.width}, model expects {model.dim}"
        )
    if source.n != target.n:
        raise PairingMismatch(
            f"paired datasets must have equal row counts, got {source.n} and {target.n}"
        )
    transported = apply(model, source.rows)
    sd = model.state_dim
    before = pointwise_error(source.next_states, target.next_states)
    after = pointwise_error(transported[:, -sd:], target.next_states)
    w2_before, _ = empirical_w2(source.rows, target.rows)
    w2_after, _ = empirical_w2(transported, target.rows)
    bound = normal_approx_bound(estimate_moments(target.rows).covariance)
    if bound <= 0.0:
        raise DegenerateTarget("target rows have zero total variance")
    rho = min(1.0, max(0.0, 1.0 - w2_after / bound))
    on_fit = (
        dataset_fingerprint(source) == model.meta.source_hash
        and dataset_fingerprint(target) == model.meta.target_hash
    )
    return TransferReport(
        error_before=(before[0], before[1]),
        error_after=(after[0], after[1]),
        w2_before=w2_before,
        w2_after=w2_after,
        rho_aff=rho,
        bound_value=bound,
        n_fit=model.meta.n_fit,
        n_eval=source.n,
        eval_on_fit_data=on_fit,
    )


def save_model(model: TransferModel, path) -> None:
    """Serialize a model to a JSON text file.

    Floats are written in shortest exact decimal form, so loading recovers
    every entry bit for bit.
    """
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "dim": model.dim,
        "state_dim": model.state_dim,
        "action_dim": model.action_dim,
        "R": [float(v) for v in model.rotation.ravel()],
        "A": [float(v) for v in model.at.matrix.ravel()],
        "b": [float(v) for v in model.at.offset],
        "meta": {
            "n_fit": model.meta.n_fit,
            "seed": model.meta.seed,
            "source_hash": model.meta.source_hash,
            "target_hash": model.meta.target_hash,
        },
    }
    Path(path).write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )


def _model_field(doc: dict, name: str):
    if name not in doc:
        raise MalformedModel(f"model file is missing field {name!r}")
    return doc[name]


def load_model(path) -> TransferModel:
    """Load a model saved by save_model, validating structure and invariants."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedModel(f"model file {path} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise MalformedModel(f"model file {path} must hold a JSON object")
    version = _model_field(doc, "version")
    if version != MODEL_FORMAT_VERSION:
        raise MalformedModel(
            f"unsupported model format version {version!r}, expected {MODEL_FORMAT_VERSION}"
        )
    try:
        dim = int(_model_field(doc, "dim"))
        state_dim = int(_model_field(doc, "state_dim"))
        action_dim = int(_model_field(doc, "action_dim"))
    except (TypeError, ValueError):
        raise MalformedModel("model dimensions must be integers")
    if dim != 2 * state_dim + action_dim:
        raise MalformedModel(
            f"dim {dim} does not equal 2*state_dim+action_dim = {2 * state_dim + action_dim}"
        )
    arrays = {}
    for name, size in (("R", dim * dim), ("A", dim * dim), ("b", dim)):
        raw = _model_field(doc, name)
        try:
            arr = np.asarray([float(v) for v in raw], dtype=np.float64)
        except (TypeError, ValueError):
            raise MalformedModel(f"field {name!r} must be a flat list of numbers")
        if arr.shape != (size,):
            raise MalformedModel(f"field {name!r} has {arr.shape[0]} entries, expected {size}")
        if not np.all(np.isfinite(arr)):
            raise MalformedModel(f"field {name!r} contains non-finite entries")
        arrays[name] = arr
    meta_doc = _model_field(doc, "meta")
    if not isinstance(meta_doc, dict):
        raise MalformedModel("field 'meta' must be an object")
    try:
        meta = FitMeta(
            n_fit=int(meta_doc["n_fit"]),
            seed=None if meta_doc.get("seed") is None else int(meta_doc["seed"]),
            source_hash=str(meta_doc["source_hash"]),
            target_hash=str(meta_doc["target_hash"]),
        )
    except (KeyError, TypeError, ValueError):
        raise MalformedModel("model meta must carry n_fit, seed, source_hash, target_hash")
    rotation = arrays["R"].reshape(dim, dim)
    at = AffineMap(arrays["A"].reshape(dim, dim), arrays["b"])
    return TransferModel(rotation, at, state_dim, action_dim, meta)
