"""Transition datasets: synthetic generators, CSV I/O, and splits.

A dataset holds n transition triplets (state, action, next state) as rows of
width 2 d + k. Two generator families are provided: randomized linear
dynamics (per-coordinate scaling, sign inversion, disabled action rows) and a
sliding-puck model with per-axis friction and an optional rotation of the
outcome. Both draw from named counter-based random streams so that paired
domains can share states and actions while keeping noise independent.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadFraction,
    BadSpec,
    DimensionMismatch,
    MalformedCsv,
    MissingManifest,
    NonFinite,
)
from .linalg import _readonly

__all__ = [
    "TransitionDataset",
    "DomainSpec",
    "rng_stream",
    "gen_linear",
    "gen_puck",
    "load_csv",
    "save_dataset",
    "split",
    "subset",
    "dataset_fingerprint",
    "manifest_path_for",
]

GRAVITY = 9.81


def rng_stream(seed: int, *tags) -> np.random.Generator:
    """Independent reproducible stream for (seed, tags).

    Streams are Philox counters keyed by the seed plus a hash of each tag, so
    the same (seed, tags) pair always yields the same draws and different
    tags never collide with each other in practice.
    """
    if seed < 0:
        raise BadSpec(f"seed must be non-negative, got {seed}")
    key = tuple(
        int.from_bytes(
            hashlib.blake2s(str(t).encode("utf-8"), digest_size=4).digest(), "big"
        )
        for t in tags
    )
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class TransitionDataset:
    """Rows of (state, action, next state) triplets from one domain."""

    state_dim: int
    action_dim: int
    rows: np.ndarray
    domain_label: str = "domain"
    seed: int | None = None

    def __post_init__(self):
        if self.state_dim < 1 or self.action_dim < 1:
            raise BadSpec(
                f"dimensions must be positive, got state_dim={self.state_dim} "
                f"action_dim={self.action_dim}"
            )
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise DimensionMismatch(f"rows must be 2-D, got shape {rows.shape}")
        if rows.shape[1] != self.width:
            raise DimensionMismatch(
                f"rows have width {rows.shape[1]}, expected "
                f"2*{self.state_dim}+{self.action_dim}={self.width}"
            )
        if not np.all(np.isfinite(rows)):
            raise NonFinite("dataset rows contain NaN or infinite entries")
        object.__setattr__(self, "rows", _readonly(rows))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def width(self) -> int:
        return 2 * self.state_dim + self.action_dim

    @property
    def states(self) -> np.ndarray:
        return self.rows[:, : self.state_dim]

    @property
    def actions(self) -> np.ndarray:
        return self.rows[:, self.state_dim : self.state_dim + self.action_dim]

    @property
    def next_states(self) -> np.ndarray:
        return self.rows[:, self.state_dim + self.action_dim :]


@dataclass(frozen=True)
class DomainSpec:
    """Parameters of one synthetic domain.

    ``kind`` selects the generator. Linear domains take base dynamics and
    control matrices plus a randomization descriptor (per-coordinate scale
    factors, inverted rows, disabled action rows; a coordinate listed in both
    index sets is treated as disabled only). Puck domains take per-axis
    friction, an outcome rotation angle, and gravity.
    """

    kind: str
    label: str = "domain"
    noise_std: float = 0.0
    # linear domains
    dynamics: np.ndarray | None = None
    controls: np.ndarray | None = None
    scales: np.ndarray | None = None
    inverted: tuple[int, ...] = ()
    disabled: tuple[int, ...] = ()
    # puck domains
    friction_x: float = 0.1
    friction_y: float = 0.1
    curl: float = 0.0
    gravity: float = GRAVITY

    def __post_init__(self):
        if self.kind not in ("linear", "puck"):
            raise BadSpec(f"unknown domain kind {self.kind!r}")
        if not self.noise_std >= 0.0:
            raise BadSpec(f"noise_std must be >= 0, got {self.noise_std!r}")
        for field in ("dynamics", "controls", "scales"):
            value = getattr(self, field)
            if value is not None:
                object.__setattr__(self, field, _readonly(np.asarray(value, dtype=np.float64)))
        object.__setattr__(self, "inverted", tuple(int(i) for i in self.inverted))
        object.__setattr__(self, "disabled", tuple(int(i) for i in self.disabled))

    @classmethod
    def from_dict(cls, doc: dict, kind: str | None = None) -> "DomainSpec":
        """Build a spec from a plain dict, e.g. one section of a spec file."""
        if not isinstance(doc, dict):
            raise BadSpec(f"domain spec must be a mapping, got {type(doc).__name__}")
        doc = dict(doc)
        if "friction" in doc:
            fr = doc.pop("friction")
            try:
                doc["friction_x"], doc["friction_y"] = (float(fr[0]), float(fr[1]))
            except (TypeError, ValueError, IndexError):
                raise BadSpec(f"friction must be a pair of numbers, got {fr!r}")
        if kind is not None:
            doc.setdefault("kind", kind)
        allowed = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - allowed
        if unknown:
            raise BadSpec(f"unknown domain spec fields: {sorted(unknown)}")
        if "kind" not in doc:
            raise BadSpec("domain spec is missing 'kind'")
        return cls(**doc)


def gen_linear(spec: DomainSpec, actions: np.ndarray, seed: int) -> TransitionDataset:
    """Sample transitions of a randomized linear system.

    States are standard normal; the next state is ``M' s + B' a`` plus
    optional isotropic noise, where M' applies the per-coordinate scale
    factors and row inversions to the base dynamics and B' zeroes the
    disabled rows of the base controls. Reusing the same seed and action
    matrix across domain specs reuses the same (state, action) pairs, with
    noise drawn from a stream keyed by the domain label.
    """
    if spec.kind != "linear":
        raise BadSpec(f"gen_linear requires kind='linear', got {spec.kind!r}")
    if spec.dynamics is None or spec.controls is None:
        raise BadSpec("linear domain spec needs 'dynamics' and 'controls' matrices")
    m = spec.dynamics
    b = spec.controls
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadSpec(f"dynamics must be square, got shape {m.shape}")
    d = m.shape[0]
    if b.ndim != 2 or b.shape[0] != d:
        raise BadSpec(f"controls must have {d} rows, got shape {b.shape}")
    k = b.shape[1]
    a = np.asarray(actions, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != k:
        raise BadSpec(f"actions must be (n, {k}), got shape {a.shape}")
    scales = spec.scales if spec.scales is not None else np.ones(d)
    if scales.shape != (d,):
        raise BadSpec(f"scales must have length {d}, got shape {scales.shape}")
    if not np.all(scales > 0.0):
        raise BadSpec("scale factors must be strictly positive")
    for name, idx in (("inverted", spec.inverted), ("disabled", spec.disabled)):
        if any(i < 0 or i >= d for i in idx):
            raise BadSpec(f"{name} indices out of range for dimension {d}: {idx}")
    n = a.shape[0]
    states = rng_stream(seed, "states").standard_normal((n, d))
    mp = scales[:, None] * m
    flip = sorted(set(spec.inverted) - set(spec.disabled))
    if flip:
        mp[flip, :] *= -1.0
    bp = b.copy()
    if spec.disabled:
        bp[sorted(set(spec.disabled)), :] = 0.0
    nxt = states @ mp.T + a @ bp.T
    if spec.noise_std > 0.0:
        nxt = nxt + spec.noise_std * rng_stream(seed, "noise", spec.label).standard_normal((n, d))
    rows = np.hstack([states, a, nxt])
    return TransitionDataset(d, k, rows, spec.label, seed)


def gen_puck(spec: DomainSpec, actions: np.ndarray, seed: int) -> TransitionDataset:
    """Sample sliding-puck transitions.

    The puck starts at the origin (the constant start state is kept as the
    leading zero block so rows keep the standard triplet width). The action
    is the launch velocity; each axis slides ``sign(v) v^2 / (2 mu g)`` under
    its own friction coefficient, and the resulting rest position is rotated
    by the curl angle, plus optional isotropic noise.
    """
    if spec.kind != "puck":
        raise BadSpec(f"gen_puck requires kind='puck', got {spec.kind!r}")
    if not (spec.friction_x > 0.0 and spec.friction_y > 0.0):
        raise BadSpec(
            f"friction must be strictly positive, got ({spec.friction_x!r}, {spec.friction_y!r})"
        )
    if not spec.gravity > 0.0:
        raise BadSpec(f"gravity must be strictly positive, got {spec.gravity!r}")
    v = np.asarray(actions, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 2:
        raise BadSpec(f"puck actions must be (n, 2) launch velocities, got shape {v.shape}")
    n = v.shape[0]
    mu = np.array([spec.friction_x, spec.friction_y])
    disp = np.sign(v) * v**2 / (2.0 * mu * spec.gravity)
    c, s = math.cos(spec.curl), math.sin(spec.curl)
    rot = np.array([[c, -s], [s, c]])
    final = disp @ rot.T
    if spec.noise_std > 0.0:
        final = final + spec.noise_std * rng_stream(seed, "noise", spec.label).standard_normal((n, 2))
    rows = np.hstack([np.zeros((n, 2)), v, final])
    return TransitionDataset(2, 2, rows, spec.label, seed)


def manifest_path_for(csv_path) -> Path:
    """Manifest file that accompanies a dataset CSV: same stem, .manifest.json."""
    return Path(csv_path).with_suffix(".manifest.json")


def save_dataset(ds: TransitionDataset, csv_path) -> Path:
    """Write a dataset CSV plus its manifest; returns the manifest path.

    Floats are written with shortest exact decimal form, LF line endings, no
    quoting, so rewriting the same dataset is byte identical.
    """
    csv_path = Path(csv_path)
    header = _header(ds.state_dim, ds.action_dim)
    lines = [",".join(header)]
    for row in ds.rows:
        lines.append(",".join(repr(float(v)) for v in row))
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    manifest = {
        "state_dim": ds.state_dim,
        "action_dim": ds.action_dim,
        "domain_label": ds.domain_label,
        "seed": ds.seed,
    }
    mp = manifest_path_for(csv_path)
    mp.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )
    return mp


def _header(d: int, k: int) -> list[str]:
    return (
        [f"s{i}" for i in range(d)]
        + [f"a{i}" for i in range(k)]
        + [f"ns{i}" for i in range(d)]
    )


def load_csv(csv_path, manifest_path=None) -> TransitionDataset:
    """Load a dataset CSV and its manifest.

    The manifest defaults to ``<stem>.manifest.json`` next to the CSV and
    must exist. Cell errors are reported with their 1-based data row index;
    NaN and infinite cells are rejected.
    """
    csv_path = Path(csv_path)
    mp = Path(manifest_path) if manifest_path is not None else manifest_path_for(csv_path)
    if not mp.exists():
        raise MissingManifest(f"no manifest found for {csv_path}: expected {mp}")
    try:
        manifest = json.loads(mp.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedCsv(f"manifest {mp} is not valid JSON: {exc}")
    try:
        d = int(manifest["state_dim"])
        k = int(manifest["action_dim"])
    except (KeyError, TypeError, ValueError):
        raise MalformedCsv(f"manifest {mp} must carry integer state_dim and action_dim")
    label = str(manifest.get("domain_label", "domain"))
    seed = manifest.get("seed")
    if seed is not None:
        seed = int(seed)

    text = csv_path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedCsv(f"{csv_path} is empty")
    expected = _header(d, k)
    got = lines[0].split(",")
    if got != expected:
        raise MalformedCsv(
            f"{csv_path} header {lines[0]!r} does not match expected {','.join(expected)!r}"
        )
    width = len(expected)
    rows = np.empty((len(lines) - 1, width))
    for i, line in enumerate(lines[1:], start=1):
        cells = line.split(",")
        if len(cells) != width:
            raise MalformedCsv(
                f"{csv_path} data row {i} has {len(cells)} columns, expected {width}"
            )
        for j, cell in enumerate(cells):
            try:
                value = float(cell)
            except ValueError:
                raise MalformedCsv(
                    f"{csv_path} data row {i}, column {expected[j]}: "
                    f"cannot parse {cell!r} as a number"
                )
            if not math.isfinite(value):
                raise MalformedCsv(
                    f"{csv_path} data row {i}, column {expected[j]}: "
                    f"non-finite value {cell!r}"
                )
            rows[i - 1, j] = value
    return TransitionDataset(d, k, rows, label, seed)


def subset(ds: TransitionDataset, indices) -> TransitionDataset:
    """Dataset restricted to the given row indices, in the given order."""
    idx = np.asarray(indices, dtype=np.intp)
    return dataclasses.replace(ds, rows=ds.rows[idx])


def split(ds: TransitionDataset, fractions, seed: int):
    """Disjoint (train, test) row partition by a seeded shuffle.

    The permutation depends only on the seed and row count, so applying the
    same split to a paired dataset keeps rows aligned.
    """
    try:
        f = tuple(float(v) for v in fractions)
    except (TypeError, ValueError):
        raise BadFraction(f"fractions must be two numbers, got {fractions!r}")
    if len(f) != 2 or any(v < 0.0 for v in f) or abs(sum(f) - 1.0) > 1e-9:
        raise BadFraction(f"fractions must be non-negative and sum to 1, got {f}")
    perm = rng_stream(seed, "split").permutation(ds.n)
    n_train = int(round(f[0] * ds.n))
    return subset(ds, perm[:n_train]), subset(ds, perm[n_train:])


def dataset_fingerprint(ds: TransitionDataset) -> str:
    """Content hash of the dataset rows and dimensions."""
    h = hashlib.sha256()
    h.update(f"{ds.state_dim},{ds.action_dim},{ds.n};".encode("ascii"))
    h.update(np.ascontiguousarray(ds.rows).tobytes())
    return h.hexdigest()
