"""Command line front end.

Subcommands: synth (write a paired synthetic dataset), fit (fit a transfer
model from paired CSVs), eval (evaluate a model on paired CSVs),
learning-curve (error versus fit size), score (affinity between two
domains). Exit codes: 0 success, 1 usage, 2 I/O, 3 pairing, 4 dimension,
5 configuration. Log verbosity comes from the AT_LOG_LEVEL environment
variable (error, warn, info, debug).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import (
    DomainSpec,
    TransitionDataset,
    gen_linear,
    gen_puck,
    load_csv,
    rng_stream,
    save_dataset,
    split,
    subset,
)
from .errors import (
    AffineTransportError,
    BadSpec,
    DimensionMismatch,
    MalformedCsv,
    MalformedModel,
    MissingManifest,
    PairingMismatch,
    ShapeMismatch,
    SizeMismatch,
)
from .gaussian_ot import at_map
from .discrete_ot import MAX_EXACT
from .transfer import affinity_score, apply, evaluate, fit, load_model, save_model

__all__ = ["RunConfig", "LearningCurvePoint", "main", "build_parser"]

log = logging.getLogger("affine_transport.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_PAIRING = 3
EXIT_DIMENSION = 4
EXIT_CONFIG = 5

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Global flags shared by every subcommand."""

    seed: int
    out: str | None
    fmt: str


@dataclass(frozen=True)
class LearningCurvePoint:
    """Held-out error statistics for one fit size."""

    n_fit: int
    mean_error: float
    std_error: float
    repeats: int


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = _nonneg_int(text)
    if value == 0:
        raise argparse.ArgumentTypeError("expected a positive integer, got 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_nonneg_int, default=0, help="random seed (default 0)")
    common.add_argument("--out", default=None, help="output path (directory for synth)")
    common.add_argument(
        "--format",
        dest="fmt",
        choices=("csv", "json"),
        default="json",
        help="report format (default json)",
    )

    parser = _Parser(
        prog="affine-transport",
        description="Affine transport transfer maps between transition datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser(
        "synth", parents=[common], help="generate a paired source/target dataset"
    )
    synth.add_argument("--spec", default=None, help="JSON pair spec file")
    synth.add_argument("--kind", choices=("linear", "puck"), default=None)
    synth.add_argument("--n", type=_positive_int, default=None, help="rows per domain")
    synth.add_argument("--source-label", default="source")
    synth.add_argument("--target-label", default="target")
    synth.add_argument("--noise", type=float, default=0.0, help="noise std for both domains")
    synth.add_argument("--source-noise", type=float, default=None)
    synth.add_argument("--target-noise", type=float, default=None)
    synth.add_argument("--source-friction", default=None, help="puck: MU_X,MU_Y (default 0.1,0.1)")
    synth.add_argument("--target-friction", default=None, help="puck: MU_X,MU_Y (default 0.1,0.4)")
    synth.add_argument("--source-curl", type=float, default=0.0)
    synth.add_argument("--target-curl", type=float, default=0.0)
    synth.add_argument("--state-dim", type=_positive_int, default=3, help="linear only")
    synth.add_argument("--action-dim", type=_positive_int, default=2, help="linear only")
    synth.add_argument("--source-scales", default=None, help="linear: comma separated floats")
    synth.add_argument("--target-scales", default=None)
    synth.add_argument("--source-invert", default=None, help="linear: comma separated indices")
    synth.add_argument("--target-invert", default=None)
    synth.add_argument("--source-disable", default=None)
    synth.add_argument("--target-disable", default=None)
    synth.set_defaults(func=cmd_synth)

    fit_p = sub.add_parser("fit", parents=[common], help="fit a transfer model")
    fit_p.add_argument("--source", required=True, help="source CSV")
    fit_p.add_argument("--target", required=True, help="target CSV")
    fit_p.set_defaults(func=cmd_fit)

    eval_p = sub.add_parser("eval", parents=[common], help="evaluate a fitted model")
    eval_p.add_argument("--model", required=True, help="model file from fit")
    eval_p.add_argument("--source", required=True)
    eval_p.add_argument("--target", required=True)
    eval_p.set_defaults(func=cmd_eval)

    curve = sub.add_parser(
        "learning-curve", parents=[common], help="held-out error versus fit size"
    )
    curve.add_argument("--source", required=True)
    curve.add_argument("--target", required=True)
    curve.add_argument("--sizes", default="8,32,128,512", help="comma separated fit sizes")
    curve.add_argument("--repeats", type=int, default=20)
    curve.add_argument(
        "--holdout-fraction",
        type=float,
        default=0.25,
        help="fraction of rows held out for evaluation (default 0.25)",
    )
    curve.set_defaults(func=cmd_learning_curve)

    score = sub.add_parser(
        "score", parents=[common], help="affinity score between two domains"
    )
    score.add_argument("--source", required=True)
    score.add_argument("--target", required=True)
    score.set_defaults(func=cmd_score)

    return parser


def _configure_logging() -> None:
    name = os.environ.get("AT_LOG_LEVEL", "warn").strip().lower()
    level = _LOG_LEVELS.get(name, logging.WARNING)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    logging.getLogger("affine_transport").setLevel(level)


def _config(args) -> RunConfig:
    return RunConfig(seed=args.seed, out=args.out, fmt=args.fmt)


def _require_out(cfg: RunConfig) -> str:
    if not cfg.out:
        raise UsageError("--out is required for this command")
    return cfg.out


def _float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise UsageError(f"{flag} expects comma separated numbers, got {text!r}")


def _int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise UsageError(f"{flag} expects comma separated integers, got {text!r}")


def _float_pair(text: str, flag: str) -> tuple[float, float]:
    values = _float_list(text, flag)
    if len(values) != 2:
        raise UsageError(f"{flag} expects exactly two numbers, got {text!r}")
    return values[0], values[1]


def _default_dynamics(seed: int, d: int, k: int):
    m = rng_stream(seed, "dynamics").standard_normal((d, d)) / np.sqrt(d)
    b = rng_stream(seed, "controls").standard_normal((d, k)) / np.sqrt(k)
    return m, b


_PAIR_SPEC_KEYS = {
    "kind",
    "n",
    "state_dim",
    "action_dim",
    "dynamics",
    "controls",
    "source",
    "target",
}


def _pair_from_spec_file(args):
    text = Path(args.spec).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadSpec(f"spec file {args.spec} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise BadSpec(f"spec file {args.spec} must hold a JSON object")
    unknown = set(doc) - _PAIR_SPEC_KEYS
    if unknown:
        raise BadSpec(f"unknown spec file fields: {sorted(unknown)}")
    kind = doc.get("kind")
    if kind not in ("linear", "puck"):
        raise BadSpec(f"spec file must set kind to 'linear' or 'puck', got {kind!r}")
    n = args.n if args.n is not None else doc.get("n")
    if n is None:
        raise BadSpec("sample count is missing: set 'n' in the spec file or pass --n")
    n = int(n)
    if n < 1:
        raise BadSpec(f"sample count must be positive, got {n}")
    if kind == "puck":
        source = DomainSpec.from_dict({"label": "source", **doc.get("source", {})}, kind=kind)
        target = DomainSpec.from_dict({"label": "target", **doc.get("target", {})}, kind=kind)
        return n, 2, source, target
    d = int(doc.get("state_dim", 3))
    k = int(doc.get("action_dim", 2))
    if d < 1 or k < 1:
        raise BadSpec(f"state_dim and action_dim must be positive, got {d} and {k}")
    default_m, default_b = _default_dynamics(args.seed, d, k)
    m = np.asarray(doc["dynamics"], dtype=np.float64) if "dynamics" in doc else default_m
    b = np.asarray(doc["controls"], dtype=np.float64) if "controls" in doc else default_b
    base = {"kind": kind, "dynamics": m, "controls": b}
    source = DomainSpec.from_dict({**base, "label": "source", **doc.get("source", {})})
    target = DomainSpec.from_dict({**base, "label": "target", **doc.get("target", {})})
    return n, k, source, target


def _pair_from_flags(args):
    if args.kind is None:
        raise UsageError("synth needs --kind (or a --spec file)")
    if args.n is None:
        raise UsageError("synth needs --n (or a --spec file with 'n')")
    noise_s = args.source_noise if args.source_noise is not None else args.noise
    noise_t = args.target_noise if args.target_noise is not None else args.noise
    if args.kind == "puck":
        fs = _float_pair(args.source_friction or "0.1,0.1", "--source-friction")
        ft = _float_pair(args.target_friction or "0.1,0.4", "--target-friction")
        source = DomainSpec(
            kind="puck",
            label=args.source_label,
            noise_std=noise_s,
            friction_x=fs[0],
            friction_y=fs[1],
            curl=args.source_curl,
        )
        target = DomainSpec(
            kind="puck",
            label=args.target_label,
            noise_std=noise_t,
            friction_x=ft[0],
            friction_y=ft[1],
            curl=args.target_curl,
        )
        return args.n, 2, source, target
    d, k = args.state_dim, args.action_dim
    m, b = _default_dynamics(args.seed, d, k)

    def domain(label, noise, scales, invert, disable, side):
        return DomainSpec(
            kind="linear",
            label=label,
            noise_std=noise,
            dynamics=m,
            controls=b,
            scales=np.asarray(_float_list(scales, f"--{side}-scales")) if scales else None,
            inverted=tuple(_int_list(invert, f"--{side}-invert")) if invert else (),
            disabled=tuple(_int_list(disable, f"--{side}-disable")) if disable else (),
        )

    source = domain(
        args.source_label, noise_s, args.source_scales, args.source_invert,
        args.source_disable, "source",
    )
    target = domain(
        args.target_label, noise_t, args.target_scales, args.target_invert,
        args.target_disable, "target",
    )
    return args.n, k, source, target


def cmd_synth(args) -> int:
    cfg = _config(args)
    out = Path(_require_out(cfg))
    if not out.is_dir():
        raise OSError(f"output directory does not exist: {out}")
    if args.spec is not None:
        n, k, source_spec, target_spec = _pair_from_spec_file(args)
    else:
        n, k, source_spec, target_spec = _pair_from_flags(args)
    actions = rng_stream(cfg.seed, "actions").standard_normal((n, k))
    generate = gen_puck if source_spec.kind == "puck" else gen_linear
    src = generate(source_spec, actions, cfg.seed)
    tgt = generate(target_spec, actions, cfg.seed)
    save_dataset(src, out / "source.csv")
    save_dataset(tgt, out / "target.csv")
    log.info("wrote %s and %s", out / "source.csv", out / "target.csv")
    print(
        f"synth: kind={source_spec.kind} n={n} state_dim={src.state_dim} "
        f"action_dim={src.action_dim} out={out}"
    )
    return EXIT_OK


def _load_pair(source_path, target_path):
    return load_csv(source_path), load_csv(target_path)


def cmd_fit(args) -> int:
    cfg = _config(args)
    out = _require_out(cfg)
    src, tgt = _load_pair(args.source, args.target)
    model = fit(src, tgt)
    save_model(model, out)
    log.info("wrote model to %s", out)
    frob = float(np.linalg.norm(model.composed.matrix))
    if src.n <= MAX_EXACT:
        rho = repr(affinity_score(apply(model, src.rows), tgt.rows))
    else:
        rho = "n/a"
    print(
        f"fit: n={model.meta.n_fit} dim={model.dim} state_dim={model.state_dim} "
        f"action_dim={model.action_dim} frob_A={frob!r} rho_aff={rho}"
    )
    return EXIT_OK


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_rows(path, fieldnames, rows, fmt) -> None:
    path = Path(path)
    if fmt == "csv":
        lines = [",".join(fieldnames)]
        for row in rows:
            lines.append(",".join(_format_cell(row[name]) for name in fieldnames))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    else:
        payload = rows[0] if len(rows) == 1 else rows
        path.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
            newline="\n",
        )


_REPORT_FIELDS = [
    "error_before_mean",
    "error_before_std",
    "error_after_mean",
    "error_after_std",
    "w2_before",
    "w2_after",
    "rho_aff",
    "bound_value",
    "n_fit",
    "n_eval",
    "eval_on_fit_data",
    "procrustes_centering",
]


def _report_row(report) -> dict:
    return {
        "error_before_mean": report.error_before[0],
        "error_before_std": report.error_before[1],
        "error_after_mean": report.error_after[0],
        "error_after_std": report.error_after[1],
        "w2_before": report.w2_before,
        "w2_after": report.w2_after,
        "rho_aff": report.rho_aff,
        "bound_value": report.bound_value,
        "n_fit": report.n_fit,
        "n_eval": report.n_eval,
        "eval_on_fit_data": report.eval_on_fit_data,
        "procrustes_centering": report.procrustes_centering,
    }


def cmd_eval(args) -> int:
    cfg = _config(args)
    out = _require_out(cfg)
    model = load_model(args.model)
    src, tgt = _load_pair(args.source, args.target)
    report = evaluate(model, src, tgt)
    _write_rows(out, _REPORT_FIELDS, [_report_row(report)], cfg.fmt)
    log.info("wrote report to %s", out)
    print(
        f"eval: n_eval={report.n_eval} error_before={report.error_before[0]!r} "
        f"error_after={report.error_after[0]!r} rho_aff={report.rho_aff!r}"
    )
    return EXIT_OK


def cmd_learning_curve(args) -> int:
    cfg = _config(args)
    out = _require_out(cfg)
    if args.repeats < 1:
        raise UsageError(f"--repeats must be at least 1, got {args.repeats}")
    sizes = _int_list(args.sizes, "--sizes")
    if not sizes or any(s < 2 for s in sizes):
        raise UsageError(f"--sizes needs fit sizes of at least 2, got {args.sizes!r}")
    if not 0.0 < args.holdout_fraction < 1.0:
        raise UsageError(
            f"--holdout-fraction must be in (0, 1), got {args.holdout_fraction}"
        )
    src, tgt = _load_pair(args.source, args.target)
    if src.n != tgt.n:
        raise PairingMismatch(
            f"paired datasets must have equal row counts, got {src.n} and {tgt.n}"
        )
    fractions = (1.0 - args.holdout_fraction, args.holdout_fraction)
    pool_s, hold_s = split(src, fractions, cfg.seed)
    pool_t, hold_t = split(tgt, fractions, cfg.seed)
    for size in sizes:
        if size > pool_s.n:
            raise BadSpec(
                f"fit size {size} exceeds the {pool_s.n} rows available after holdout"
            )
    points = []
    for size in sizes:
        errors = np.empty(args.repeats)
        for rep in range(args.repeats):
            idx = np.sort(
                rng_stream(cfg.seed, "curve", size, rep).choice(
                    pool_s.n, size=size, replace=False
                )
            )
            model = fit(subset(pool_s, idx), subset(pool_t, idx))
            errors[rep] = evaluate(model, hold_s, hold_t).error_after[0]
        points.append(
            LearningCurvePoint(size, float(errors.mean()), float(errors.std()), args.repeats)
        )
    rows = [dataclasses.asdict(p) for p in points]
    _write_rows(out, ["n_fit", "mean_error", "std_error", "repeats"], rows, cfg.fmt)
    log.info("wrote learning curve to %s", out)
    for p in points:
        print(
            f"learning-curve: n_fit={p.n_fit} mean_error={p.mean_error!r} "
            f"std_error={p.std_error!r} repeats={p.repeats}"
        )
    return EXIT_OK


def cmd_score(args) -> int:
    cfg = _config(args)
    src, tgt = _load_pair(args.source, args.target)
    if src.n != tgt.n:
        raise PairingMismatch(
            f"paired datasets must have equal row counts, got {src.n} and {tgt.n}"
        )
    transport = at_map(src.rows, tgt.rows)
    rho = affinity_score(transport.apply(src.rows), tgt.rows)
    print(f"rho_aff={rho!r} n={src.n}")
    if cfg.out:
        _write_rows(cfg.out, ["rho_aff", "n"], [{"rho_aff": rho, "n": src.n}], cfg.fmt)
    return EXIT_OK


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, (OSError, MalformedCsv, MissingManifest, MalformedModel)):
        return EXIT_IO
    if isinstance(exc, (PairingMismatch, SizeMismatch)):
        return EXIT_PAIRING
    if isinstance(exc, (DimensionMismatch, ShapeMismatch)):
        return EXIT_DIMENSION
    return EXIT_CONFIG


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    _configure_logging()
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AffineTransportError, OSError) as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return _exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
