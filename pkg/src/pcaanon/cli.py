"""Command-line front end.

Subcommands: anonymize, metrics, image-study, fit-eigen, serve-mos.
Exit codes separate failure families so pipelines can react: 2 for
configuration problems, 3 for bad input data, 4 for numerical failures.
Errors are also emitted as one JSON object on stderr.  All batch
commands are deterministic: identical inputs, flags and seed produce
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import __version__
from .dataset import Dataset, load_csv, write_csv
from .errors import ConfigError, DataError, NumericError, PcaAnonError
from .imaging import (
    PSNR_INFINITE,
    dataset_to_image,
    eigen_decay,
    fit_sigmoid,
    image_pca_remove,
    load_image,
    mse,
    psnr,
    shuffle_rows,
    ssim,
    write_image,
)
from .metrics import DEFAULT_RIDGE, UtilityPolicy, evaluate
from .mos import serve_mos
from .pca import anonymize

log = logging.getLogger(__name__)

EMIT_CHOICES = ("report_json", "history_csv", "image_pgm")
_HISTORY_COLUMNS = ("norm_sum", "norm_l1", "norm_frobenius",
                    "correlation", "kl")


def _json_value(value):
    """Floats pass through; the PSNR infinity sentinel becomes "inf"."""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def _dump_json(payload, path=None) -> str:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _load_policy(path) -> UtilityPolicy:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read policy file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"policy file {path} is not valid JSON: "
                          f"{exc}") from exc
    return UtilityPolicy.from_json_dict(obj)


def _load_dataset(path, has_header: bool) -> Dataset:
    try:
        return load_csv(path, has_header=has_header)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _report_history_entry(k: int, report) -> dict:
    entry = report.to_json_dict()
    entry["k"] = k
    return entry


def cmd_anonymize(args) -> int:
    policy = _load_policy(args.policy)
    emit = set(args.emit.split(",")) if args.emit else {"report_json"}
    unknown = emit - set(EMIT_CHOICES)
    if unknown:
        raise ConfigError(f"unknown emit targets {sorted(unknown)}; "
                          f"choose from {EMIT_CHOICES}")
    data = _load_dataset(args.input, not args.no_header)
    log.info("loaded %d rows x %d columns from %s",
             data.n_rows, data.n_cols, args.input)

    result = anonymize(data, policy, max_k=args.max_k, ridge=args.ridge)
    write_csv(result.anonymized, args.output)
    log.info("removed %d components (%s)", result.components_removed,
             result.stopped_reason.value)

    out = Path(args.output)
    if "report_json" in emit:
        summary = {
            "input": str(args.input),
            "output": str(args.output),
            "seed": args.seed,
            "ridge": args.ridge,
            "max_k": args.max_k,
            "policy": policy.to_json_dict(),
            "components_removed": result.components_removed,
            "stopped_reason": result.stopped_reason.value,
            "history": [_report_history_entry(k, rep)
                        for k, rep in result.history],
        }
        _dump_json(summary, out.with_suffix(out.suffix + ".report.json"))
    if "history_csv" in emit:
        _write_history_csv(result.history,
                           out.with_suffix(out.suffix + ".history.csv"))
    if "image_pgm" in emit:
        image, _ = dataset_to_image(result.anonymized,
                                    scaling=args.scaling.replace("-", "_"))
        write_image(image, out.with_suffix(out.suffix + ".pgm"))
    return 0


def _write_history_csv(history, path) -> None:
    lines = ["k,passed," + ",".join(_HISTORY_COLUMNS)]
    for k, report in history:
        cells = [str(k), "true" if report.passed else "false"]
        for metric in _HISTORY_COLUMNS:
            value = report.value_of(metric)
            cells.append("" if value is None else repr(float(value)))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_metrics(args) -> int:
    policy = _load_policy(args.policy)
    a = _load_dataset(args.a, not args.no_header)
    b = _load_dataset(args.b, not args.no_header)
    report = evaluate(a, b, policy, ridge=args.ridge)
    sys.stdout.write(_dump_json(report.to_json_dict()))
    return 0


def cmd_image_study(args) -> int:
    ks = _parse_ks(args.ks)
    img = load_image(args.input)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)

    reference = shuffle_rows(img, args.seed) if args.shuffle else img
    write_image(reference, out_dir / "reference.pgm")

    images = {"reference": "reference.pgm"}
    pairs = []
    quality = []
    for k in ks:
        removed = image_pca_remove(reference, k)
        name = f"k{k}"
        write_image(removed, out_dir / f"{name}.pgm")
        images[name] = f"{name}.pgm"
        pairs.append({"id": f"pair-{name}", "reference": "reference",
                      "test": name, "k": k})
        quality.append({
            "k": k,
            "mse": mse(reference, removed),
            "psnr": _json_value(psnr(reference, removed)),
            "ssim": ssim(reference, removed),
        })
        log.info("k=%d: mse=%s psnr=%s ssim=%s", k, quality[-1]["mse"],
                 quality[-1]["psnr"], quality[-1]["ssim"])

    count = min(args.eigen_count, reference.pixels.shape[1])
    decay = eigen_decay(reference, count)
    fit = fit_sigmoid([(i + 1, v) for i, v in enumerate(decay)])

    study = {
        "source": str(args.input),
        "seed": args.seed,
        "shuffled": bool(args.shuffle),
        "quality": quality,
        "eigen_decay": [float(v) for v in decay],
        "sigmoid_fit": fit.to_json_dict(),
        "session": {
            "id": f"study-{Path(args.input).stem}",
            "pairs": pairs,
            "images": images,
        },
    }
    text = _dump_json(study, out_dir / "study.json")
    sys.stdout.write(text)
    return 0


def _parse_ks(text: str):
    try:
        ks = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigError(f"--ks must be comma-separated integers, "
                          f"got {text!r}") from None
    if not ks:
        raise ConfigError("--ks names no removal counts")
    if any(k < 0 for k in ks):
        raise ConfigError("--ks entries must be non-negative")
    return ks


def cmd_fit_eigen(args) -> int:
    points = _read_eigen_csv(args.input)
    fit = fit_sigmoid(points)
    sys.stdout.write(_dump_json(fit.to_json_dict()))
    return 0


def _read_eigen_csv(path):
    """Read "order,eigenvalue" rows; a non-numeric first row is a header."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            rows = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    points = []
    for i, row in enumerate(rows):
        cells = row.split(",")
        if len(cells) != 2:
            raise DataError(f"{path} row {i + 1}: expected 2 cells, "
                            f"got {len(cells)}")
        try:
            points.append((float(cells[0]), float(cells[1])))
        except ValueError:
            if i == 0:
                continue  # header row
            raise DataError(f"{path} row {i + 1}: cannot parse "
                            f"{row!r}") from None
    return points


def cmd_serve_mos(args) -> int:
    serve_mos(args.input, port=args.port, ui_dir=args.ui)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcaanon",
        description="Utility-aware anonymization by principal component "
                    "removal, with quality metrics and MOS tooling.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("anonymize",
                       help="remove components from a CSV while the "
                            "utility policy passes")
    p.add_argument("--input", required=True, help="true database CSV")
    p.add_argument("--output", required=True, help="anonymized CSV path")
    p.add_argument("--policy", required=True, help="utility policy JSON")
    p.add_argument("--max-k", type=int, default=None, dest="max_k",
                   help="cap on removed components (default: columns - 1)")
    p.add_argument("--ridge", type=float, default=DEFAULT_RIDGE,
                   help="covariance ridge for the KL metric")
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in the report for reproducibility")
    p.add_argument("--scaling", choices=("per-column", "global"),
                   default="per-column",
                   help="pixel scaling for the optional PGM rendering")
    p.add_argument("--emit", default="report_json",
                   help="comma list of report_json,history_csv,image_pgm")
    p.add_argument("--no-header", action="store_true",
                   help="input CSV has no header row")
    p.set_defaults(func=cmd_anonymize)

    p = sub.add_parser("metrics",
                       help="evaluate the utility policy on a CSV pair")
    p.add_argument("a", help="true database CSV")
    p.add_argument("b", help="candidate database CSV")
    p.add_argument("--policy", required=True, help="utility policy JSON")
    p.add_argument("--ridge", type=float, default=DEFAULT_RIDGE)
    p.add_argument("--no-header", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("image-study",
                       help="remove components from a PGM image and "
                            "record quality indices")
    p.add_argument("--input", required=True, help="reference PGM (P5)")
    p.add_argument("--output", required=True, help="study output directory")
    p.add_argument("--ks", required=True,
                   help="comma list of removal counts, e.g. 1,2,5")
    p.add_argument("--seed", type=int, default=0,
                   help="row-shuffle seed (used with --shuffle)")
    p.add_argument("--shuffle", action="store_true",
                   help="shuffle rows first to break vertical correlation")
    p.add_argument("--eigen-count", type=int, default=5, dest="eigen_count",
                   help="dominant eigenvalues to record and fit")
    p.set_defaults(func=cmd_image_study)

    p = sub.add_parser("fit-eigen",
                       help="fit the sigmoid decay curve to an "
                            "order,eigenvalue CSV")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_fit_eigen)

    p = sub.add_parser("serve-mos",
                       help="serve a grading session over HTTP")
    p.add_argument("--input", required=True,
                   help="study directory prepared by image-study")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", default=None,
                   help="directory of static UI files to serve at /")
    p.set_defaults(func=cmd_serve_mos)
    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("PCAANON_LOG", "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PcaAnonError as exc:
        code = _exit_code(exc)
        error = {"error": type(exc).__name__, "message": str(exc),
                 "exit_code": code}
        sys.stderr.write(json.dumps(error, sort_keys=True) + "\n")
        return code


def _exit_code(exc: PcaAnonError) -> int:
    if isinstance(exc, ConfigError):
        return 2
    if isinstance(exc, DataError):
        return 3
    if isinstance(exc, NumericError):
        return 4
    return 4


if __name__ == "__main__":
    sys.exit(main())
