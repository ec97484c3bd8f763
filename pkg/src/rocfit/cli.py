"""Command-line interface.

Subcommands: ``fit``, ``gof``, ``compare``, ``band``, ``pav``, ``plot``.
Inputs are two-column CSV files (``score,label``, optional header).
Outputs are JSON (results), CSV (curve coordinates, bands, replicate
distances), and SVG (figures); all randomized commands record their
seed in the output so runs can be reproduced byte for byte.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from ._svg import SvgCanvas
from .empirical import (
    LabeledSample,
    concave_hull,
    empirical_roc,
    pav_calibrate,
)
from .errors import DataError, NumericalError
from .fitting import FitConfig, fit_mde, fit_result_to_dict
from .inference import (
    auc_equality_test,
    auc_inference,
    confidence_band,
    covariance_from_fit,
    curve_equality_test,
    gof_test,
)
from .models import RocModel, auc_descriptor, is_concave, model_auc, roc_eval
from .numerics import RandomStream

__all__ = ["parse_dataset", "build_parser", "run", "main"]

ENV_OUTPUT_DIR = "ROCFIT_OUTPUT_DIR"

_FAMILY_BY_FLAG = {
    "binormal": "binormal",
    "beta": "beta2",
    "beta-gamma": "beta3_gamma",
    "beta-delta": "beta3_delta",
    "beta4": "beta4",
}


# ---------------------------------------------------------------------------
# Dataset ingestion
# ---------------------------------------------------------------------------

def parse_dataset(path: str | Path) -> LabeledSample:
    """Read a ``score,label`` CSV into a labeled sample.

    A non-numeric first row is treated as a header.  Any malformed row
    (wrong column count, non-numeric score, label outside {0, 1}) is a
    hard error naming the 1-based line number.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as err:
        raise DataError(f"cannot read {path}: {err}") from err
    rows = [(i + 1, line.strip()) for i, line in enumerate(lines) if line.strip()]
    if not rows:
        raise DataError(f"{path}: file is empty")
    first_fields = rows[0][1].split(",")
    start = 0
    if len(first_fields) >= 1:
        try:
            float(first_fields[0])
        except ValueError:
            start = 1  # header row
    if start == len(rows):
        raise DataError(f"{path}: no data rows after the header")
    scores, labels = [], []
    for lineno, line in rows[start:]:
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 2:
            raise DataError(f"{path}:{lineno}: expected 2 columns, got {len(fields)}")
        try:
            score = float(fields[0])
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric score {fields[0]!r}") from None
        try:
            label = int(fields[1])
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer label {fields[1]!r}") from None
        if label not in (0, 1):
            raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {label}")
        scores.append(score)
        labels.append(label)
    return LabeledSample(scores=np.asarray(scores), labels=np.asarray(labels, dtype=np.int64))


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _out_dir(args) -> Path:
    out = args.out_dir or os.environ.get(ENV_OUTPUT_DIR) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _fit_config(args) -> FitConfig:
    return FitConfig(
        family=_FAMILY_BY_FLAG[args.family],
        constraint=args.constraint,
    )


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _curve_grid(curve) -> np.ndarray:
    """201 evenly spaced p-values merged with the empirical breakpoints."""
    return np.union1d(np.linspace(0.0, 1.0, 201), curve.breakpoints)


def _fit_payload(fit, sample, path: Path) -> dict:
    payload = fit_result_to_dict(fit)
    payload.update(
        {
            "input": path.name,
            "n0": sample.n0,
            "n1": sample.n1,
            "auc": model_auc(fit.model),
            "auc_descriptor": auc_descriptor(model_auc(fit.model)),
            "is_concave": is_concave(fit.model),
        }
    )
    return payload


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_fit(args) -> int:
    path = Path(args.input)
    sample = parse_dataset(path)
    curve = empirical_roc(sample)
    fit = fit_mde(curve, _fit_config(args))
    out = _out_dir(args)
    _write_json(out / f"{path.stem}.fit.json", _fit_payload(fit, sample, path))
    grid = _curve_grid(curve)
    _write_csv(
        out / f"{path.stem}.curve.csv",
        ["p", "empirical", "fitted"],
        [grid, curve.eval_many(grid), roc_eval(fit.model, grid)],
    )
    return 0


def _cmd_gof(args) -> int:
    path = Path(args.input)
    sample = parse_dataset(path)
    config = _fit_config(args)
    rng = RandomStream(args.seed)
    result = gof_test(sample, config, args.M, rng, n_jobs=args.jobs)
    out = _out_dir(args)
    payload = result.to_dict()
    replicates = payload.pop("replicates", None)
    payload.update(
        {
            "input": path.name,
            "family": config.family,
            "constraint": config.constraint,
            "M": args.M,
            "seed": args.seed,
        }
    )
    _write_json(out / f"{path.stem}.gof.json", payload)
    if args.dump_replicates and replicates is not None:
        _write_csv(
            out / f"{path.stem}.gof-replicates.csv",
            ["replicate", "distance"],
            [np.arange(1, len(replicates) + 1, dtype=float), np.asarray(replicates)],
        )
    return 0


def _cmd_compare(args) -> int:
    path_a, path_b = Path(args.input_a), Path(args.input_b)
    config = _fit_config(args)
    results = {}
    fits, covs = [], []
    for path in (path_a, path_b):
        sample = parse_dataset(path)
        curve = empirical_roc(sample)
        fit = fit_mde(curve, config)
        cov = covariance_from_fit(fit, sample.n0, sample.n1)
        auc, se = auc_inference(fit.model, cov)
        fits.append(fit)
        covs.append(cov)
        results[path.name] = {
            "theta": list(fit.theta),
            "fit": fit.distance,
            "auc": auc,
            "auc_se": se,
        }
    curve_test = curve_equality_test(fits[0], covs[0], fits[1], covs[1])
    auc_test = auc_equality_test(fits[0], covs[0], fits[1], covs[1])
    payload = {
        "family": config.family,
        "constraint": config.constraint,
        "samples": results,
        "curve_equality": curve_test.to_dict(),
        "auc_equality": auc_test.to_dict(),
    }
    out = _out_dir(args)
    _write_json(out / f"{path_a.stem}_vs_{path_b.stem}.compare.json", payload)
    return 0


def _cmd_band(args) -> int:
    path = Path(args.input)
    sample = parse_dataset(path)
    curve = empirical_roc(sample)
    config = _fit_config(args)
    fit = fit_mde(curve, config)
    cov = covariance_from_fit(fit, sample.n0, sample.n1)
    rng = RandomStream(args.seed)
    grid = _curve_grid(curve)
    lo, hi = confidence_band(fit.model, cov, grid, args.level, args.draws, rng)
    out = _out_dir(args)
    fitted = roc_eval(fit.model, grid)
    _write_csv(
        out / f"{path.stem}.band.csv",
        ["p", "lower", "fitted", "upper"],
        [grid, lo, fitted, hi],
    )
    canvas = SvgCanvas(title=f"{path.stem}: fit with {args.level:.0%} band")
    band_x = np.concatenate([grid, grid[::-1]])
    band_y = np.concatenate([hi, lo[::-1]])
    canvas.polygon(band_x, band_y)
    canvas.polyline(grid, curve.eval_many(grid), color="black", width=1.2)
    canvas.polyline(grid, fitted, color="#d62728", width=1.8, dashed=True)
    (out / f"{path.stem}.band.svg").write_text(canvas.render())
    meta = _fit_payload(fit, sample, path)
    meta.update({"seed": args.seed, "level": args.level, "draws": args.draws})
    _write_json(out / f"{path.stem}.band.json", meta)
    return 0


def _cmd_pav(args) -> int:
    path = Path(args.input)
    sample = parse_dataset(path)
    pav = pav_calibrate(sample)
    hull = concave_hull(empirical_roc(sample))
    out = _out_dir(args)
    lines = ["threshold,cep,cep_exact"]
    for x, v in zip(pav.thresholds, pav.values):
        lines.append(f"{float(x)!r},{float(v)!r},{v}")
    (out / f"{path.stem}.pav.csv").write_text("\n".join(lines) + "\n")
    lines = ["far,hr,far_exact,hr_exact"]
    for a, b in hull.vertices:
        lines.append(f"{float(a)!r},{float(b)!r},{a},{b}")
    (out / f"{path.stem}.hull.csv").write_text("\n".join(lines) + "\n")
    return 0


def _read_curve_csv(path: Path) -> dict[str, np.ndarray]:
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return {name: data[:, j] for j, name in enumerate(header)}


def _cmd_plot(args) -> int:
    path = Path(args.input)
    out = _out_dir(args)
    if path.suffixes[-2:] == [".band", ".csv"]:
        cols = _read_curve_csv(path)
        canvas = SvgCanvas(title=path.stem)
        band_x = np.concatenate([cols["p"], cols["p"][::-1]])
        band_y = np.concatenate([cols["upper"], cols["lower"][::-1]])
        canvas.polygon(band_x, band_y)
        canvas.polyline(cols["p"], cols["fitted"], color="#d62728", width=1.8)
        (out / f"{path.stem}.svg").write_text(canvas.render())
        return 0
    if path.suffix != ".json":
        raise DataError(f"{path}: plot expects a .fit.json, .band.json, or .band.csv input")
    payload = json.loads(path.read_text())
    model = RocModel(payload["family"], tuple(payload["theta"]))
    curve_csv = Path(args.curve) if args.curve else path.with_name(
        path.name.replace(".fit.json", ".curve.csv").replace(".band.json", ".curve.csv")
    )
    canvas = SvgCanvas(title=path.stem)
    if curve_csv.exists():
        cols = _read_curve_csv(curve_csv)
        grid = cols["p"]
        canvas.polyline(grid, cols["empirical"], color="black", width=1.2)
    else:
        grid = np.linspace(0.0, 1.0, 201)
    fitted = roc_eval(model, grid)
    canvas.polyline(grid, fitted, color="#d62728", width=1.8, dashed=True)
    (out / f"{path.stem}.svg").write_text(canvas.render())
    return 0


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rocfit",
        description="ROC curve fitting and inference",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_family=True):
        p.add_argument("--out-dir", default=None,
                       help=f"output directory (default: ${ENV_OUTPUT_DIR} or .)")
        if with_family:
            p.add_argument("--family", default="beta",
                           choices=sorted(_FAMILY_BY_FLAG),
                           help="model family (default: beta)")
            p.add_argument("--constraint", default="unrestricted",
                           choices=["unrestricted", "concave"],
                           help="constraint mode (default: unrestricted)")

    p = sub.add_parser("fit", help="fit a parametric model to a dataset")
    p.add_argument("input", help="score,label CSV file")
    add_common(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("gof", help="Monte Carlo goodness-of-fit test")
    p.add_argument("input")
    add_common(p)
    p.add_argument("--M", type=int, default=999, help="Monte Carlo replicates (default 999)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    p.add_argument("--dump-replicates", action="store_true",
                   help="also write the replicate distances as CSV")
    p.set_defaults(func=_cmd_gof)

    p = sub.add_parser("compare", help="equality tests for two independent datasets")
    p.add_argument("input_a")
    p.add_argument("input_b")
    add_common(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("band", help="pointwise confidence band around a fit")
    p.add_argument("input")
    add_common(p)
    p.add_argument("--level", type=float, default=0.95, help="band level (default 0.95)")
    p.add_argument("--draws", type=int, default=2000, help="parameter draws (default 2000)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.set_defaults(func=_cmd_band)

    p = sub.add_parser("pav", help="PAV calibration and concave hull")
    p.add_argument("input")
    add_common(p, with_family=False)
    p.set_defaults(func=_cmd_pav)

    p = sub.add_parser("plot", help="render saved results to SVG")
    p.add_argument("input", help=".fit.json, .band.json, or .band.csv to render")
    p.add_argument("--curve", default=None, help="companion curve CSV (default: sibling)")
    add_common(p, with_family=False)
    p.set_defaults(func=_cmd_plot)

    return parser


def run(args: argparse.Namespace) -> int:
    """Dispatch a parsed command; maps failures to exit codes."""
    try:
        return args.func(args)
    except ValueError as err:  # DataError and other validation failures
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
