"""Command-line surface: fit, tune, synth, smooth, and serve.

All commands read a JSON run config, write machine-readable artifacts,
and print a one-object JSON summary to stdout.  Failures print an error
object and exit 2 for configuration problems or 3 for numerical ones.
The only environment variable honored is LIQUIDCARD_LOG_LEVEL.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Mapping

import click
import numpy as np

from .data import DataError, Dataset
from .fitting import DegenerateClassesError, DivergenceError, FitContext
from .legacy import StepCardError, StepScorecard, smooth_step_scorecard
from .qp import QpError
from .scorecard import (
    DomainError,
    FittedModel,
    ModelSpec,
    SpecError,
    characteristic_curve,
)
from .spline_basis import KnotError
from .synth import SynthConfig, SynthError, generate
from .tuning import default_lambda2_grid, greedy_tune

SCHEMA_VERSION = 1

CONFIG_EXIT = 2
NUMERICAL_EXIT = 3

_CONFIG_ERRORS = (SpecError, DataError, SynthError, StepCardError, KnotError, DomainError)
_NUMERICAL_ERRORS = (QpError, DegenerateClassesError, DivergenceError)

logger = logging.getLogger("liquidcard")


def _setup_logging() -> None:
    level = os.environ.get("LIQUIDCARD_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)


def _emit(doc: Mapping[str, Any]) -> None:
    click.echo(json.dumps(doc, sort_keys=True))


def _fail(code: str, message: str, exit_code: int) -> None:
    _emit({"error": {"code": code, "message": message}})
    sys.exit(exit_code)


def _load_json(path: str) -> dict[str, Any]:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise SpecError(f"cannot read config {path}: {err}") from err


def _parse_lambda2(pairs: tuple[str, ...]) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise SpecError(f"--lambda2 expects NAME=VALUE, got {pair!r}")
        try:
            out[name] = float(value)
        except ValueError as err:
            raise SpecError(f"--lambda2 {name}: {value!r} is not a number") from err
    return out


def _parse_grid(text: str | None) -> tuple[float, ...] | None:
    if text is None:
        return None
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as err:
        raise SpecError(f"--grid expects comma-separated numbers: {err}") from err


def _split_from_config(config: Mapping[str, Any], data: Dataset, seed: int | None) -> tuple[Dataset, Dataset, int, float]:
    split = config.get("split", {})
    val_fraction = float(split.get("val_fraction", 0.25))
    use_seed = int(split.get("seed", 0)) if seed is None else seed
    dev, val = data.split(val_fraction, use_seed)
    return dev, val, use_seed, val_fraction


def _load_run(config_path: str, data_path: str | None, seed: int | None):
    config = _load_json(config_path)
    if "model" not in config:
        raise SpecError("config needs a 'model' document")
    spec = ModelSpec.from_dict(config["model"])
    path = data_path or config.get("data")
    if not path:
        raise SpecError("no dataset: pass --data or set 'data' in the config")
    data = Dataset.from_csv(path)
    dev, val, use_seed, val_fraction = _split_from_config(config, data, seed)
    return spec, dev, val, use_seed, val_fraction


def _write_curves(fitted: FittedModel, out_dir: Path) -> dict[str, str]:
    curve_dir = out_dir / "curves"
    curve_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, str] = {}
    for char in fitted.spec:
        if char.liquid_knots is None:
            continue
        xs, cs = characteristic_curve(fitted, char.name, n=200)
        lines = []
        if char.xscale == "log1p":
            lines.append("x,x_log1p,cs")
            for x, c in zip(xs, cs):
                lines.append(f"{float(x)!r},{float(np.log1p(x))!r},{float(c)!r}")
        else:
            lines.append("x,cs")
            for x, c in zip(xs, cs):
                lines.append(f"{float(x)!r},{float(c)!r}")
        path = curve_dir / f"{char.name}.csv"
        path.write_text("\n".join(lines) + "\n")
        paths[char.name] = str(path)
    return paths


@click.group()
def main() -> None:
    """Liquid scorecard fitting, tuning, and smoothing."""
    _setup_logging()


@main.command()
@click.option("--config", "config_path", required=True, help="Run config JSON (model, split, data).")
@click.option("--data", "data_path", default=None, help="Dataset CSV; overrides the config's path.")
@click.option("--out", "out_dir", default=".", help="Output directory for model and curve files.")
@click.option("--seed", type=int, default=None, help="Split seed; overrides the config.")
@click.option("--lambda2", "lambda2_pairs", multiple=True, help="NAME=VALUE smoothness override (repeatable).")
def fit(config_path: str, data_path: str | None, out_dir: str, seed: int | None, lambda2_pairs: tuple[str, ...]) -> None:
    """Fit the model and emit model JSON, curve CSVs, and a summary."""
    try:
        spec, dev, val, use_seed, val_fraction = _load_run(config_path, data_path, seed)
        overrides = _parse_lambda2(lambda2_pairs)
        spec = spec.with_lambda2(overrides) if overrides else spec
    except _CONFIG_ERRORS as err:
        _fail("CONFIG", str(err), CONFIG_EXIT)
        return
    try:
        ctx = FitContext.build(spec, dev, val)
        fitted, _ = ctx.fit()
    except _CONFIG_ERRORS as err:
        _fail("CONFIG", str(err), CONFIG_EXIT)
        return
    except _NUMERICAL_ERRORS as err:
        _fail("NUMERICAL", str(err), NUMERICAL_EXIT)
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model_path = out / "model.json"
    model_path.write_text(json.dumps(fitted.to_dict(), sort_keys=True, indent=2) + "\n")
    curves = _write_curves(fitted, out)
    _emit(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "fit",
            "dev_divergence": fitted.dev_divergence,
            "val_divergence": fitted.val_divergence,
            "lambda2": fitted.lambda2,
            "n_dev": dev.n,
            "n_val": val.n,
            "seed": use_seed,
            "val_fraction": val_fraction,
            "model_path": str(model_path),
            "curves": curves,
        }
    )


@main.command()
@click.option("--config", "config_path", required=True, help="Run config JSON (model, split, data).")
@click.option("--data", "data_path", default=None, help="Dataset CSV; overrides the config's path.")
@click.option("--out", "out_dir", default=".", help="Output directory for the tune report.")
@click.option("--seed", type=int, default=None, help="Split seed; overrides the config.")
@click.option("--grid", "grid_text", default=None, help="Comma-separated lambda2 grid; default is 0 plus half-decades to 1e10.")
def tune(config_path: str, data_path: str | None, out_dir: str, seed: int | None, grid_text: str | None) -> None:
    """Greedy per-characteristic smoothness tuning; writes a report JSON."""
    try:
        spec, dev, val, use_seed, _ = _load_run(config_path, data_path, seed)
        grid = _parse_grid(grid_text)
    except _CONFIG_ERRORS as err:
        _fail("CONFIG", str(err), CONFIG_EXIT)
        return
    try:
        report = greedy_tune(spec, dev, val, grid=grid)
    except _NUMERICAL_ERRORS as err:
        _fail("NUMERICAL", str(err), NUMERICAL_EXIT)
        return
    except RuntimeError as err:
        _fail("NUMERICAL", str(err), NUMERICAL_EXIT)
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "tune_report.json"
    report_path.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n")
    _emit(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "tune",
            "baseline_val_divergence": report.baseline_val_divergence,
            "final_val_divergence": report.final_val_divergence,
            "chosen_lambda2": report.chosen_lambda2,
            "seed": use_seed,
            "report_path": str(report_path),
        }
    )


@main.command()
@click.option("--config", "config_path", required=True, help="Generator config JSON.")
@click.option("--out", "out_path", required=True, help="Output CSV path; truth JSON lands beside it.")
@click.option("--seed", type=int, default=None, help="Generator seed; overrides the config.")
def synth(config_path: str, out_path: str, seed: int | None) -> None:
    """Generate synthetic data with known log-odds curves."""
    try:
        doc = _load_json(config_path)
        if seed is not None:
            doc["seed"] = seed
        config = SynthConfig.from_dict(doc)
    except _CONFIG_ERRORS as err:
        _fail("CONFIG", str(err), CONFIG_EXIT)
        return
    dataset, truth = generate(config)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    dataset.to_csv(out)
    truth_path = out.with_suffix(out.suffix + ".truth.json")
    truth_path.write_text(json.dumps(truth, sort_keys=True, indent=2) + "\n")
    _emit(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "synth",
            "rows": dataset.n,
            "good_rate": float(dataset.outcomes.mean()),
            "data_path": str(out),
            "truth_path": str(truth_path),
        }
    )


@main.command()
@click.option("--config", "config_path", required=True, help="Config JSON with 'card', optional 'lambda2', 'patterns', 'lambda'.")
@click.option("--data", "data_path", default=None, help="Development dataset CSV; overrides the config's path.")
@click.option("--out", "out_path", required=True, help="Smoothed scorecard JSON path.")
@click.option("--lambda2", "lambda2_pairs", multiple=True, help="NAME=VALUE smoothness override (repeatable).")
def smooth(config_path: str, data_path: str | None, out_path: str, lambda2_pairs: tuple[str, ...]) -> None:
    """Smooth a traditional step scorecard via penalized spline refits."""
    try:
        config = _load_json(config_path)
        if "card" not in config:
            raise SpecError("config needs a 'card' document")
        card = StepScorecard.from_dict(config["card"])
        path = data_path or config.get("data")
        if not path:
            raise SpecError("no dataset: pass --data or set 'data' in the config")
        data = Dataset.from_csv(path)
        lambda2: dict[str, float] = {c.name: 0.0 for c in card.characteristics}
        lambda2.update({k: float(v) for k, v in config.get("lambda2", {}).items()})
        lambda2.update(_parse_lambda2(lambda2_pairs))
        patterns = {str(k): str(v) for k, v in config.get("patterns", {}).items()}
        ridge = float(config.get("lambda", 1.0))
    except _CONFIG_ERRORS as err:
        _fail("CONFIG", str(err), CONFIG_EXIT)
        return
    try:
        smoothed = smooth_step_scorecard(card, data, lambda2, ridge_lambda=ridge, patterns=patterns)
    except _CONFIG_ERRORS as err:
        _fail("CONFIG", str(err), CONFIG_EXIT)
        return
    except _NUMERICAL_ERRORS as err:
        _fail("NUMERICAL", str(err), NUMERICAL_EXIT)
        return
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(smoothed.to_dict(), sort_keys=True, indent=2) + "\n")
    flagged = sum(b.flagged for c in smoothed.characteristics for b in c.bins)
    _emit(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "smooth",
            "card_path": str(out),
            "flagged_bins": flagged,
        }
    )


@main.command()
@click.option("--host", default="127.0.0.1", help="Bind address.")
@click.option("--port", type=int, default=8000, help="Bind port.")
def serve(host: str, port: int) -> None:
    """Run the interactive tuning service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
