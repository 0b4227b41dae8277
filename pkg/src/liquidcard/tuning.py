"""Greedy per-characteristic smoothness tuning against validation divergence.

Characteristics are ordered by marginal contribution (validation
divergence lost when the characteristic is dropped and the model refit).
Walking that order, each characteristic's smoothness parameter is swept
over a grid with all others held at their current values, the
validation-divergence maximizer is frozen, and the sweep moves on.  The
full trace of every sweep is kept so a report can be replayed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .data import Dataset
from .fitting import FitContext
from .scorecard import ModelSpec

SCHEMA_VERSION = 1


def default_lambda2_grid() -> tuple[float, ...]:
    """Zero plus half-decade powers of ten from 1 to 1e10."""
    return (0.0,) + tuple(10.0 ** (k / 2.0) for k in range(0, 21))


@dataclass(frozen=True)
class TuneStep:
    characteristic: str
    grid: tuple[tuple[float, float], ...]  # (lambda2, val_divergence) rows
    chosen: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "characteristic": self.characteristic,
            "grid": [{"lambda2": g, "val_divergence": v} for g, v in self.grid],
            "chosen": self.chosen,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TuneStep":
        return cls(
            characteristic=doc["characteristic"],
            grid=tuple((float(r["lambda2"]), float(r["val_divergence"])) for r in doc["grid"]),
            chosen=float(doc["chosen"]),
        )


@dataclass(frozen=True)
class TuneReport:
    ordering: tuple[tuple[str, float], ...]  # (name, marginal contribution), descending
    chosen_lambda2: dict[str, float | None]  # None for characteristics with no liquid range
    trace: tuple[TuneStep, ...]
    final_val_divergence: float
    baseline_val_divergence: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "ordering": [{"name": n, "contribution": c} for n, c in self.ordering],
            "chosen_lambda2": dict(self.chosen_lambda2),
            "trace": [s.to_dict() for s in self.trace],
            "final_val_divergence": self.final_val_divergence,
            "baseline_val_divergence": self.baseline_val_divergence,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TuneReport":
        return cls(
            ordering=tuple((r["name"], float(r["contribution"])) for r in doc["ordering"]),
            chosen_lambda2={
                k: (None if v is None else float(v)) for k, v in doc["chosen_lambda2"].items()
            },
            trace=tuple(TuneStep.from_dict(s) for s in doc["trace"]),
            final_val_divergence=float(doc["final_val_divergence"]),
            baseline_val_divergence=float(doc["baseline_val_divergence"]),
        )


def _val_divergence(ctx: FitContext, lambda2: Mapping[str, float]) -> float:
    fitted, _ = ctx.fit(lambda2=dict(lambda2))
    assert fitted.val_divergence is not None
    return fitted.val_divergence


def marginal_contributions(
    spec: ModelSpec, dev: Dataset, val: Dataset, *, context: FitContext | None = None
) -> list[tuple[str, float]]:
    """Leave-one-out contribution of each characteristic, sorted descending.

    Contribution is the full model's validation divergence minus the
    refit validation divergence with the characteristic removed; a
    single-characteristic model scores against an empty model, whose
    constant score has divergence zero by convention.
    """
    ctx = context if context is not None else FitContext.build(spec, dev, val)
    zeros = {name: 0.0 for name in spec.names if spec[name].liquid_knots is not None}
    full = _val_divergence(ctx, zeros)
    out = []
    for name in spec.names:
        if len(spec.names) == 1:
            without = 0.0
        else:
            reduced = ctx.drop(name)
            reduced_zeros = {k: v for k, v in zeros.items() if k != name}
            try:
                without = _val_divergence(reduced, reduced_zeros)
            except Exception as err:
                raise RuntimeError(f"sub-fit without characteristic {name!r} failed: {err}") from err
        out.append((name, full - without))
    out.sort(key=lambda item: (-item[1], item[0]))
    return out


def greedy_tune(
    spec: ModelSpec,
    dev: Dataset,
    val: Dataset,
    grid: Sequence[float] | None = None,
) -> TuneReport:
    """Tune each liquid characteristic's smoothness greedily.

    Starts from all-zero smoothness, visits characteristics in marginal
    contribution order, and freezes each winner before moving on.  Ties
    on validation divergence go to the larger (smoother) value.
    Characteristics without a liquid range are reported with a null
    parameter and skipped.
    """
    grid_values = tuple(float(g) for g in (default_lambda2_grid() if grid is None else grid))
    if not grid_values:
        raise ValueError("grid must be nonempty")
    if 0.0 not in grid_values:
        raise ValueError("grid must contain 0")
    if any(g < 0 for g in grid_values):
        raise ValueError("grid values must be >= 0")
    grid_values = tuple(sorted(set(grid_values)))

    ctx = FitContext.build(spec, dev, val)
    ordering = marginal_contributions(spec, dev, val, context=ctx)

    current: dict[str, float] = {
        name: 0.0 for name in spec.names if spec[name].liquid_knots is not None
    }
    baseline = _val_divergence(ctx, current)

    chosen: dict[str, float | None] = {name: None for name in spec.names}
    trace: list[TuneStep] = []
    final_val = baseline
    for name, _contribution in ordering:
        if spec[name].liquid_knots is None:
            continue
        rows = []
        best_val, best_lam = -np.inf, 0.0
        prev_sol = None
        for lam2 in grid_values:
            try:
                fitted, sol = ctx.fit(lambda2={**current, name: lam2}, warm=prev_sol)
            except Exception as err:
                raise RuntimeError(
                    f"tuning step for {name!r} failed at lambda2={lam2:g}: {err}"
                ) from err
            prev_sol = sol
            assert fitted.val_divergence is not None
            rows.append((lam2, fitted.val_divergence))
            # scanning ascending, >= prefers the larger value on exact ties
            if fitted.val_divergence >= best_val:
                best_val, best_lam = fitted.val_divergence, lam2
        current[name] = best_lam
        chosen[name] = best_lam
        final_val = best_val
        trace.append(TuneStep(characteristic=name, grid=tuple(rows), chosen=best_lam))

    return TuneReport(
        ordering=tuple(ordering),
        chosen_lambda2=chosen,
        trace=tuple(trace),
        final_val_divergence=final_val,
        baseline_val_divergence=baseline,
    )
