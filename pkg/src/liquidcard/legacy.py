"""Smoothing a traditional step-function scorecard.

A traditional card scores each numeric bin with a constant weight.  To
smooth it, a cubic liquid characteristic is fit over knots placed at the
bin boundaries (penalized by the requested smoothness parameter), and
each bin's weight is replaced by the sample-weighted average of the
fitted curve over the development records falling in that bin.  Bins no
record falls in keep their original weight and are flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Mapping

import numpy as np

from .data import Dataset
from .fitting import FitContext
from .scorecard import CharacteristicSpec, DiscreteAttribute, ModelSpec

SCHEMA_VERSION = 1


class StepCardError(ValueError):
    """Malformed step scorecard."""


@dataclass(frozen=True)
class ScoreBin:
    lo: float
    hi: float
    weight: float
    flagged: bool = False

    def __post_init__(self) -> None:
        for v in (self.lo, self.hi, self.weight):
            if not isinstance(v, (int, float)) or not math.isfinite(float(v)):
                raise StepCardError(f"bin values must be finite numbers, got [{self.lo}, {self.hi}) -> {self.weight}")
        if not self.hi > self.lo:
            raise StepCardError(f"bin [{self.lo}, {self.hi}) is empty or reversed")


@dataclass(frozen=True)
class StepCharacteristic:
    name: str
    column: str
    bins: tuple[ScoreBin, ...]

    def __post_init__(self) -> None:
        if len(self.bins) < 2:
            raise StepCardError(f"{self.name}: need at least 2 bins to smooth")
        for a, b in zip(self.bins, self.bins[1:]):
            if a.hi != b.lo:
                raise StepCardError(f"{self.name}: bins must partition the range contiguously")

    @property
    def edges(self) -> tuple[float, ...]:
        return tuple(b.lo for b in self.bins) + (self.bins[-1].hi,)


@dataclass(frozen=True)
class StepScorecard:
    characteristics: tuple[StepCharacteristic, ...]

    def __post_init__(self) -> None:
        if not self.characteristics:
            raise StepCardError("scorecard needs at least one characteristic")

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "StepScorecard":
        chars = []
        for c in doc["characteristics"]:
            bins = []
            for b in c["bins"]:
                try:
                    lo, hi, w = float(b["lo"]), float(b["hi"]), float(b["weight"])
                except (TypeError, ValueError) as err:
                    raise StepCardError(f"{c.get('name')}: non-numeric bin {b!r}") from err
                bins.append(ScoreBin(lo=lo, hi=hi, weight=w, flagged=bool(b.get("flagged", False))))
            chars.append(
                StepCharacteristic(name=c["name"], column=c.get("column", c["name"]), bins=tuple(bins))
            )
        return cls(characteristics=tuple(chars))

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "characteristics": [
                {
                    "name": c.name,
                    "column": c.column,
                    "bins": [
                        {"lo": b.lo, "hi": b.hi, "weight": b.weight, "flagged": b.flagged}
                        for b in c.bins
                    ],
                }
                for c in self.characteristics
            ],
        }


def _smoothing_spec(
    char: StepCharacteristic,
    x: np.ndarray,
    lambda2: float,
    ridge_lambda: float,
    pattern: str,
) -> ModelSpec:
    """Single-characteristic fit spec with knots at the bin edges.

    Catch-all discrete attributes are added only when records fall
    outside the binned range, so the design stays a partition.
    """
    edges = char.edges
    leading = ()
    trailing = ()
    if np.any(x < edges[0]):
        leading = (DiscreteAttribute(label="below_bins", lo=None, hi=edges[0], hi_open=True),)
    if np.any(x > edges[-1]):
        trailing = (
            DiscreteAttribute(label="above_bins", lo=edges[-1], hi=None, lo_open=True, hi_open=True),
        )
    fit_char = CharacteristicSpec(
        name=char.name,
        column=char.column,
        leading_discrete=leading,
        liquid_knots=edges,
        trailing_discrete=trailing,
        pattern=pattern,
        lambda2=lambda2,
    )
    return ModelSpec(characteristics=(fit_char,), ridge_lambda=ridge_lambda)


def bin_averages(
    edges: np.ndarray,
    x: np.ndarray,
    weights: np.ndarray,
    cs: np.ndarray,
    in_scope: np.ndarray | None = None,
) -> list[tuple[float, bool]]:
    """Sample-weighted average of a curve over each bin.

    Bins are [edge_k, edge_{k+1}) with the last bin closed on the right.
    Returns one (average, empty) pair per bin; empty bins report 0.0 and
    True, and callers decide what to keep there.
    """
    edges = np.asarray(edges, dtype=float)
    scope = np.ones(x.size, dtype=bool) if in_scope is None else in_scope
    out = []
    for k in range(edges.size - 1):
        if k == edges.size - 2:
            mask = scope & (x >= edges[k]) & (x <= edges[k + 1])
        else:
            mask = scope & (x >= edges[k]) & (x < edges[k + 1])
        w = weights[mask]
        total = float(w.sum())
        if total > 0.0:
            out.append((float(w @ cs[mask] / total), False))
        else:
            out.append((0.0, True))
    return out


def smooth_step_scorecard(
    card: StepScorecard,
    data: Dataset,
    lambda2: float | Mapping[str, float],
    *,
    ridge_lambda: float = 1.0,
    patterns: Mapping[str, str] | None = None,
) -> StepScorecard:
    """Re-discretize each characteristic through a penalized spline fit.

    ``lambda2`` may be one value for all characteristics or a map by
    name.  Fits are unconstrained unless ``patterns`` opts a
    characteristic into "ascending" or "descending".
    """
    if data.n == 0:
        raise StepCardError("development data is empty")
    smoothed = []
    for char in card.characteristics:
        if char.column not in data.columns:
            raise StepCardError(f"{char.name}: dataset is missing column {char.column!r}")
        lam2 = float(lambda2[char.name]) if isinstance(lambda2, Mapping) else float(lambda2)
        pattern = (patterns or {}).get(char.name, "none")
        x = data.columns[char.column]
        spec = _smoothing_spec(char, x, lam2, ridge_lambda, pattern)
        ctx = FitContext.build(spec, data)
        fitted, _ = ctx.fit()

        liquid = spec.liquid_segment(char.name)
        design = ctx.x_dev[:, liquid]
        cs = design @ fitted.beta[liquid]
        in_liquid = design.sum(axis=1) > 0.5  # liquid rows; discrete rows are all-zero here

        averages = bin_averages(np.asarray(char.edges), x, data.weights, cs, in_scope=in_liquid)
        new_bins = []
        for b, (avg, empty) in zip(char.bins, averages):
            if empty:
                new_bins.append(replace(b, flagged=True))
            else:
                new_bins.append(replace(b, weight=avg, flagged=False))
        smoothed.append(StepCharacteristic(name=char.name, column=char.column, bins=tuple(new_bins)))
    return StepScorecard(characteristics=tuple(smoothed))
