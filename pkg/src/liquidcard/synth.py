"""Synthetic binary-outcome data with planted log-odds curves.

Each characteristic draws values uniformly over a declared range (with
an optional point mass at a sentinel code), contributes a known
log-odds curve, and outcomes are Bernoulli draws from the summed
log-odds plus noise.  The generating curves are returned alongside the
data so fits can be compared against ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from numpy.typing import NDArray

from .data import Dataset
from .spline_basis import basis_matrix, build_t_vector

SCHEMA_VERSION = 1


class SynthError(ValueError):
    """Invalid generator configuration."""


@dataclass(frozen=True)
class TrueCurve:
    """Planted log-odds contribution: piecewise linear or a cubic spline."""

    kind: str
    xs: tuple[float, ...] = ()
    ys: tuple[float, ...] = ()
    knots: tuple[float, ...] = ()
    coeffs: tuple[float, ...] = ()

    def __call__(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        if self.kind == "pwl":
            return np.interp(x, self.xs, self.ys)
        t = build_t_vector(self.knots)
        return basis_matrix(t, 4, x) @ np.asarray(self.coeffs)

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TrueCurve":
        kind = doc.get("type")
        if kind == "pwl":
            points = doc.get("points", ())
            if len(points) < 2:
                raise SynthError("pwl curve needs at least 2 points")
            xs, ys = zip(*((float(a), float(b)) for a, b in points))
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise SynthError("pwl curve x values must be strictly increasing")
            return cls(kind="pwl", xs=xs, ys=ys)
        if kind == "spline":
            knots = tuple(float(k) for k in doc["knots"])
            coeffs = tuple(float(c) for c in doc["coefficients"])
            if len(coeffs) != len(knots) + 2:
                raise SynthError(f"spline curve needs {len(knots) + 2} coefficients for {len(knots)} knots")
            return cls(kind="spline", knots=knots, coeffs=coeffs)
        raise SynthError(f"unknown curve type {kind!r}")

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "pwl":
            return {"type": "pwl", "points": [[a, b] for a, b in zip(self.xs, self.ys)]}
        return {"type": "spline", "knots": list(self.knots), "coefficients": list(self.coeffs)}


@dataclass(frozen=True)
class SentinelMass:
    value: float
    prob: float
    logodds: float


@dataclass(frozen=True)
class SynthCharacteristic:
    name: str
    lo: float
    hi: float
    curve: TrueCurve
    sentinel: SentinelMass | None = None

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "SynthCharacteristic":
        lo, hi = (float(v) for v in doc["range"])
        if not hi > lo:
            raise SynthError(f"{doc.get('name')}: range must be increasing")
        sentinel = None
        if "sentinel" in doc and doc["sentinel"] is not None:
            s = doc["sentinel"]
            prob = float(s.get("prob", 0.0))
            if not 0.0 <= prob < 1.0:
                raise SynthError("sentinel prob must be in [0, 1)")
            sentinel = SentinelMass(
                value=float(s["value"]), prob=prob, logodds=float(s.get("logodds", 0.0))
            )
        return cls(
            name=doc["name"], lo=lo, hi=hi, curve=TrueCurve.from_dict(doc["curve"]), sentinel=sentinel
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "range": [self.lo, self.hi], "curve": self.curve.to_dict()}
        if self.sentinel is not None:
            out["sentinel"] = {
                "value": self.sentinel.value,
                "prob": self.sentinel.prob,
                "logodds": self.sentinel.logodds,
            }
        return out


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    n_rows: int
    characteristics: tuple[SynthCharacteristic, ...]
    base_logodds: float = 0.0
    noise_sd: float = 0.0

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "SynthConfig":
        chars = tuple(SynthCharacteristic.from_dict(c) for c in doc["characteristics"])
        if not chars:
            raise SynthError("generator needs at least one characteristic")
        n_rows = int(doc["n_rows"])
        if n_rows < 2:
            raise SynthError("n_rows must be >= 2")
        noise = float(doc.get("noise_sd", 0.0))
        if noise < 0:
            raise SynthError("noise_sd must be >= 0")
        return cls(
            seed=int(doc.get("seed", 0)),
            n_rows=n_rows,
            characteristics=chars,
            base_logodds=float(doc.get("base_logodds", 0.0)),
            noise_sd=noise,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "n_rows": self.n_rows,
            "base_logodds": self.base_logodds,
            "noise_sd": self.noise_sd,
            "characteristics": [c.to_dict() for c in self.characteristics],
        }


def generate(config: SynthConfig) -> tuple[Dataset, dict[str, Any]]:
    """Draw a dataset and return it with a ground-truth document.

    The truth document records the generator config and each
    characteristic's log-odds curve sampled on a 200-point grid, for
    comparison against fitted curves.
    """
    rng = np.random.default_rng(config.seed)
    n = config.n_rows
    logodds = np.full(n, config.base_logodds)
    columns: dict[str, NDArray[np.float64]] = {}
    truth_curves: dict[str, Any] = {}
    for char in config.characteristics:
        x = rng.uniform(char.lo, char.hi, n)
        contrib = char.curve(x)
        if char.sentinel is not None and char.sentinel.prob > 0.0:
            hit = rng.random(n) < char.sentinel.prob
            x = np.where(hit, char.sentinel.value, x)
            contrib = np.where(hit, char.sentinel.logodds, contrib)
        columns[char.name] = x
        logodds += contrib
        grid = np.linspace(char.lo, char.hi, 200)
        truth_curves[char.name] = {
            "xs": grid.tolist(),
            "logodds": np.asarray(char.curve(grid), dtype=float).tolist(),
        }
    if config.noise_sd > 0.0:
        logodds = logodds + rng.normal(0.0, config.noise_sd, n)
    p_good = 1.0 / (1.0 + np.exp(-logodds))
    outcomes = (rng.random(n) < p_good).astype(int)
    dataset = Dataset(outcomes=outcomes, weights=np.ones(n), columns=columns)
    truth = {"schema_version": SCHEMA_VERSION, "config": config.to_dict(), "curves": truth_curves}
    return dataset, truth
