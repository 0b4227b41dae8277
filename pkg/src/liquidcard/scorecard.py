"""Scorecard model specs, design expansion, and fitted-score evaluation.

A characteristic maps a raw numeric column into a segment of the model
design vector: one-hot indicators for discrete attributes (sentinel
codes, capped ranges) around an optional liquid range where the cubic
basis row is used instead.  A model is an ordered list of
characteristics plus the fitting normalization parameters; its total
score is the sum of per-characteristic scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Iterator, Mapping

import numpy as np
from numpy.typing import NDArray

from .spline_basis import basis_matrix, build_t_vector, num_coeffs, validate_knots

PATTERNS = ("ascending", "descending", "none")
XSCALES = ("natural", "log1p")

SCHEMA_VERSION = 1


class SpecError(ValueError):
    """Invalid model or characteristic configuration."""


class DomainError(ValueError):
    """A record value that no attribute or liquid range accounts for."""


class PatternError(ValueError):
    """Pattern constraints requested where they are not defined."""


@dataclass(frozen=True)
class DiscreteAttribute:
    """One discrete attribute: an exact value set or a numeric interval.

    Interval openness is fixed by position in the characteristic:
    leading intervals are [lo, hi), trailing intervals are (lo, hi], and
    the liquid range owns both of its endpoints.  ``None`` bounds mean
    unbounded.
    """

    label: str
    values: tuple[float, ...] | None = None
    lo: float | None = None
    hi: float | None = None
    lo_open: bool = False
    hi_open: bool = True

    def __post_init__(self) -> None:
        if (self.values is None) == (self.lo is None and self.hi is None):
            raise SpecError(f"attribute {self.label!r}: give either values or a range")
        # unbounded sides get canonical openness so equal specs compare equal
        if self.values is None:
            if self.lo is None:
                object.__setattr__(self, "lo_open", True)
            if self.hi is None:
                object.__setattr__(self, "hi_open", True)

    def matches(self, x: NDArray[np.float64]) -> NDArray[np.bool_]:
        if self.values is not None:
            return np.isin(x, np.asarray(self.values, dtype=float))
        lo = -np.inf if self.lo is None else self.lo
        hi = np.inf if self.hi is None else self.hi
        lo_ok = (x > lo) if self.lo_open else (x >= lo)
        hi_ok = (x < hi) if self.hi_open else (x <= hi)
        return lo_ok & hi_ok

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], *, trailing: bool) -> "DiscreteAttribute":
        if "values" in doc:
            values = tuple(float(v) for v in doc["values"])
            label = doc.get("label") or "values_" + "_".join(str(v) for v in values)
            return cls(label=label, values=values)
        if "range" in doc:
            lo, hi = doc["range"]
            lo = None if lo is None else float(lo)
            hi = None if hi is None else float(hi)
            label = doc.get("label") or f"range_{lo}_{hi}"
            return cls(label=label, lo=lo, hi=hi, lo_open=trailing, hi_open=not trailing)
        raise SpecError(f"attribute document needs 'values' or 'range': {dict(doc)!r}")

    def to_dict(self) -> dict[str, Any]:
        if self.values is not None:
            return {"label": self.label, "values": list(self.values)}
        return {"label": self.label, "range": [self.lo, self.hi]}


@dataclass(frozen=True)
class CharacteristicSpec:
    """One scorecard characteristic: discrete attributes around a liquid range."""

    name: str
    column: str
    leading_discrete: tuple[DiscreteAttribute, ...] = ()
    liquid_knots: tuple[float, ...] | None = None
    trailing_discrete: tuple[DiscreteAttribute, ...] = ()
    pattern: str = "none"
    lambda2: float = 0.0
    xscale: str = "natural"

    def __post_init__(self) -> None:
        if self.pattern not in PATTERNS:
            raise SpecError(f"{self.name}: pattern must be one of {PATTERNS}")
        if self.xscale not in XSCALES:
            raise SpecError(f"{self.name}: xscale must be one of {XSCALES}")
        if self.lambda2 < 0:
            raise SpecError(f"{self.name}: lambda2 must be >= 0")
        if self.liquid_knots is not None:
            knots = validate_knots(self.liquid_knots)
            object.__setattr__(self, "liquid_knots", tuple(float(k) for k in knots))
            if self.xscale == "log1p" and knots[0] <= -1.0:
                raise SpecError(f"{self.name}: log1p x-scale needs knots > -1")
        elif self.xscale == "log1p":
            raise SpecError(f"{self.name}: log1p x-scale needs a liquid range")
        if self.liquid_knots is None and not (self.leading_discrete or self.trailing_discrete):
            raise SpecError(f"{self.name}: needs at least one attribute or a liquid range")

    @cached_property
    def t(self) -> NDArray[np.float64]:
        if self.liquid_knots is None:
            raise SpecError(f"{self.name}: no liquid range")
        return build_t_vector(self.liquid_knots)

    @property
    def n_leading(self) -> int:
        return len(self.leading_discrete)

    @property
    def n_trailing(self) -> int:
        return len(self.trailing_discrete)

    @property
    def n_liquid(self) -> int:
        return 0 if self.liquid_knots is None else len(self.liquid_knots) + 2

    @property
    def n_coeffs(self) -> int:
        return self.n_leading + self.n_liquid + self.n_trailing

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "CharacteristicSpec":
        knots = doc.get("liquid_knots")
        return cls(
            name=doc["name"],
            column=doc.get("column", doc["name"]),
            leading_discrete=tuple(
                DiscreteAttribute.from_dict(a, trailing=False) for a in doc.get("leading_discrete", ())
            ),
            liquid_knots=None if knots is None else tuple(float(k) for k in knots),
            trailing_discrete=tuple(
                DiscreteAttribute.from_dict(a, trailing=True) for a in doc.get("trailing_discrete", ())
            ),
            pattern=doc.get("pattern", "none"),
            lambda2=float(doc.get("lambda2", 0.0)),
            xscale=doc.get("xscale", "natural"),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "column": self.column,
            "leading_discrete": [a.to_dict() for a in self.leading_discrete],
            "liquid_knots": None if self.liquid_knots is None else list(self.liquid_knots),
            "trailing_discrete": [a.to_dict() for a in self.trailing_discrete],
            "pattern": self.pattern,
            "lambda2": self.lambda2,
            "xscale": self.xscale,
        }


@dataclass(frozen=True)
class ModelSpec:
    """Ordered characteristics plus fitting normalization parameters.

    ``ridge_lambda`` is the coefficient-norm penalty weight; it must be
    positive in practice because the divergence objective is invariant
    under per-characteristic constant shifts and the ridge is what pins
    them down.  ``delta`` normalizes the class mean difference of the
    fitted score and only sets its scale.
    """

    characteristics: tuple[CharacteristicSpec, ...]
    ridge_lambda: float = 1.0
    delta: float = 1.0

    def __post_init__(self) -> None:
        names = [c.name for c in self.characteristics]
        if len(set(names)) != len(names):
            raise SpecError("characteristic names must be unique")
        if not self.characteristics:
            raise SpecError("model needs at least one characteristic")
        if self.ridge_lambda < 0:
            raise SpecError("ridge lambda must be >= 0")
        if self.delta <= 0:
            raise SpecError("delta must be > 0")

    def __iter__(self) -> Iterator[CharacteristicSpec]:
        return iter(self.characteristics)

    def __getitem__(self, name: str) -> CharacteristicSpec:
        for c in self.characteristics:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.characteristics)

    @property
    def n_coeffs(self) -> int:
        return sum(c.n_coeffs for c in self.characteristics)

    @cached_property
    def offsets(self) -> dict[str, int]:
        out: dict[str, int] = {}
        at = 0
        for c in self.characteristics:
            out[c.name] = at
            at += c.n_coeffs
        return out

    def segment(self, name: str) -> slice:
        off = self.offsets[name]
        return slice(off, off + self[name].n_coeffs)

    def liquid_segment(self, name: str) -> slice:
        char = self[name]
        if char.liquid_knots is None:
            raise SpecError(f"{name}: no liquid range")
        off = self.offsets[name] + char.n_leading
        return slice(off, off + char.n_liquid)

    def drop(self, name: str) -> "ModelSpec":
        kept = tuple(c for c in self.characteristics if c.name != name)
        if len(kept) == len(self.characteristics):
            raise KeyError(name)
        return replace(self, characteristics=kept)

    def with_lambda2(self, overrides: Mapping[str, float]) -> "ModelSpec":
        unknown = set(overrides) - set(self.names)
        if unknown:
            raise SpecError(f"lambda2 overrides for unknown characteristics: {sorted(unknown)}")
        chars = tuple(
            replace(c, lambda2=float(overrides[c.name])) if c.name in overrides else c
            for c in self.characteristics
        )
        return replace(self, characteristics=chars)

    def with_patterns(self, overrides: Mapping[str, str]) -> "ModelSpec":
        unknown = set(overrides) - set(self.names)
        if unknown:
            raise SpecError(f"pattern overrides for unknown characteristics: {sorted(unknown)}")
        chars = tuple(
            replace(c, pattern=overrides[c.name]) if c.name in overrides else c
            for c in self.characteristics
        )
        return replace(self, characteristics=chars)

    @property
    def lambda2_map(self) -> dict[str, float | None]:
        return {c.name: (c.lambda2 if c.liquid_knots is not None else None) for c in self.characteristics}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ModelSpec":
        return cls(
            characteristics=tuple(CharacteristicSpec.from_dict(c) for c in doc["characteristics"]),
            ridge_lambda=float(doc.get("lambda", 1.0)),
            delta=float(doc.get("delta", 1.0)),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "lambda": self.ridge_lambda,
            "delta": self.delta,
            "characteristics": [c.to_dict() for c in self.characteristics],
        }


def _expand_characteristic(char: CharacteristicSpec, x: NDArray[np.float64]) -> NDArray[np.float64]:
    """Expand one column into its design segment, first match wins."""
    seg = np.zeros((x.size, char.n_coeffs))
    remaining = np.ones(x.size, dtype=bool)
    col = 0
    for attr in char.leading_discrete:
        mask = remaining & attr.matches(x)
        seg[mask, col] = 1.0
        remaining &= ~mask
        col += 1
    if char.liquid_knots is not None:
        k = np.asarray(char.liquid_knots)
        mask = remaining & (x >= k[0]) & (x <= k[-1])
        if mask.any():
            seg[np.ix_(mask, np.arange(col, col + char.n_liquid))] = basis_matrix(char.t, 4, x[mask])
        remaining &= ~mask
        col += char.n_liquid
    for attr in char.trailing_discrete:
        mask = remaining & attr.matches(x)
        seg[mask, col] = 1.0
        remaining &= ~mask
        col += 1
    if remaining.any():
        bad = float(x[remaining][0])
        raise DomainError(
            f"characteristic {char.name!r}: value {bad!r} matches no discrete "
            "attribute and is outside the liquid range"
        )
    return seg


def expand_design(spec: ModelSpec, record: Mapping[str, float]) -> NDArray[np.float64]:
    """Expand one raw record into the model design vector (length p)."""
    parts = []
    for char in spec:
        if char.column not in record:
            raise DomainError(f"record is missing column {char.column!r}")
        x = np.asarray([float(record[char.column])])
        parts.append(_expand_characteristic(char, x)[0])
    return np.concatenate(parts)


def expand_dataset(spec: ModelSpec, columns: Mapping[str, NDArray[np.float64]]) -> NDArray[np.float64]:
    """Expand raw columns into the n x p design matrix."""
    parts = []
    n = None
    for char in spec:
        if char.column not in columns:
            raise DomainError(f"dataset is missing column {char.column!r}")
        x = np.asarray(columns[char.column], dtype=float)
        if n is None:
            n = x.size
        parts.append(_expand_characteristic(char, x))
    return np.hstack(parts)


def pattern_constraints(spec: ModelSpec, name: str) -> NDArray[np.float64]:
    """Inequality rows (A beta >= 0) enforcing a characteristic's pattern.

    Ascending patterns require consecutive liquid coefficients to be
    nondecreasing, which is sufficient for a nondecreasing spline
    because the derivative's coefficients are positive multiples of
    those differences.  Descending is the negation.  Returns a
    (rows x p) array; no rows when pattern is "none".
    """
    char = spec[name]
    if char.pattern == "none":
        return np.zeros((0, spec.n_coeffs))
    if char.liquid_knots is None:
        raise PatternError(f"{name}: pattern {char.pattern!r} needs a liquid range")
    q = char.n_liquid
    rows = np.zeros((q - 1, spec.n_coeffs))
    off = spec.offsets[name] + char.n_leading
    idx = np.arange(q - 1)
    rows[idx, off + idx] = -1.0
    rows[idx, off + idx + 1] = 1.0
    if char.pattern == "descending":
        rows = -rows
    return rows


def all_pattern_constraints(spec: ModelSpec) -> NDArray[np.float64]:
    """Stacked pattern rows over every constrained characteristic."""
    rows = [pattern_constraints(spec, c.name) for c in spec if c.pattern != "none"]
    if not rows:
        return np.zeros((0, spec.n_coeffs))
    return np.vstack(rows)


@dataclass(frozen=True)
class FittedModel:
    """A solved coefficient vector with its divergence statistics."""

    spec: ModelSpec
    beta: NDArray[np.float64]
    lambda2: dict[str, float | None] = field(default_factory=dict)
    dev_divergence: float = float("nan")
    val_divergence: float | None = None

    def characteristic_beta(self, name: str) -> NDArray[np.float64]:
        return self.beta[self.spec.segment(name)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "model": self.spec.to_dict(),
            "lambda2": self.lambda2,
            "beta": [float(b) for b in self.beta],
            "dev_divergence": self.dev_divergence,
            "val_divergence": self.val_divergence,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "FittedModel":
        return cls(
            spec=ModelSpec.from_dict(doc["model"]),
            beta=np.asarray(doc["beta"], dtype=float),
            lambda2=dict(doc.get("lambda2", {})),
            dev_divergence=float(doc["dev_divergence"]),
            val_divergence=None if doc.get("val_divergence") is None else float(doc["val_divergence"]),
        )


def characteristic_score(fitted: FittedModel, name: str, x: float) -> float:
    """Evaluate one characteristic's score at a raw value."""
    char = fitted.spec[name]
    seg = _expand_characteristic(char, np.asarray([float(x)]))[0]
    return float(seg @ fitted.characteristic_beta(name))


def model_score(fitted: FittedModel, record: Mapping[str, float]) -> float:
    """Total score of a record: the sum of its characteristic scores."""
    return float(expand_design(fitted.spec, record) @ fitted.beta)


def characteristic_curve(
    fitted: FittedModel, name: str, n: int = 200
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Sample a characteristic's liquid score on a uniform grid.

    Returns (xs, scores) with n points spanning the knot range
    inclusively.
    """
    char = fitted.spec[name]
    if char.liquid_knots is None:
        raise SpecError(f"{name}: no liquid range to sample")
    k = np.asarray(char.liquid_knots)
    xs = np.linspace(k[0], k[-1], n)
    beta_liq = fitted.beta[fitted.spec.liquid_segment(name)]
    return xs, basis_matrix(char.t, 4, xs) @ beta_liq
