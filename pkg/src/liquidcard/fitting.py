"""Penalized max-divergence fitting of scorecard coefficients.

The development sample's expanded design vectors are summarized by
weighted class moments: d is the good-minus-bad mean difference and C
the average of the two class covariance matrices.  Minimizing beta'Cbeta
subject to d'beta = delta maximizes the divergence
(mu_G - mu_B)^2 / ((var_G + var_B) / 2) of the score, and ridge and
roughness penalties enter the quadratic form without touching the
constraints, so the fit stays one small dense QP.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from numpy.typing import NDArray

from .data import Dataset
from .qp import QpSolution, QuadraticProgram, solve_qp
from .roughness import char_roughness_matrix
from .scorecard import FittedModel, ModelSpec, all_pattern_constraints, expand_dataset


class DegenerateClassesError(ValueError):
    """Classes cannot be separated or are not both present."""


class DivergenceError(ValueError):
    """Divergence is undefined for the given score distributions."""


@dataclass(frozen=True)
class ClassMoments:
    """Weighted class means and covariances of expanded design vectors."""

    mean_g: NDArray[np.float64]
    mean_b: NDArray[np.float64]
    cov_g: NDArray[np.float64]
    cov_b: NDArray[np.float64]
    n: float

    @property
    def c(self) -> NDArray[np.float64]:
        return (self.cov_g + self.cov_b) / 2.0

    @property
    def d(self) -> NDArray[np.float64]:
        return self.mean_g - self.mean_b


def _weighted_moments(x: NDArray[np.float64], w: NDArray[np.float64]) -> tuple[NDArray, NDArray]:
    total = w.sum()
    mean = (w @ x) / total
    centered = x - mean
    cov = (centered * w[:, None]).T @ centered / total
    return mean, (cov + cov.T) / 2.0


def moments_from_design(
    x: NDArray[np.float64], outcomes: NDArray[np.int_], weights: NDArray[np.float64]
) -> ClassMoments:
    good = outcomes == 1
    w_good = float(weights[good].sum())
    w_bad = float(weights[~good].sum())
    if w_good <= 0.0 or w_bad <= 0.0:
        raise DegenerateClassesError("both outcome classes need positive total weight")
    mean_g, cov_g = _weighted_moments(x[good], weights[good])
    mean_b, cov_b = _weighted_moments(x[~good], weights[~good])
    return ClassMoments(mean_g=mean_g, mean_b=mean_b, cov_g=cov_g, cov_b=cov_b, n=w_good + w_bad)


def compute_moments(spec: ModelSpec, data: Dataset) -> ClassMoments:
    """Expand the dataset and take weighted per-class moments."""
    return moments_from_design(expand_dataset(spec, data.columns), data.outcomes, data.weights)


def score_divergence(
    scores_g: NDArray[np.float64],
    scores_b: NDArray[np.float64],
    weights_g: NDArray[np.float64] | None = None,
    weights_b: NDArray[np.float64] | None = None,
) -> float:
    """Separation statistic (mu_G - mu_B)^2 / ((var_G + var_B) / 2)."""
    sg = np.asarray(scores_g, dtype=float)
    sb = np.asarray(scores_b, dtype=float)
    if sg.size == 0 or sb.size == 0:
        raise DivergenceError("both classes need at least one score")
    wg = np.ones(sg.size) if weights_g is None else np.asarray(weights_g, dtype=float)
    wb = np.ones(sb.size) if weights_b is None else np.asarray(weights_b, dtype=float)
    mu_g = float(wg @ sg / wg.sum())
    mu_b = float(wb @ sb / wb.sum())
    var_g = float(wg @ (sg - mu_g) ** 2 / wg.sum())
    var_b = float(wb @ (sb - mu_b) ** 2 / wb.sum())
    pooled = (var_g + var_b) / 2.0
    if pooled <= 0.0:
        raise DivergenceError("pooled score variance is zero")
    return (mu_g - mu_b) ** 2 / pooled


@dataclass(frozen=True)
class FitRequest:
    """One fitting job: spec plus development data and parameter overrides."""

    spec: ModelSpec
    data: Dataset
    val_data: Dataset | None = None
    ridge_lambda: float | None = None
    lambda2: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, value in self.lambda2.items():
            if value < 0:
                raise ValueError(f"lambda2 override for {name!r} must be >= 0")

    @property
    def effective_spec(self) -> ModelSpec:
        spec = self.spec.with_lambda2(self.lambda2) if self.lambda2 else self.spec
        return spec


def weighted_roughness(spec: ModelSpec) -> NDArray[np.float64]:
    """Block-diagonal roughness matrix with each characteristic's block
    scaled by its own smoothness parameter."""
    p = spec.n_coeffs
    out = np.zeros((p, p))
    for char in spec:
        if char.liquid_knots is None or char.lambda2 == 0.0:
            continue
        block = char_roughness_matrix(char.liquid_knots, char.n_leading, char.n_trailing)
        seg = spec.segment(char.name)
        out[seg, seg] = char.lambda2 * block
    return out


def _qp_from_moments(spec: ModelSpec, moments: ClassMoments, ridge_lambda: float) -> QuadraticProgram:
    d = moments.d
    if np.abs(d).max(initial=0.0) < 1e-12:
        raise DegenerateClassesError("classes are indistinguishable in design space (d = 0)")
    p = spec.n_coeffs
    h = 2.0 * (moments.c + (2.0 * ridge_lambda / moments.n) * np.eye(p) + weighted_roughness(spec))
    a_ineq = all_pattern_constraints(spec)
    return QuadraticProgram(
        h=h,
        a_eq=d[None, :],
        b_eq=np.asarray([spec.delta]),
        a_ineq=a_ineq if a_ineq.shape[0] else None,
        b_ineq=np.zeros(a_ineq.shape[0]) if a_ineq.shape[0] else None,
    )


def build_fit_qp(req: FitRequest) -> QuadraticProgram:
    """Assemble H = 2(C + (2 lambda / n) I + weighted R) plus constraints."""
    spec = req.effective_spec
    ridge = spec.ridge_lambda if req.ridge_lambda is None else req.ridge_lambda
    return _qp_from_moments(spec, compute_moments(spec, req.data), ridge)


@dataclass(frozen=True)
class FitContext:
    """Reusable expansion of a dataset for repeated fits of one spec shape.

    The design matrices and class moments do not depend on the penalty
    parameters, so smoothness sweeps rebuild only the (tiny) QP.
    """

    spec: ModelSpec
    moments: ClassMoments
    x_dev: NDArray[np.float64]
    dev: Dataset
    x_val: NDArray[np.float64] | None = None
    val: Dataset | None = None

    @classmethod
    def build(cls, spec: ModelSpec, dev: Dataset, val: Dataset | None = None) -> "FitContext":
        x_dev = expand_dataset(spec, dev.columns)
        moments = moments_from_design(x_dev, dev.outcomes, dev.weights)
        x_val = expand_dataset(spec, val.columns) if val is not None else None
        return cls(spec=spec, moments=moments, x_dev=x_dev, dev=dev, x_val=x_val, val=val)

    def drop(self, name: str) -> "FitContext":
        """Context for the model with one characteristic removed, reusing
        the existing design columns."""
        reduced = self.spec.drop(name)
        seg = self.spec.segment(name)
        keep = np.r_[0 : seg.start, seg.stop : self.spec.n_coeffs]
        x_dev = self.x_dev[:, keep]
        return FitContext(
            spec=reduced,
            moments=moments_from_design(x_dev, self.dev.outcomes, self.dev.weights),
            x_dev=x_dev,
            dev=self.dev,
            x_val=None if self.x_val is None else self.x_val[:, keep],
            val=self.val,
        )

    def divergence(self, beta: NDArray[np.float64], x: NDArray[np.float64], data: Dataset) -> float:
        scores = x @ beta
        good = data.outcomes == 1
        return score_divergence(scores[good], scores[~good], data.weights[good], data.weights[~good])

    def fit(
        self,
        lambda2: Mapping[str, float] | None = None,
        ridge_lambda: float | None = None,
        warm: QpSolution | None = None,
        patterns: Mapping[str, str] | None = None,
    ) -> tuple[FittedModel, QpSolution]:
        spec = self.spec.with_lambda2(lambda2) if lambda2 else self.spec
        if patterns:
            spec = spec.with_patterns(patterns)
        ridge = spec.ridge_lambda if ridge_lambda is None else ridge_lambda
        qp = _qp_from_moments(spec, self.moments, ridge)
        if warm is not None:
            sol = solve_qp(qp, x0=warm.x, active_set=warm.active_set)
        else:
            sol = solve_qp(qp)
        dev_div = self.divergence(sol.x, self.x_dev, self.dev)
        val_div = (
            self.divergence(sol.x, self.x_val, self.val)
            if self.x_val is not None and self.val is not None
            else None
        )
        fitted = FittedModel(
            spec=spec,
            beta=sol.x,
            lambda2=spec.lambda2_map,
            dev_divergence=dev_div,
            val_divergence=val_div,
        )
        return fitted, sol


def fit(req: FitRequest) -> FittedModel:
    """Solve the penalized max-divergence program for one request."""
    ctx = FitContext.build(req.effective_spec, req.data, req.val_data)
    fitted, _ = ctx.fit(ridge_lambda=req.ridge_lambda)
    return fitted


def woe_rescale(fitted: FittedModel) -> FittedModel:
    """Scale coefficients so the score's class-mean difference equals its
    divergence (weight-of-evidence convention for equal-variance classes).

    Divergence itself is scale invariant, and the positive scale factor
    preserves any pattern constraints.
    """
    if not fitted.dev_divergence > 0.0:
        raise DivergenceError("cannot rescale a fit with zero divergence")
    factor = fitted.dev_divergence / fitted.spec.delta
    return FittedModel(
        spec=fitted.spec,
        beta=fitted.beta * factor,
        lambda2=dict(fitted.lambda2),
        dev_divergence=fitted.dev_divergence,
        val_divergence=fitted.val_divergence,
    )
