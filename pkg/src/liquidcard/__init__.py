"""Liquid scorecard toolkit.

Fits spline-smooth ("liquid") characteristic scores by maximizing
penalized divergence under monotone-pattern constraints, with exact
curvature (roughness) penalties and per-characteristic smoothness tuning.
"""

from .data import DataError, Dataset
from .fitting import (
    ClassMoments,
    DegenerateClassesError,
    DivergenceError,
    FitContext,
    FitRequest,
    build_fit_qp,
    compute_moments,
    fit,
    score_divergence,
    woe_rescale,
)
from .legacy import ScoreBin, StepCharacteristic, StepScorecard, smooth_step_scorecard
from .qp import (
    QpError,
    QpInfeasibleError,
    QpIterationLimitError,
    QpNearSingularError,
    QpSolution,
    QpUnboundedError,
    QuadraticProgram,
    solve_qp,
)
from .roughness import char_roughness_matrix, model_roughness_matrix, roughness_quadrature_oracle
from .scorecard import (
    CharacteristicSpec,
    DiscreteAttribute,
    DomainError,
    FittedModel,
    ModelSpec,
    PatternError,
    SpecError,
    characteristic_curve,
    characteristic_score,
    expand_design,
    model_score,
    pattern_constraints,
)
from .spline_basis import (
    KnotError,
    basis_derivative,
    basis_eval,
    basis_matrix,
    build_t_vector,
    greville_abscissae,
    second_deriv_coeffs,
)
from .synth import SynthConfig, generate
from .tuning import TuneReport, default_lambda2_grid, greedy_tune, marginal_contributions

__version__ = "0.1.0"

__all__ = [
    "CharacteristicSpec",
    "ClassMoments",
    "DataError",
    "Dataset",
    "DegenerateClassesError",
    "DiscreteAttribute",
    "DivergenceError",
    "DomainError",
    "FitContext",
    "FitRequest",
    "FittedModel",
    "KnotError",
    "ModelSpec",
    "PatternError",
    "QpError",
    "QpInfeasibleError",
    "QpIterationLimitError",
    "QpNearSingularError",
    "QpSolution",
    "QpUnboundedError",
    "QuadraticProgram",
    "ScoreBin",
    "SpecError",
    "StepCharacteristic",
    "StepScorecard",
    "SynthConfig",
    "TuneReport",
    "basis_derivative",
    "basis_eval",
    "basis_matrix",
    "build_fit_qp",
    "build_t_vector",
    "char_roughness_matrix",
    "characteristic_curve",
    "characteristic_score",
    "compute_moments",
    "default_lambda2_grid",
    "expand_design",
    "fit",
    "generate",
    "greedy_tune",
    "greville_abscissae",
    "marginal_contributions",
    "model_roughness_matrix",
    "model_score",
    "pattern_constraints",
    "roughness_quadrature_oracle",
    "score_divergence",
    "second_deriv_coeffs",
    "smooth_step_scorecard",
    "solve_qp",
    "woe_rescale",
]
