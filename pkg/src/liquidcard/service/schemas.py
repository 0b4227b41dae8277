"""Pydantic request/response models for the tuning service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class SplitParams(BaseModel):
    val_fraction: float = Field(default=0.25, gt=0.0, lt=1.0)
    seed: int = 0


class CreateSessionRequest(BaseModel):
    model: dict[str, Any]
    dataset_path: str | None = None
    dataset_csv: str | None = None
    split: SplitParams = Field(default_factory=SplitParams)


class Divergences(BaseModel):
    dev_divergence: float
    val_divergence: float


class CharacteristicState(BaseModel):
    name: str
    has_liquid: bool
    pattern: str
    xscale: str
    lambda2: float | None
    locked: bool
    contribution: float


class SessionCreated(BaseModel):
    session_id: str
    baseline: Divergences
    grid: list[float]
    characteristics: list[CharacteristicState]
    next_suggestion: str | None


class CurveSample(BaseModel):
    characteristic: str
    lambda2: float
    xs: list[float]
    xs_log1p: list[float] | None = None
    cs: list[float]
    dev_divergence: float
    val_divergence: float


class RefitRequest(BaseModel):
    lambda2: dict[str, float] = Field(default_factory=dict)
    patterns: dict[str, str] = Field(default_factory=dict)


class RefitResponse(BaseModel):
    dev_divergence: float
    val_divergence: float
    val_delta_vs_baseline: float
    cache_hit: bool
    curves: list[CurveSample]


class LockRequest(BaseModel):
    characteristic: str
    lambda2: float = Field(ge=0.0)


class LockResponse(BaseModel):
    locked: list[str]
    chosen_lambda2: dict[str, float | None]
    next_suggestion: str | None
    final: Divergences | None


class SessionState(BaseModel):
    session_id: str
    baseline: Divergences
    current: Divergences
    val_delta_vs_baseline: float
    grid: list[float]
    characteristics: list[CharacteristicState]
    next_suggestion: str | None
    locks: list[dict[str, Any]]


class ErrorBody(BaseModel):
    code: str
    message: str
    detail: Any = None
