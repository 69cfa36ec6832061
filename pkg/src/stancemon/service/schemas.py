"""Request and response models for the review-loop API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class PredictRequest(BaseModel):
    text: str


class PredictResponse(BaseModel):
    label: str
    negative_score: float
    scores: dict[str, float]


class IngestLineError(BaseModel):
    line: int
    message: str


class IngestResponse(BaseModel):
    queued: int
    received: int
    kept_after_filters: int
    errors: list[IngestLineError] = Field(default_factory=list)


class ReviewItemModel(BaseModel):
    tweet_id: str
    text: str
    negative_score: float
    predicted_label: str
    status: str
    verdict_time: str | None = None


class VerdictRequest(BaseModel):
    verdict: Literal["Negative", "Other"]


class RetrainResponse(BaseModel):
    model_version: int
    train_size: int


class StatsResponse(BaseModel):
    pending: int
    confirmed: int
    rejected: int
    flag_precision_estimate: float | None = None


class HealthResponse(BaseModel):
    status: str
    model_version: int | None = None
    scheme: str | None = None
