"""HTTP service for the review loop.

Flags high-scoring negative-stance messages out of an ingested stream,
collects human verdicts on them, and retrains the active model on demand
with the verdicts folded in as reliable training data.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.staticfiles import StaticFiles

from ..annotation import NEGATIVE, SCHEMES, TrainVariant, compose_training, load_dataset
from ..corpus import FilterConfig, Tweet, apply_filters
from ..errors import StancemonError
from ..evaluation import (
    DEFAULT_SETTINGS,
    Algorithm,
    TrainSettings,
    train_from_instances,
)
from ..features import tokenize, vectorize
from ..models import ModelArtifact, load_model, predict, save_model
from .schemas import (
    HealthResponse,
    IngestLineError,
    IngestResponse,
    PredictRequest,
    PredictResponse,
    RetrainResponse,
    ReviewItemModel,
    StatsResponse,
    VerdictRequest,
)
from .store import AlreadyJudgedError, ReviewItem, ReviewStore, UnknownItemError


@dataclass(frozen=True)
class ServeConfig:
    model_path: Path | None = None
    data_dir: Path | None = None
    base_dataset_path: Path | None = None
    variant: TrainVariant = TrainVariant.STRICT_LAX
    algorithm: Algorithm = Algorithm.SVM
    # None flags by predicted label; a number flags by negative_score.
    flag_threshold: float | None = None
    filter_config: FilterConfig = field(default_factory=FilterConfig)
    settings: TrainSettings = DEFAULT_SETTINGS
    seed: int = 42
    static_dir: Path | None = None


class ServiceState:
    """Shared mutable state: the active model and the review store.

    The model reference swaps atomically under a lock; retraining is
    exclusive via a separate non-blocking lock so concurrent requests get
    a conflict instead of queueing.
    """

    def __init__(self, config: ServeConfig):
        self.config = config
        self.store = ReviewStore(config.data_dir)
        self._model_lock = threading.RLock()
        self.retrain_lock = threading.Lock()
        self._artifact: ModelArtifact | None = None
        self._version = 0
        if config.model_path is not None:
            self.swap_model(load_model(config.model_path))

    @property
    def snapshot(self) -> tuple[ModelArtifact | None, int]:
        with self._model_lock:
            return self._artifact, self._version

    def swap_model(self, artifact: ModelArtifact) -> int:
        with self._model_lock:
            self._artifact = artifact
            self._version += 1
            return self._version

    def predict_text(self, text: str) -> PredictResponse:
        artifact, _ = self.snapshot
        if artifact is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        vec = vectorize(tokenize(text), artifact.vocabulary)
        prediction = predict(artifact.model, vec)
        return PredictResponse(
            label=prediction.label,
            negative_score=prediction.negative_score(NEGATIVE),
            scores=prediction.scores,
        )


def _parse_ingest_body(body: bytes) -> tuple[list[Tweet], list[IngestLineError]]:
    tweets: list[Tweet] = []
    errors: list[IngestLineError] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(body.decode("utf-8", errors="replace").splitlines(), 1):
        if not raw.strip():
            continue
        try:
            row = json.loads(raw)
            if not isinstance(row, dict):
                raise ValueError("expected a JSON object")
            if not row.get("id") or not isinstance(row.get("text"), str):
                raise ValueError("fields 'id' and 'text' are required")
            tweet = Tweet(
                id=str(row["id"]),
                text=row["text"],
                is_retweet=row.get("is_retweet"),
                timestamp=row.get("timestamp") or None,
                query_term=row.get("query_term") or None,
            )
            if tweet.id in seen:
                raise ValueError(f"duplicate id {tweet.id!r} in ingest body")
            seen.add(tweet.id)
            tweets.append(tweet)
        except (json.JSONDecodeError, ValueError, TypeError) as exc:
            message = exc.msg if isinstance(exc, json.JSONDecodeError) else str(exc)
            errors.append(IngestLineError(line=lineno, message=message))
    return tweets, errors


def create_app(config: ServeConfig) -> FastAPI:
    app = FastAPI(title="stancemon review service")
    state = ServiceState(config)
    app.state.service = state

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        artifact, version = state.snapshot
        return HealthResponse(
            status="ok",
            model_version=version if artifact else None,
            scheme=artifact.scheme if artifact else None,
        )

    @app.post("/api/predict", response_model=PredictResponse)
    def predict_endpoint(request: PredictRequest) -> PredictResponse:
        if not request.text.strip():
            raise HTTPException(status_code=400, detail="text must be non-empty")
        return state.predict_text(request.text)

    @app.post("/api/ingest", response_model=IngestResponse, response_model_exclude_defaults=False)
    async def ingest(request: Request, strict: bool = Query(default=True)) -> IngestResponse:
        body = await request.body()
        tweets, errors = _parse_ingest_body(body)
        if errors and strict:
            raise HTTPException(
                status_code=400,
                detail={
                    "message": "malformed ingest lines",
                    "errors": [e.model_dump() for e in errors],
                },
            )
        artifact, _ = state.snapshot
        if artifact is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        kept, _report = apply_filters(tweets, config.filter_config)
        queued = 0
        for tweet in kept:
            response = state.predict_text(tweet.text)
            if config.flag_threshold is None:
                flagged = response.label == NEGATIVE
            else:
                flagged = response.negative_score >= config.flag_threshold
            if flagged and state.store.add_item(
                ReviewItem(
                    tweet_id=tweet.id,
                    text=tweet.text,
                    negative_score=response.negative_score,
                    predicted_label=response.label,
                )
            ):
                queued += 1
        return IngestResponse(
            queued=queued, received=len(tweets), kept_after_filters=len(kept), errors=errors
        )

    @app.get("/api/review/queue", response_model=list[ReviewItemModel])
    def review_queue(limit: int | None = Query(default=None, ge=0)) -> list[ReviewItemModel]:
        return [_item_model(item) for item in state.store.pending(limit)]

    @app.post("/api/review/{tweet_id}", response_model=ReviewItemModel)
    def review_verdict(tweet_id: str, request: VerdictRequest) -> ReviewItemModel:
        try:
            item = state.store.record_verdict(tweet_id, request.verdict)
        except UnknownItemError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except AlreadyJudgedError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return _item_model(item)

    @app.post("/api/retrain", response_model=RetrainResponse)
    def retrain() -> RetrainResponse:
        if config.base_dataset_path is None:
            raise HTTPException(status_code=503, detail="no base dataset configured")
        if not state.retrain_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="a retrain is already running")
        try:
            dataset = load_dataset(config.base_dataset_path)
            training = compose_training(dataset, config.variant)
            training = training + state.store.feedback_instances(dataset.scheme)
            model, vocabulary = train_from_instances(
                training,
                dataset.scheme,
                config.algorithm,
                settings=config.settings,
                seed_key=(config.seed,),
            )
            artifact = ModelArtifact(
                kind=config.algorithm.value,
                scheme=dataset.scheme.name,
                vocabulary=vocabulary,
                model=model,
            )
            version = state.swap_model(artifact)
            if config.data_dir is not None:
                save_model(artifact, Path(config.data_dir) / f"model_v{version}.json")
            return RetrainResponse(model_version=version, train_size=len(training))
        except HTTPException:
            raise
        except (StancemonError, ValueError, OSError) as exc:
            raise HTTPException(status_code=500, detail=f"retrain failed: {exc}") from exc
        finally:
            state.retrain_lock.release()

    @app.get(
        "/api/stats",
        response_model=StatsResponse,
        response_model_exclude_none=True,
    )
    def stats() -> StatsResponse:
        pending, confirmed, rejected = state.store.counts()
        estimate = (
            confirmed / (confirmed + rejected) if confirmed + rejected else None
        )
        return StatsResponse(
            pending=pending,
            confirmed=confirmed,
            rejected=rejected,
            flag_precision_estimate=estimate,
        )

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app


def _item_model(item: ReviewItem) -> ReviewItemModel:
    return ReviewItemModel(
        tweet_id=item.tweet_id,
        text=item.text,
        negative_score=item.negative_score,
        predicted_label=item.predicted_label,
        status=item.status.value,
        verdict_time=item.verdict_time,
    )
