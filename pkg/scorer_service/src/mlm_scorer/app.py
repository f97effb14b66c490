"""HTTP surface: POST /v1/score and GET /v1/health.

Status codes: 400 malformed request, 422 slot-count violation, 503
while the model is loading. Scores align with candidate order and are
deterministic for a fixed model id.
"""

from __future__ import annotations

import math
import os
import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .backend import SLOT, ScoringError, TransformersMlmBackend

DEFAULT_MODEL_ID = "bert-large-uncased"


class ScoreRequest(BaseModel):
    template: str = Field(min_length=1)
    candidates: list[str] = Field(min_length=1)


class ScoreResponse(BaseModel):
    scores: list[float]
    model_id: str


class HealthResponse(BaseModel):
    status: str
    model_id: str


class ModelHolder:
    def __init__(self, model_id: str, batch_size: int):
        self.model_id = model_id
        self.batch_size = batch_size
        self.backend: TransformersMlmBackend | None = None
        self._lock = threading.Lock()

    def load(self):
        with self._lock:
            if self.backend is None:
                self.backend = TransformersMlmBackend(self.model_id, self.batch_size)
        return self.backend


def create_app(model_id: str = None, batch_size: int = None, load: bool = True) -> FastAPI:
    model_id = model_id or os.environ.get("MLM_MODEL_ID", DEFAULT_MODEL_ID)
    batch_size = batch_size or int(os.environ.get("MLM_BATCH_SIZE", "16"))
    holder = ModelHolder(model_id, batch_size)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if load:
            holder.load()
        yield

    app = FastAPI(title="mlm-scorer", version="0.1.0", lifespan=lifespan)
    app.state.holder = holder

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/v1/health", response_model=HealthResponse, responses={503: {}})
    def health():
        if holder.backend is None:
            return JSONResponse(
                status_code=503,
                content={"status": "loading", "model_id": holder.model_id},
            )
        return HealthResponse(status="ok", model_id=holder.model_id)

    @app.post("/v1/score", response_model=ScoreResponse, responses={422: {}, 503: {}})
    def score(request: ScoreRequest):
        if holder.backend is None:
            return JSONResponse(status_code=503, content={"detail": "model not ready"})
        slots = request.template.count(SLOT)
        if slots != 1:
            return JSONResponse(
                status_code=422,
                content={"detail": f"template must contain exactly one {SLOT}, found {slots}"},
            )
        try:
            scores = holder.backend.score(request.template, request.candidates)
        except ScoringError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        if not all(math.isfinite(s) for s in scores):
            return JSONResponse(
                status_code=500, content={"detail": "non-finite score produced"}
            )
        return ScoreResponse(scores=scores, model_id=holder.model_id)

    return app
