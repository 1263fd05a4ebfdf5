"""HTTP transport: a FastAPI app around a ScorerService.

Requests are validated with pydantic models; responses are emitted
through the canonical wire serializer so both transports produce
byte-identical bodies.
"""

from __future__ import annotations

from fastapi import FastAPI, Response
from pydantic import BaseModel, Field

from .service import ScorerService
from .wire import WireRequest, serialize_response


class ScoreRequestModel(BaseModel):
    id: str
    mode: str
    source_prefix: list[str] = Field(default_factory=list)
    target: list[str] = Field(default_factory=list)
    prefix_len: int = 0
    max_candidates: int = 1


def build_app(service: ScorerService) -> FastAPI:
    app = FastAPI(title="scorer-service", version="0.1.0")

    def respond(body: ScoreRequestModel) -> Response:
        request = WireRequest(
            id=body.id,
            mode=body.mode,
            source_prefix=tuple(body.source_prefix),
            target=tuple(body.target),
            prefix_len=body.prefix_len,
            max_candidates=body.max_candidates,
        )
        payload = serialize_response(service.handle(request))
        return Response(content=payload, media_type="application/json")

    @app.post("/score")
    def score(body: ScoreRequestModel) -> Response:
        return respond(body)

    @app.post("/")
    def score_root(body: ScoreRequestModel) -> Response:
        return respond(body)

    return app
